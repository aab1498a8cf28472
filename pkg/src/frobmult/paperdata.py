"""Constants of the counterexample and constructors built from them.

Every number here is read from the checked-in text assets under ``data/``;
``MANIFEST`` records a git-style blob hash for each file and is checked on
load, so a transcription edit cannot slip through silently.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .exactlin import FieldSpec, ScalarMatrix, from_text
from .groebner import DEFAULT_CAPS, Caps, subring_module_relations
from .homology import ChainComplex, FiniteLengthModule, PolyMatrix, sigma_twist
from .polyring import Polynomial, RingPresentation

BLOCK_SIZES = (4, 15, 12, 24)
A_VARS = ("u", "v", "w", "x", "y", "z")
R_EXTRA = ("a", "b", "c", "d", "e")
DATA_FILES = tuple(
    [f"psi/{n}.mat" for n in ("a1", "a2", "a3", "b1", "b2", "b3", "c6", "d3", "d4", "d5", "d6")]
    + [f"phi/phi{i}.pmat" for i in range(1, 5)]
    + ["rings/A.ring", "rings/R.ring"]
)


class AssetError(RuntimeError):
    pass


def _data_root():
    return resources.files("frobmult") / "data"


def blob_hash(data: bytes) -> str:
    """Git's object id for a blob with this content."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def read_manifest() -> dict[str, str]:
    out = {}
    for ln in (_data_root() / "MANIFEST").read_text().splitlines():
        ln = ln.strip()
        if ln and not ln.startswith("#"):
            h, name = ln.split()
            out[name] = h
    return out


def write_manifest() -> str:
    """Regenerate ``data/MANIFEST`` from the current files (maintenance helper)."""
    lines = ["# git blob hashes of the data assets"]
    for name in DATA_FILES:
        lines.append(f"{blob_hash((_data_root() / name).read_bytes())} {name}")
    text = "\n".join(lines) + "\n"
    (_data_root() / "MANIFEST").write_text(text)
    return text


def read_asset(name: str, verify: bool = True) -> str:
    want = read_manifest().get(name) if verify else None
    if verify and want is None:
        raise AssetError(f"{name} is not listed in the data manifest")
    raw = (_data_root() / name).read_bytes()
    if verify:
        if blob_hash(raw) != want:
            raise AssetError(f"checksum mismatch for {name}")
    return raw.decode()


def assets_hash() -> str:
    """One hash over all asset blob hashes (echoed in every report)."""
    man = read_manifest()
    h = hashlib.sha1()
    for name in DATA_FILES:
        h.update(f"{man[name]} {name}\n".encode())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# psi blocks and N
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockSpec:
    """Block layout of the psi matrices: a (1 <- 3), c (1 <- 4), d (2 <- 4), b (3 <- 4)."""

    sizes: tuple[int, ...] = BLOCK_SIZES
    placement: tuple[tuple[str, int, int], ...] = (("a", 0, 2), ("c", 0, 3), ("d", 1, 3), ("b", 2, 3))

    @property
    def dim(self) -> int:
        return sum(self.sizes)

    def offsets(self) -> list[int]:
        out, acc = [], 0
        for s in self.sizes:
            out.append(acc)
            acc += s
        return out


def block_matrix(kind: str, i: int, p: int = 2) -> ScalarMatrix:
    """The block ``kind_i`` (1-based ``i``); blocks not printed as nonzero are zero."""
    spec = BlockSpec()
    shapes = {"a": (0, 2), "b": (2, 3), "c": (0, 3), "d": (1, 3)}
    r, c = shapes[kind]
    name = f"psi/{kind}{i}.mat"
    if name in DATA_FILES:
        m = from_text(read_asset(name))
        return m if p == 2 else ScalarMatrix.from_rows(m.tolist(), p, m.cols)
    return ScalarMatrix.zeros(spec.sizes[r], spec.sizes[c], p)


def psi_blocks(p: int = 2) -> dict[str, list[ScalarMatrix]]:
    return {k: [block_matrix(k, i, p) for i in range(1, 7)] for k in "abcd"}


def build_N(p: FieldSpec | int = 2) -> FiniteLengthModule:
    """The 55-dimensional module N: psi_i acting by the block matrices."""
    p = p.p if isinstance(p, FieldSpec) else FieldSpec(p).p
    return _build_N(p)


@lru_cache(maxsize=None)
def _build_N(p: int) -> FiniteLengthModule:
    spec = BlockSpec()
    blocks = psi_blocks(p)
    acts = []
    for i in range(6):
        grid = [[None] * 4 for _ in range(4)]
        for kind, r, c in spec.placement:
            grid[r][c] = blocks[kind][i]
        acts.append(ScalarMatrix.block(grid, spec.sizes, spec.sizes, p))
    return FiniteLengthModule(A_VARS, acts, p, spec.dim)


def build_N_twisted(p: FieldSpec | int = 2) -> FiniteLengthModule:
    """N' = N with u and x exchanged."""
    return sigma_twist(build_N(p))


# ---------------------------------------------------------------------------
# rings, ideals, the phi complex
# ---------------------------------------------------------------------------

def build_A(p: FieldSpec | int = 2) -> RingPresentation:
    """The hypersurface ``K[u,v,w,x,y,z]/(ux+vy+wz)``."""
    p = p.p if isinstance(p, FieldSpec) else FieldSpec(p).p
    return _build_A(p)


@lru_cache(maxsize=None)
def _build_A(p: int) -> RingPresentation:
    return RingPresentation.from_text(read_asset("rings/A.ring"), name="A", p=p)


@lru_cache(maxsize=None)
def build_R_presentation() -> RingPresentation:
    """R = A[a,b,c,d,e] modulo 15 products and 5 linear relations, characteristic 2."""
    return RingPresentation.from_text(read_asset("rings/R.ring"), name="R")


@dataclass(frozen=True)
class NamedIdeal:
    name: str
    generators: tuple[str, ...]

    def polynomials(self, ambient: RingPresentation) -> list[Polynomial]:
        return [ambient.parse(g) for g in self.generators]


IDEALS = {
    "P": NamedIdeal("P", ("u", "v", "w")),
    "Q": NamedIdeal("Q", ("x", "v", "w")),
    "I": NamedIdeal("I", ("u", "x", "v", "y", "w + z")),
}


def named_ideal(name: str) -> NamedIdeal:
    return IDEALS[name]


def load_phi(i: int, ambient: RingPresentation | None = None) -> PolyMatrix:
    ambient = ambient or build_A()
    return PolyMatrix.from_text(ambient, read_asset(f"phi/phi{i}.pmat"))


def build_phi_complex(p: FieldSpec | int = 2) -> ChainComplex:
    """Resolution of A/P: phi_1, phi_2, phi_3, phi_4, then phi_3, phi_4 forever."""
    amb = build_A(p)
    c = ChainComplex(amb, [load_phi(i, amb) for i in range(1, 5)], period=2)
    c.notes["resolves"] = "A/P"
    return c


def ideal_complex(gens: list[str], ambient: RingPresentation) -> PolyMatrix:
    """The 1 x k presentation ``(g_1 ... g_k)`` of ``ambient / (g)``."""
    return PolyMatrix.parse(ambient, [gens])


# ---------------------------------------------------------------------------
# alpha, beta and their reduced submatrices
# ---------------------------------------------------------------------------

def alpha(p: int = 2) -> ScalarMatrix:
    from .homology import substitute
    return substitute(load_phi(3, build_A(p)), build_N(p))


def beta(p: int = 2) -> ScalarMatrix:
    from .homology import substitute
    return substitute(load_phi(4, build_A(p)), build_N(p))


def theta(i: int, p: int = 2) -> ScalarMatrix:
    from .homology import substitute
    return substitute(load_phi(i, build_A(p)), build_N(p))


def _assemble(layout: list[list[tuple[str, int, int] | None]], p: int) -> ScalarMatrix:
    """Block matrix from entries ``(kind, index, sign)``; all blocks in a block
    row share a row size, read off the first nonzero entry."""
    blocks = psi_blocks(p)
    grid, rs, cs = [], [], [None] * len(layout[0])
    for row in layout:
        g, size = [], None
        for j, ent in enumerate(row):
            if ent is None:
                g.append(None)
                continue
            kind, i, sign = ent
            m = blocks[kind][i - 1]
            size = m.rows
            cs[j] = m.cols
            g.append(m if sign > 0 else -m)
        grid.append(g)
        rs.append(size)
    return ScalarMatrix.block(grid, rs, cs, p)


def alpha1(p: int = 2) -> ScalarMatrix:
    """The submatrix of alpha carrying all but 40 of its rank."""
    lay = [
        [("d", 1, 1), ("d", 2, 1), ("d", 3, 1)],
        [None, ("d", 6, 1), ("d", 5, -1)],
        [("d", 6, -1), None, ("d", 4, 1)],
        [("d", 5, 1), ("d", 4, -1), None],
        [("b", 1, 1), ("b", 2, 1), ("b", 3, 1)],
    ]
    return _assemble(lay, p)


def beta1(p: int = 2) -> ScalarMatrix:
    """The submatrix of beta carrying all but 12 of its rank."""
    lay = [
        [None, ("c", 4, 1), ("c", 5, 1), ("c", 6, 1)],
        [None, ("d", 4, 1), ("d", 5, 1), ("d", 6, 1)],
        [("d", 4, 1), None, ("d", 3, -1), ("d", 2, 1)],
        [("d", 5, 1), ("d", 3, 1), None, ("d", 1, -1)],
        [("d", 6, 1), ("d", 2, -1), ("d", 1, 1), None],
        [None, None, ("b", 3, -1), ("b", 2, 1)],
        [None, ("b", 3, 1), None, ("b", 1, -1)],
        [None, ("b", 2, -1), ("b", 1, 1), None],
    ]
    return _assemble(lay, p)


# ---------------------------------------------------------------------------
# R as an A-module and the map onto P
# ---------------------------------------------------------------------------

@dataclass
class RtoPMap:
    """``R -> P``: R presented over A on generators 1,a,b,c,d,e, and the images."""

    A: RingPresentation
    generators: tuple[str, ...]
    relations: PolyMatrix          # 6 x k over A, columns are A-linear relations
    images: list[Polynomial]       # image of each generator in A
    kernel_generators: tuple[str, ...] = ("1", "d", "e")
    notes: dict = field(default_factory=dict)


@lru_cache(maxsize=None)
def r_over_A(caps: Caps = DEFAULT_CAPS) -> PolyMatrix:
    """Presentation of R as an A-module on ``1, a, b, c, d, e`` (computed)."""
    Rp = build_R_presentation()
    ring = Rp.ring
    elems = [ring.one()] + [ring.var(v) for v in R_EXTRA]
    _, rels = subring_module_relations(elems, Rp, A_VARS, caps)
    A = build_A(2)
    cols = [[f.map_to(A.ring) for f in r] for r in rels]
    from .homology import prune_generators
    from .groebner import column_vector
    vecs = prune_generators([column_vector(c) for c in cols], A, 6, caps)
    return PolyMatrix.from_vectors(A, vecs, 6)


def build_R_to_P_map(caps: Caps = DEFAULT_CAPS) -> RtoPMap:
    A = build_A(2)
    imgs = [A.parse(s) for s in ("0", "u", "v", "w", "0", "0")]
    return RtoPMap(A, ("1",) + R_EXTRA, r_over_A(caps), imgs)


def r_images_of_A() -> dict[str, Polynomial]:
    """Variables of A sent to the same-named variables of R."""
    Rp = build_R_presentation()
    return {v: Rp.ring.var(v) for v in A_VARS}


@dataclass
class ExactSequenceReport:
    """Outcome of checking ``0 -> A^3 -> R -> P -> 0`` along :class:`RtoPMap`."""

    well_defined: bool
    image_is_P: bool
    kernel_generated: bool
    kernel_free: bool
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.well_defined and self.image_is_P and self.kernel_generated and self.kernel_free


def check_exact_sequence(m: RtoPMap | None = None, caps: Caps = DEFAULT_CAPS) -> ExactSequenceReport:
    """Image, kernel and kernel syzygies of the A-linear map ``R -> P``."""
    from .groebner import buchberger, column_vector, ideal, module_kernel
    from .homology import ambient_ideal

    m = m or build_R_to_P_map(caps)
    A = m.A
    ring = A.ring
    gbA = ambient_ideal(A)
    rels = m.relations
    n = len(m.generators)
    # every relation of R over A maps to zero
    well = all(not gbA.reduce_poly(sum((f * g for f, g in zip(rels.column(j), m.images)), ring.zero())).terms
               for j in range(rels.cols))
    image_is_P = ideal([g for g in m.images if g.terms], A, caps) == ideal(named_ideal("P").polynomials(A), A, caps)
    # kernel of A^6 -> A modulo the relations of R, against the span of 1, d, e
    ker = module_kernel([dict(g.terms) for g in m.images], 1, A, caps)
    idx = [m.generators.index(g) for g in m.kernel_generators]
    units = [column_vector([ring.one() if i == k else ring.zero() for i in range(n)]) for k in idx]
    sub = buchberger(rels.column_vectors() + units, A, n, caps)
    generated = all(not sub.normal_form(v) for v in ker)
    # combinations of 1, d, e lying in the relation module
    syz = module_kernel(rels.column_vectors() + units, n, A, caps)
    free = all(not gbA.reduce_poly(f).terms
               for v in syz for f in _vector_slice(ring, v, rels.cols, len(units)))
    return ExactSequenceReport(well, image_is_P, generated, free,
                               {"kernel_generators": len(ker), "relation_syzygies": len(syz)})


def _vector_slice(ring, v, start: int, count: int):
    from .groebner import vector_entries
    return vector_entries(ring, v, start + count)[start:]
