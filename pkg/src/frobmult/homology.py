"""Complexes over a ring presentation, finite-length modules and Tor.

Two independent ways to get Tor lengths are provided:

* scalar substitution: a free resolution of one module is tensored with a
  finite-length module given by commuting nilpotent action matrices, and the
  homology is read off from ranks of ordinary matrices over GF(p);
* Gröbner resolutions: :func:`free_resolution` builds a resolution from
  repeated module kernels, which can then be fed back into the scalar route.

All modules we care about are supported at the origin, so lengths over the
affine ring equal lengths over its localisation.  Minimisation of resolutions
is done locally (any entry with nonzero constant term is a unit).
"""
from __future__ import annotations

import heapq
import json
import logging
import math
import time
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from .exactlin import ScalarMatrix, kernel_basis, rank, rank_bits, rref
from .groebner import (DEFAULT_CAPS, Caps, GroebnerBasis, ResourceCapExceeded, Vector, _ideal_seed,
                       _seeded_builder, buchberger, column_vector, module_kernel, shifted_degree, vector_degree,
                       vector_entries)
from .polyring import ModuleFrame, Polynomial, PolyRing, RingPresentation

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# finite-length modules
# ---------------------------------------------------------------------------

class FiniteLengthModule:
    """A finite-dimensional GF(p)-vector space with one action matrix per variable."""

    def __init__(self, names: Sequence[str], actions: Sequence[ScalarMatrix], p: int, dim: int | None = None):
        self.names = tuple(names)
        self.actions = list(actions)
        self.p = p
        if len(self.actions) != len(self.names):
            raise ValueError("one action matrix per variable is required")
        if dim is None:
            if not self.actions:
                raise ValueError("dimension needed when there are no variables")
            dim = self.actions[0].rows
        self.dim = dim
        for m in self.actions:
            if m.shape != (dim, dim) or m.p != p:
                raise ValueError("action matrices must be dim x dim over GF(p)")
        self._cache: dict[tuple[int, ...], ScalarMatrix] = {}

    @classmethod
    def residue_field(cls, names: Sequence[str], p: int) -> FiniteLengthModule:
        return cls(names, [ScalarMatrix.zeros(1, 1, p) for _ in names], p, 1)

    @classmethod
    def zero(cls, names: Sequence[str], p: int) -> FiniteLengthModule:
        return cls(names, [ScalarMatrix.zeros(0, 0, p) for _ in names], p, 0)

    @classmethod
    def from_groebner(cls, gb: GroebnerBasis) -> FiniteLengthModule:
        """The finite-length quotient ``F / gb`` with its variable actions."""
        basis, mats = gb.multiplication_matrices()
        return cls(gb.ring.names, mats, gb.ring.p, len(basis))

    def action(self, name: str) -> ScalarMatrix:
        return self.actions[self.names.index(name)]

    def monomial_action(self, exps: Sequence[int]) -> ScalarMatrix:
        exps = tuple(exps)
        hit = self._cache.get(exps)
        if hit is not None:
            return hit
        if not any(exps):
            out = ScalarMatrix.identity(self.dim, self.p)
        else:
            i = max(j for j, e in enumerate(exps) if e)
            lower = list(exps)
            lower[i] -= 1
            out = self.actions[i] @ self.monomial_action(lower)
        self._cache[exps] = out
        return out

    def evaluate(self, f: Polynomial) -> ScalarMatrix:
        """The action of ``f``, with variables matched by name."""
        ring = f.ring
        idx = [self.names.index(nm) if nm in self.names else None for nm in ring.names]
        out = ScalarMatrix.zeros(self.dim, self.dim, self.p)
        for k, c in f.terms.items():
            e = [0] * len(self.names)
            for i, x in enumerate(ring.exps(k)):
                if x:
                    if idx[i] is None:
                        raise ValueError(f"variable {ring.names[i]} has no action")
                    e[idx[i]] = x
            out = out + self.monomial_action(e).scale(c)
        return out

    def commutes(self) -> bool:
        return all(a @ b == b @ a for a, b in combinations(self.actions, 2))

    def satisfies(self, relations: Iterable[Polynomial]) -> bool:
        return all(self.evaluate(r).is_zero() for r in relations)

    def is_nilpotent(self) -> bool:
        for m in self.actions:
            power = m
            for _ in range(max(self.dim, 1)):
                if power.is_zero():
                    break
                power = power @ m
            if not power.is_zero():
                return False
        return True

    def check(self, relations: Iterable[Polynomial] = ()) -> None:
        if not self.commutes():
            raise ValueError("action matrices do not commute")
        if not self.satisfies(relations):
            raise ValueError("a defining relation does not vanish on the module")
        if not self.is_nilpotent():
            raise ValueError("an action is not nilpotent")

    def twist(self, perm: Mapping[str, str]) -> FiniteLengthModule:
        """Restrict scalars along the variable permutation ``perm``."""
        acts = [self.actions[self.names.index(perm.get(nm, nm))] for nm in self.names]
        return FiniteLengthModule(self.names, acts, self.p, self.dim)

    def maximal_ideal_image(self) -> ScalarMatrix:
        if not self.actions:
            return ScalarMatrix.zeros(self.dim, 0, self.p)
        out = self.actions[0]
        for m in self.actions[1:]:
            out = out.hstack(m)
        return out

    def __eq__(self, other):
        if not isinstance(other, FiniteLengthModule):
            return NotImplemented
        return self.names == other.names and self.dim == other.dim and self.actions == other.actions

    def __repr__(self):
        return f"FiniteLengthModule(dim={self.dim}, p={self.p})"


def sigma_twist(mod: FiniteLengthModule, a: str = "u", b: str = "x") -> FiniteLengthModule:
    """Swap the actions of two variables (the automorphism exchanging ``a`` and ``b``)."""
    return mod.twist({a: b, b: a})


# ---------------------------------------------------------------------------
# polynomial matrices and complexes
# ---------------------------------------------------------------------------

class PolyMatrix:
    """A ``rows x cols`` matrix of polynomials over an ambient presentation."""

    def __init__(self, ambient: RingPresentation, entries: Sequence[Sequence[Polynomial]],
                 rows: int | None = None, cols: int | None = None):
        self.ambient = ambient
        self.ring = ambient.ring
        self.entries = [list(r) for r in entries]
        self.rows = len(self.entries) if rows is None else rows
        self.cols = (len(self.entries[0]) if self.entries else 0) if cols is None else cols
        if self.rows and len(self.entries) != self.rows:
            raise ValueError("row count mismatch")
        if not self.entries:
            self.entries = [[] for _ in range(self.rows)]
        for r in self.entries:
            if len(r) != self.cols:
                raise ValueError("ragged polynomial matrix")
            for f in r:
                if not f.ring.same_as(self.ring):
                    raise ValueError("entry from a different ring")

    @classmethod
    def from_columns(cls, ambient: RingPresentation, columns: Sequence[Sequence[Polynomial]], rows: int) -> PolyMatrix:
        ents = [[columns[j][i] for j in range(len(columns))] for i in range(rows)]
        return cls(ambient, ents, rows, len(columns))

    @classmethod
    def from_vectors(cls, ambient: RingPresentation, vectors: Sequence[Vector], rows: int) -> PolyMatrix:
        cols = [vector_entries(ambient.ring, v, rows) for v in vectors]
        return cls.from_columns(ambient, cols, rows)

    @classmethod
    def identity(cls, ambient: RingPresentation, n: int) -> PolyMatrix:
        r = ambient.ring
        return cls(ambient, [[r.one() if i == j else r.zero() for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def parse(cls, ambient: RingPresentation, rows: Sequence[Sequence[str]]) -> PolyMatrix:
        return cls(ambient, [[ambient.parse(s) for s in r] for r in rows])

    @classmethod
    def from_text(cls, ambient: RingPresentation, text: str) -> PolyMatrix:
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        r, c = (int(x) for x in lines[0].split())
        body = [[s.strip() for s in ln.split("|")] for ln in lines[1:]]
        if len(body) != r or any(len(b) != c for b in body):
            raise ValueError("polynomial matrix text does not match its header")
        return cls.parse(ambient, body)

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        lines += [" | ".join(str(f) for f in row) for row in self.entries]
        return "\n".join(lines) + "\n"

    def column(self, j: int) -> list[Polynomial]:
        return [self.entries[i][j] for i in range(self.rows)]

    def column_vectors(self) -> list[Vector]:
        return [column_vector(self.column(j)) for j in range(self.cols)]

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        z = self.ring.zero()
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = z
                for k in range(self.cols):
                    a = self.entries[i][k]
                    if a.terms:
                        b = other.entries[k][j]
                        if b.terms:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(self.ambient, out, self.rows, other.cols)

    def map_entries(self, fn, ambient: RingPresentation | None = None) -> PolyMatrix:
        amb = ambient or self.ambient
        return PolyMatrix(amb, [[fn(f) for f in row] for row in self.entries], self.rows, self.cols)

    def frobenius(self, n: int) -> PolyMatrix:
        return self.map_entries(lambda f: f.frobenius_power(n))

    def reduce(self, gb: GroebnerBasis | None = None) -> PolyMatrix:
        """Entries in normal form modulo the ambient ideal."""
        gb = gb or ambient_ideal(self.ambient)
        return self.map_entries(gb.reduce_poly)

    def is_zero_mod_ambient(self) -> bool:
        gb = ambient_ideal(self.ambient)
        return all(not gb.reduce_poly(f).terms for row in self.entries for f in row)

    def constant_part(self) -> ScalarMatrix:
        p = self.ring.p
        return ScalarMatrix.from_rows([[f.constant_term() for f in row] for row in self.entries], p, self.cols) \
            if self.rows else ScalarMatrix.zeros(0, self.cols, p)

    def max_degree(self) -> int:
        return max((f.max_degree() for row in self.entries for f in row), default=0)

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.entries == other.entries

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols} over {self.ambient.name or self.ring})"


def ambient_ideal(ambient: RingPresentation) -> GroebnerBasis:
    cache = getattr(ambient, "_ideal_gb_obj", None)
    if cache is None or not cache.ring.same_as(ambient.ring):
        cache = GroebnerBasis(ambient, 1, _ideal_seed(ambient, DEFAULT_CAPS))
        ambient._ideal_gb_obj = cache
    return cache


@dataclass
class ChainComplex:
    """``F_n -> ... -> F_1 -> F_0`` with ``differentials[i-1] = d_i : F_i -> F_{i-1}``.

    When ``period`` is set the complex continues forever with
    ``d_i = d_{i - period}`` beyond the stored differentials.
    """

    ambient: RingPresentation
    differentials: list[PolyMatrix]
    period: int | None = None
    finite: bool = True
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        for a, b in zip(self.differentials, self.differentials[1:]):
            if a.cols != b.rows:
                raise ValueError("consecutive differentials have incompatible shapes")
        if self.period is not None:
            self.finite = False

    @property
    def length(self) -> int:
        return len(self.differentials)

    def d(self, i: int) -> PolyMatrix | None:
        """``d_i`` (None beyond the end of a finite complex)."""
        if i < 1:
            return None
        if i <= len(self.differentials):
            return self.differentials[i - 1]
        if self.period is None:
            return None
        return self.d(i - self.period)

    def rank(self, i: int) -> int:
        if i == 0:
            return self.differentials[0].rows if self.differentials else self.notes.get("rank0", 0)
        di = self.d(i)
        return di.cols if di is not None else 0

    def ranks(self, upto: int | None = None) -> list[int]:
        n = self.length if upto is None else upto
        return [self.rank(i) for i in range(n + 1)]

    def compositions_vanish(self, upto: int | None = None) -> bool:
        n = self.length if upto is None else upto
        for i in range(1, n):
            a, b = self.d(i), self.d(i + 1)
            if a is None or b is None:
                break
            if not (a @ b).is_zero_mod_ambient():
                return False
        return True

    def map(self, fn, ambient: RingPresentation | None = None) -> ChainComplex:
        amb = ambient or self.ambient
        return ChainComplex(amb, [d.map_entries(fn, amb) for d in self.differentials], self.period,
                            self.finite, dict(self.notes))

    def to_json(self) -> dict:
        return {
            "ambient": self.ambient.name,
            "variables": list(self.ambient.names),
            "ranks": self.ranks(),
            "period": self.period,
            "differentials": [[[str(f) for f in row] for row in d.entries] for d in self.differentials],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def frobenius_complex(c: ChainComplex, n: int) -> ChainComplex:
    """Apply the n-th Frobenius functor: raise every entry to the p^n-th power."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return c
    out = c.map(lambda f: f.frobenius_power(n))
    out.notes["frobenius"] = c.notes.get("frobenius", 0) + n
    return out


def base_change(c: ChainComplex, target: RingPresentation,
                images: Mapping[str, Polynomial] | None = None) -> ChainComplex:
    """``c (x) target`` along the map sending each variable to ``images[name]``."""
    src = c.ambient
    tgt_gb = ambient_ideal(target)
    for rel in src.relations:
        if tgt_gb.reduce_poly(rel.map_to(target.ring, images)).terms:
            raise ValueError(f"relation {rel} does not map into the target ideal")
    out = c.map(lambda f: tgt_gb.reduce_poly(f.map_to(target.ring, images)), target)
    return out


# ---------------------------------------------------------------------------
# scalar substitution
# ---------------------------------------------------------------------------

def substitute(m: PolyMatrix, mod: FiniteLengthModule) -> ScalarMatrix:
    """``m (x) mod``: replace each entry by its action, giving a block scalar matrix."""
    dim = mod.dim
    p = mod.p
    rows, cols = m.rows * dim, m.cols * dim
    if dim == 0 or m.rows == 0 or m.cols == 0:
        return ScalarMatrix.zeros(rows, cols, p)
    blocks = {}
    for i in range(m.rows):
        for j in range(m.cols):
            f = m.entries[i][j]
            if f.terms:
                b = mod.evaluate(f)
                if not b.is_zero():
                    blocks[(i, j)] = b
    if p == 2:
        out = [0] * rows
        for (i, j), b in blocks.items():
            sh = j * dim
            base = i * dim
            for r, bits in enumerate(b.row_bits):
                if bits:
                    out[base + r] |= bits << sh
        return ScalarMatrix(2, rows, cols, bits=out)
    grid = [[blocks.get((i, j)) for j in range(m.cols)] for i in range(m.rows)]
    return ScalarMatrix.block(grid, [dim] * m.rows, [dim] * m.cols, p)


def tor_lengths_scalar(mod: FiniteLengthModule, res: ChainComplex, max_i: int) -> list[int]:
    """``dim Tor_i(mod, coker d_1)`` for ``i = 0..max_i`` from a free resolution."""
    if res.period is None and not res.finite and max_i >= res.length:
        raise ValueError(f"resolution truncated at length {res.length}; Tor_{max_i} needs d_{max_i + 1}")
    if mod.dim == 0:
        return [0] * (max_i + 1)
    ranks = {}

    def r(i):
        if i not in ranks:
            di = res.d(i)
            ranks[i] = 0 if di is None else rank(substitute(di, mod))
        return ranks[i]

    return [res.rank(i) * mod.dim - r(i) - r(i + 1) for i in range(max_i + 1)]


def tensor_length(presentation: PolyMatrix, mod: FiniteLengthModule) -> int:
    """``dim (mod (x) coker presentation)``."""
    return presentation.rows * mod.dim - rank(substitute(presentation, mod))


@dataclass
class ScalarComplex:
    """Complex of GF(p) vector spaces, ``maps[i-1] : V_i -> V_{i-1}``."""

    dims: list[int]
    maps: list[ScalarMatrix]

    def homology(self) -> list[int]:
        rk = [rank(m) for m in self.maps]
        out = []
        for i, d in enumerate(self.dims):
            r_in = rk[i] if i < len(rk) else 0
            r_out = rk[i - 1] if i >= 1 else 0
            out.append(d - r_out - r_in)
        return out

    def euler_characteristic(self) -> int:
        return euler_characteristic(self.homology())

    def is_complex(self) -> bool:
        return all((a @ b).is_zero() for a, b in zip(self.maps, self.maps[1:]))


def euler_characteristic(lengths: Sequence[float | int]) -> int:
    """Alternating sum of homology lengths."""
    if any(x == math.inf for x in lengths):
        raise ValueError("homology of infinite length")
    return sum((-1) ** i * int(x) for i, x in enumerate(lengths))


def koszul_matrices(elements: Sequence[Polynomial], ambient: RingPresentation) -> list[PolyMatrix]:
    """Differentials ``d_1..d_r`` of the Koszul complex on ``elements``."""
    r = len(elements)
    ring = ambient.ring
    mats = []
    for k in range(1, r + 1):
        src = list(combinations(range(r), k))
        tgt = list(combinations(range(r), k - 1))
        pos = {s: i for i, s in enumerate(tgt)}
        ent = [[ring.zero() for _ in src] for _ in tgt]
        for j, s in enumerate(src):
            for t, idx in enumerate(s):
                face = s[:t] + s[t + 1:]
                f = elements[idx] if t % 2 == 0 else -elements[idx]
                ent[pos[face]][j] = f
        mats.append(PolyMatrix(ambient, ent, len(tgt), len(src)))
    return mats


def koszul_complex(elements: Sequence[Polynomial], mod: FiniteLengthModule,
                   ambient: RingPresentation | None = None) -> ScalarComplex:
    """The Koszul complex ``K(elements; mod)`` at scalar level."""
    if ambient is None:
        ambient = RingPresentation(elements[0].ring, [])
    mats = koszul_matrices(elements, ambient)
    dims = [math.comb(len(elements), k) * mod.dim for k in range(len(elements) + 1)]
    return ScalarComplex(dims, [substitute(m, mod) for m in mats])


# ---------------------------------------------------------------------------
# presentations and resolutions
# ---------------------------------------------------------------------------

def module_generators(mod: FiniteLengthModule) -> list[list[int]]:
    """Standard basis vectors completing a basis of ``m * mod`` to ``mod``;
    their images form a basis of ``mod / m mod``."""
    img = mod.maximal_ideal_image()
    p = mod.p
    chosen: list[list[int]] = []
    current = img
    r = rank(current)
    for i in range(mod.dim):
        e = [0] * mod.dim
        e[i] = 1
        trial = current.hstack(ScalarMatrix.from_columns([e], mod.dim, p))
        rt = rank(trial)
        if rt > r:
            chosen.append(e)
            current, r = trial, rt
        if r == mod.dim:
            break
    return chosen


def presentation_groebner(mod: FiniteLengthModule, ambient: RingPresentation) -> GroebnerBasis:
    """Reduced Gröbner basis of the relation module of ``mod`` on minimal generators.

    Monomials times generators are enumerated in increasing order and their
    images in ``mod`` row reduced (Buchberger-Möller for modules); a monomial
    whose image depends on earlier standard monomials yields a basis element.
    """
    ring = ambient.ring
    if tuple(ring.names) != mod.names:
        raise ValueError("module variables do not match the ambient ring")
    p = mod.p
    gens = module_generators(mod)
    acts = mod.actions
    vd = ring.var_delta
    dim = mod.dim
    images: dict[int, list[int]] = {}
    std: list[int] = []
    # echelon rows: pivot -> (vector, combination over standard monomials)
    echelon: dict[int, tuple[list[int], dict[int, int]]] = {}
    pivot_order: list[int] = []
    leads: list[int] = []
    relations: list[Vector] = []
    heap = [ring.base(c) for c in range(len(gens))]
    heapq.heapify(heap)
    seen = set(heap)

    def apply(mat: ScalarMatrix, v: list[int]) -> list[int]:
        return mat.apply(v)

    while heap:
        t = heapq.heappop(heap)
        if any(ring.divides(l, t) for l in leads):
            continue
        c = ring.comp(t)
        if t == ring.base(c):
            img = list(gens[c])
        else:
            img = None
            for i in range(ring.n):
                prev = t - vd[i]
                if prev in images and ring.divides(prev, t):
                    img = apply(acts[i], images[prev])
                    break
            if img is None:
                raise RuntimeError("no standard predecessor found")
        vec = list(img)
        comb: dict[int, int] = {}
        for piv in pivot_order:
            a = vec[piv]
            if a:
                row, rc = echelon[piv]
                vec = [(x - a * y) % p for x, y in zip(vec, row)]
                for k, cc in rc.items():
                    nv = (comb.get(k, 0) - a * cc) % p
                    if nv:
                        comb[k] = nv
                    else:
                        comb.pop(k, None)
        nz = next((i for i, x in enumerate(vec) if x), None)
        if nz is None:
            rel = {t: 1}
            for k, cc in comb.items():
                rel[k] = (rel.get(k, 0) + cc) % p
            relations.append({k: c_ for k, c_ in rel.items() if c_})
            leads.append(t)
            continue
        inv = pow(vec[nz], -1, p)
        vec = [(x * inv) % p for x in vec]
        comb = {k: (cc * inv) % p for k, cc in comb.items()}
        comb[t] = (comb.get(t, 0) + inv) % p
        echelon[nz] = (vec, comb)
        pivot_order.append(nz)
        images[t] = img
        std.append(t)
        for i in range(ring.n):
            m = t + vd[i]
            if m not in seen:
                seen.add(m)
                heapq.heappush(heap, m)
    if len(std) != dim:
        raise RuntimeError(f"enumerated {len(std)} standard monomials for a module of dimension {dim}")
    relations.sort(key=lambda v: max(v), reverse=True)
    return GroebnerBasis(ambient, len(gens), relations)


def presentation_of(mod: FiniteLengthModule, ambient: RingPresentation, prune: bool = True,
                    caps: Caps = DEFAULT_CAPS) -> PolyMatrix:
    """Presentation matrix ``d_1`` with ``coker d_1 = mod`` on minimal generators."""
    gb = presentation_groebner(mod, ambient)
    vecs = gb.elements
    if prune:
        vecs = prune_generators(vecs, ambient, gb.rank, caps)
    return PolyMatrix.from_vectors(ambient, vecs, gb.rank)


def _local_order(keys, v: Vector) -> tuple:
    return (min(keys.degree(k) for k in v), max(keys.degree(k) for k in v), max(v))


def prune_generators(vectors: Sequence[Vector], ambient: RingPresentation, rank_: int,
                     caps: Caps = DEFAULT_CAPS, complete: bool = False,
                     shifts: Sequence[int] | None = None) -> list[Vector]:
    """Drop generators lying in the submodule generated by earlier ones.

    Generators are scanned by increasing order of vanishing, then degree.  With
    ``complete`` the membership tests use a full Gröbner basis and, for graded
    input, the survivors are minimal.  Otherwise S-pairs above the largest
    candidate degree are skipped: every dropped vector is still certified
    redundant, but some redundancy may survive (local minimisation of the next
    differential removes it).
    """
    ring = ambient.ring
    frame = ModuleFrame(ring, rank_, shifts=shifts)
    b = _seeded_builder(ambient, frame, rank_, caps)
    cand = sorted((v for v in vectors if v), key=lambda v: _local_order(frame, frame.vec_from_ring(v)))
    if not complete and cand:
        b.drop_above = max(vector_degree(frame, frame.vec_from_ring(v)) for v in cand)
    kept = []
    for v in cand:
        fv = frame.vec_from_ring(v)
        if not b.reduce(fv, full=False):
            continue
        kept.append(v)
        b.add_generator(fv)
        b.run()
    return kept


def _eliminate_units(prev: PolyMatrix | None, cur: PolyMatrix, gb: GroebnerBasis,
                     constants_only: bool = False):
    """Strip summands of ``prev <- cur`` along entries of ``cur`` that are local units.

    For a constant pivot ``c`` at ``(i, j)`` the remaining block becomes the
    Schur complement ``eps - gamma c^-1 delta``; for a non-constant unit ``f``
    it becomes ``f * eps - gamma * delta`` (a unit multiple, so local kernels
    and images are unchanged).  Column ``i`` of ``prev`` is dropped, and the
    map after ``cur`` must lose row ``j`` for every removed column.  With
    ``constants_only`` only nonzero constants are used, which keeps the change
    valid globally.  Constant pivots are always used first.

    Returns ``(new_prev, new_cur, kept_rows, kept_cols)``.
    """
    ring = cur.ring
    p = ring.p
    rows: dict[int, dict[int, Polynomial]] = {}
    colidx: dict[int, set[int]] = {c: set() for c in range(cur.cols)}
    consts: set[tuple[int, int]] = set()
    units: set[tuple[int, int]] = set()

    def note(a, b, f):
        ct = f.constant_term()
        if ct:
            (consts if f.max_degree() == 0 else units).add((a, b))

    for a, row in enumerate(cur.entries):
        rows[a] = {}
        for b, f in enumerate(row):
            if f.terms:
                rows[a][b] = f
                colidx[b].add(a)
                note(a, b, f)

    def pick(pool):
        while pool:
            a, b = pool.pop()
            f = rows.get(a, {}).get(b)
            if f is not None and f.constant_term():
                return a, b
        return None

    while True:
        hit = pick(consts)
        if hit is None and not constants_only:
            hit = pick(units)
        if hit is None:
            break
        i, j = hit
        f = rows[i][j]
        const = f.max_degree() == 0
        gamma = {a: rows[a][j] for a in colidx[j] if a != i}
        delta = {b: g for b, g in rows[i].items() if b != j}
        if not const:
            # scale everything outside row i by f first
            for a, row in rows.items():
                if a == i:
                    continue
                for b in list(row):
                    if b != j:
                        row[b] = gb.reduce_poly(f * row[b])
            inv = 1
        else:
            inv = pow(f.constant_term(), -1, p)
        for a, g in gamma.items():
            row = rows[a]
            ga = g.scale(inv) if inv != 1 else g
            for b, d in delta.items():
                val = row.get(b)
                prod = ga * d
                val = prod if val is None else val - prod
                val = gb.reduce_poly(val) if val.terms else val
                if val.terms:
                    row[b] = val
                    colidx[b].add(a)
                    note(a, b, val)
                elif b in row:
                    del row[b]
                    colidx[b].discard(a)
        for b in rows[i]:
            colidx[b].discard(i)
        del rows[i]
        for a in colidx.pop(j):
            rows[a].pop(j, None)
    kept_rows = sorted(rows)
    kept_cols = sorted(colidx)
    zero = ring.zero()
    ent = [[rows[r].get(c, zero) for c in kept_cols] for r in kept_rows]
    new_cur = PolyMatrix(cur.ambient, ent, len(kept_rows), len(kept_cols))
    new_prev = None
    if prev is not None:
        new_prev = PolyMatrix(prev.ambient, [[prev.entries[r][c] for c in kept_rows] for r in range(prev.rows)],
                              prev.rows, len(kept_rows))
    return new_prev, new_cur, kept_rows, kept_cols


def _drop_rows(m: PolyMatrix, keep: Sequence[int]) -> PolyMatrix:
    return PolyMatrix(m.ambient, [m.entries[r] for r in keep], len(keep), m.cols)


def strip_constant_pivots(diffs: Sequence[PolyMatrix], gb: GroebnerBasis) -> list[PolyMatrix]:
    """Split off every trivial summand ``R --c--> R`` with ``c`` a nonzero constant.

    Works left to right: clearing ``d_k`` only deletes columns of ``d_{k-1}``
    and rows of ``d_{k+1}``, which creates no new constants.  The result is
    homotopy equivalent to the input over the whole ring and has no constant
    entries, so at the origin its ranks are the Betti numbers.
    """
    out = list(diffs)
    for k in range(len(out)):
        prev = out[k - 1] if k else None
        new_prev, new_cur, _, kept_cols = _eliminate_units(prev, out[k], gb, constants_only=True)
        if k:
            out[k - 1] = new_prev
        out[k] = new_cur
        if k + 1 < len(out):
            out[k + 1] = _drop_rows(out[k + 1], kept_cols)
    return out


def minimize_presentation(d1: PolyMatrix) -> PolyMatrix:
    """Remove generator/relation pairs joined by a unit entry of ``d1``."""
    gb = ambient_ideal(d1.ambient)
    t = PolyMatrix(d1.ambient, [list(r) for r in zip(*d1.entries)], d1.cols, d1.rows) if d1.rows and d1.cols else d1
    _, tt, _, _ = _eliminate_units(None, t, gb)
    if not tt.entries:
        return PolyMatrix(d1.ambient, [[] for _ in range(tt.cols)], tt.cols, tt.rows)
    return PolyMatrix(d1.ambient, [list(r) for r in zip(*tt.entries)], tt.cols, tt.rows)


def _specialize(m: PolyMatrix, target: RingPresentation, images: Mapping[str, Polynomial]) -> PolyMatrix:
    gb = ambient_ideal(target)
    return m.map_entries(lambda f: gb.reduce_poly(f.map_to(target.ring, images)) if f.terms else target.ring.zero(),
                         target)


def _constant_rank_and_pivots(m: PolyMatrix) -> tuple[int, list[int]]:
    """Rank of ``m`` at the origin and a maximal set of independent rows there."""
    cm = m.constant_part()
    if not cm.rows or not cm.cols:
        return 0, []
    _, piv = rref(cm.T)
    return len(piv), list(piv)


def _is_koszul_ambient(ambient: RingPresentation) -> bool:
    """Homogeneous relations with a quadratic Gröbner basis (so k has a linear resolution)."""
    if not all(r.is_homogeneous() for r in ambient.relations):
        return False
    if any(w != 1 for w in ambient.ring.weights):
        return False
    gb = ambient_ideal(ambient)
    return all(ambient.ring.degree(k) == 2 for k in gb.leads)


def _is_homogeneous_matrix(m: PolyMatrix) -> bool:
    ring = m.ring
    for j in range(m.cols):
        degs = {ring.degree(k) for f in m.column(j) for k in f.terms}
        if len(degs) > 1:
            return False
    return True


class _Slices:
    """Standard monomials of each degree of a graded ambient ring, with normal forms."""

    def __init__(self, ambient: RingPresentation):
        self.ring = ambient.ring
        self.gb = ambient_ideal(ambient)
        self._std: dict[int, list[int]] = {}
        self._nf: dict[int, dict[int, int]] = {}

    def nf(self, key: int) -> dict[int, int]:
        hit = self._nf.get(key)
        if hit is None:
            hit = self._nf[key] = self.gb.normal_form({key: 1})
        return hit

    def standard(self, deg: int) -> list[int]:
        if deg < 0:
            return []
        hit = self._std.get(deg)
        if hit is None:
            ring = self.ring
            hit = []
            for combo in combinations_with_replacement(range(ring.n), deg):
                e = [0] * ring.n
                for i in combo:
                    e[i] += 1
                k = ring.encode(e)
                if self.nf(k) == {k: 1}:
                    hit.append(k)
            self._std[deg] = hit
        return hit


def graded_kernel(d: PolyMatrix, col_shifts: Sequence[int], top: int,
                  slices: _Slices | None = None) -> list[tuple[Vector, int]]:
    """Minimal homogeneous generators of ``ker d`` of degree at most ``top``.

    ``d`` must be homogeneous, column ``j`` of degree ``col_shifts[j]``.  Each
    degree is handled by linear algebra on the monomial slices of source and
    target; generators are picked as a complement of the part coming from
    the previous degree.  Characteristic 2 only (bit-packed rows).
    """
    ring = d.ring
    if ring.p != 2:
        raise NotImplementedError("graded_kernel works over GF(2)")
    slices = slices or _Slices(d.ambient)
    cols = [[(a, f) for a, f in enumerate(d.column(j)) if f.terms] for j in range(d.cols)]
    out: list[tuple[Vector, int]] = []
    prev_src: list[tuple[int, int]] = []
    prev_ker: list[int] = []
    var_keys = [ring.base(0) + vd for vd in ring.var_delta]
    for D in range(min(col_shifts, default=0), top + 1):
        src = [(j, m) for j in range(d.cols) for m in slices.standard(D - col_shifts[j])]
        n = len(src)
        index = {sm: i for i, sm in enumerate(src)}
        tpos: dict[tuple[int, int], int] = {}
        piv: dict[int, int] = {}
        ker: list[int] = []
        for i, (j, m) in enumerate(src):
            md = ring.monomial_part(m)
            img = 0
            for a, f in cols[j]:
                for k in f.terms:
                    for k2 in slices.nf(k + md):
                        img ^= 1 << tpos.setdefault((a, k2), len(tpos))
            v = (img << n) | (1 << i)
            while v >> n:
                w = piv.get(v.bit_length() - 1)
                if w is None:
                    piv[v.bit_length() - 1] = v
                    break
                v ^= w
            else:
                ker.append(v)
        # the part of ker_D generated by ker_{D-1}
        low: dict[int, int] = {}

        def add(v):
            while v:
                w = low.get(v.bit_length() - 1)
                if w is None:
                    low[v.bit_length() - 1] = v
                    return True
                v ^= w
            return False

        for v in prev_ker:
            for xk in var_keys:
                xd = ring.monomial_part(xk)
                w = 0
                bits = v
                while bits:
                    b = bits.bit_length() - 1
                    bits ^= 1 << b
                    j, m = prev_src[b]
                    for k2 in slices.nf(m + xd):
                        w ^= 1 << index[(j, k2)]
                add(w)
        for v in ker:
            if add(v):
                vec: Vector = {}
                bits = v
                while bits:
                    b = bits.bit_length() - 1
                    bits ^= 1 << b
                    j, m = src[b]
                    vec[ring.with_comp(m, j)] = 1
                out.append((vec, D))
        prev_src, prev_ker = src, ker
    return out


def _compose_vanishes(a: PolyMatrix, b: PolyMatrix) -> bool:
    """Is ``a @ b`` zero modulo the ambient ideal?  (Sparse column-by-column.)"""
    gb = ambient_ideal(a.ambient)
    acols = [[(r, f) for r, f in enumerate(a.column(j)) if f.terms] for j in range(a.cols)]
    zero = a.ring.zero()
    for c in range(b.cols):
        acc: dict[int, Polynomial] = {}
        for j in range(b.rows):
            g = b.entries[j][c]
            if not g.terms:
                continue
            for r, f in acols[j]:
                acc[r] = acc.get(r, zero) + g * f
        if any(gb.reduce_poly(f).terms for f in acc.values()):
            return False
    return True


def _resolve_graded(d1: PolyMatrix, max_length: int, caps: Caps, minimize: bool) -> ChainComplex:
    """Resolution of the cokernel of a homogeneous ``d1`` by iterated kernels,
    minimised with constant pivots only (so every step is valid globally)."""
    ambient = d1.ambient
    ring = ambient.ring
    gb = ambient_ideal(ambient)
    d1 = d1.reduce(gb)
    if minimize:
        d1 = minimize_presentation(d1)
        d1 = PolyMatrix.from_vectors(ambient, prune_generators(d1.column_vectors(), ambient, d1.rows, caps,
                                                               shifts=[0] * d1.rows), d1.rows)
    diffs = [d1]
    row_shifts = [0] * d1.rows
    finite = False
    while len(diffs) <= max_length:
        cur = diffs[-1]
        if cur.cols == 0:
            diffs.pop()
            finite = True
            break
        t0 = time.perf_counter()
        cs = [shifted_degree(ring, v, row_shifts) for v in cur.column_vectors()]
        gens = module_kernel(cur.column_vectors(), cur.rows, ambient, caps, shifts=row_shifts)
        n_raw = len(gens)
        if minimize:
            gens = prune_generators(gens, ambient, cur.cols, caps, shifts=cs)
        if not gens:
            finite = True
            break
        nxt = PolyMatrix.from_vectors(ambient, gens, cur.cols)
        if minimize:
            new_prev, nxt, kept_rows, _ = _eliminate_units(cur, nxt, gb, constants_only=True)
            diffs[-1] = new_prev
            cs = [cs[i] for i in kept_rows]
        log.debug("step %d: %d kernel generators, %d kept, rank %d (%.1fs)",
                  len(diffs) + 1, n_raw, len(gens), nxt.cols, time.perf_counter() - t0)
        row_shifts = cs
        if nxt.cols == 0:
            finite = True
            break
        diffs.append(nxt)
    if len(diffs) > max_length:
        diffs = diffs[:max_length]
        finite = False
    cx = ChainComplex(ambient, diffs)
    cx.finite = finite
    cx.notes.update(finite=finite, method="graded")
    return cx


def _fresh_name(names: Sequence[str], base: str = "h") -> str:
    name, i = base, 0
    while name in names:
        i += 1
        name = f"{base}{i}"
    return name


def _resolve_homogenized(d1: PolyMatrix, max_length: int, caps: Caps) -> ChainComplex:
    """Resolution of ``coker d1`` for inhomogeneous ``d1`` via a graded deformation.

    A degree-compatible Gröbner basis of the relation module is homogenised
    with a new variable ``h``; the graded module ``C`` it presents has no
    ``h``-torsion, ``C/(h-1) = coker d1`` and ``C/hC`` is the module of top
    degree forms.  The minimal graded resolution of ``C`` is computed slice by
    slice: when the ambient ring is Koszul and ``C/hC`` has finite length,
    generators of the i-th syzygies lie in degrees ``i .. i + s`` (``s`` the top
    degree of ``C/hC``), which bounds every kernel.  Setting ``h = 1`` gives an
    exact but usually non-minimal complex; ranks at the origin give the local
    Betti numbers, and once one of them vanishes the complex is cut off: the
    last module keeps only the columns not matched with a unit pivot of the
    next differential, which leaves an injective map.
    """
    ambient = d1.ambient
    ring = ambient.ring
    gb = buchberger(d1.column_vectors(), ambient, d1.rows, caps)
    rows = d1.rows
    hname = _fresh_name(ring.names)
    hring = PolyRing(ring.names + (hname,), ring.p)
    hamb = RingPresentation(hring, [f.map_to(hring) for f in ambient.relations], name=f"{ambient.name}[{hname}]")

    tops: list[Vector] = []
    hcols: list[Vector] = []
    for v in gb.elements:
        D = vector_degree(ring, v)
        tops.append({k: c for k, c in v.items() if ring.degree(k) == D})
        hv: Vector = {}
        for k, c in v.items():
            e = list(ring.exps(k)) + [D - ring.degree(k)]
            hv[hring.encode(e, ring.comp(k))] = c
        hcols.append(hv)
    std = buchberger(tops, ambient, rows, caps).standard_monomials()
    bound = None
    if std.finite and _is_koszul_ambient(ambient):
        bound = max((ring.degree(k) for k in std.keys), default=0)
    graded = [PolyMatrix.from_vectors(hamb, hcols, rows)]
    col_shifts = [vector_degree(hring, v) for v in hcols]
    slices = _Slices(hamb) if ring.p == 2 else None
    images = {hname: ring.one()}
    spec = [_specialize(graded[0], ambient, images)]
    cranks = [_constant_rank_and_pivots(spec[0])]
    betti: list[int] = []
    length = None
    i = 1
    while True:
        # have d_1 .. d_i; compute d_{i+1} = generators of ker d_i
        t0 = time.perf_counter()
        cur = graded[-1]
        if cur.cols == 0:
            nxt_vecs: list[tuple[Vector, int]] = []
        elif bound is not None and slices is not None:
            nxt_vecs = graded_kernel(cur, col_shifts, i + 1 + bound, slices)
        else:
            row_shifts = graded_shifts[-1] if len(graded) > 1 else [0] * cur.rows
            ker = module_kernel(cur.column_vectors(), cur.rows, hamb, caps, shifts=row_shifts,
                                max_sugar=None if bound is None else i + 1 + bound)
            ker = prune_generators(ker, hamb, cur.cols, caps, shifts=col_shifts)
            nxt_vecs = [(v, shifted_degree(hring, v, col_shifts)) for v in ker]
        nxt = PolyMatrix.from_vectors(hamb, [v for v, _ in nxt_vecs], cur.cols)
        graded_shifts = [col_shifts]
        col_shifts = [dg for _, dg in nxt_vecs]
        graded.append(nxt)
        spec.append(_specialize(nxt, ambient, images))
        cranks.append(_constant_rank_and_pivots(spec[-1]))
        # local Betti number of F_i
        b = spec[i - 1].cols - cranks[i - 1][0] - cranks[i][0]
        betti.append(b)
        log.debug("graded step %d: %d generators, rank at origin %d, betti_%d = %d (%.1fs)",
                  i + 1, nxt.cols, cranks[i][0], i, b, time.perf_counter() - t0)
        if b == 0:
            length = i - 1
            break
        if i >= max_length + 1:
            break
        i += 1
    betti = [rows - cranks[0][0]] + betti
    if length is None:
        diffs = spec[:max_length]
        finite = False
    else:
        diffs = spec[:length]
        if length:
            drop = set(cranks[length][1])
            keep = [j for j in range(diffs[-1].cols) if j not in drop]
            last = diffs[-1]
            diffs[-1] = PolyMatrix(ambient, [[row[j] for j in keep] for row in last.entries], last.rows, len(keep))
        finite = True
    diffs = strip_constant_pivots(diffs, ambient_ideal(ambient))
    cx = ChainComplex(ambient, diffs)
    cx.finite = finite
    cx.notes.update(finite=finite, method="homogenized", local_betti=betti[: len(diffs) + 1],
                    graded_ranks=[graded[0].rows] + [g.cols for g in graded])
    if not diffs:
        cx.notes["rank0"] = rows
    return cx


def free_resolution(d1: PolyMatrix, max_length: int, caps: Caps = DEFAULT_CAPS,
                    minimize: bool = True) -> ChainComplex:
    """Free resolution of ``coker d1``.

    Homogeneous input is resolved directly by iterated kernels; otherwise the
    graded deformation of :func:`_resolve_homogenized` is used.  Stops when the
    resolution is known to end (``notes['finite'] = True``, the length is the
    local projective dimension) or after ``max_length`` differentials
    (``notes['finite'] = False``).
    """
    if _is_homogeneous_matrix(d1):
        return _resolve_graded(d1, max_length, caps, minimize)
    return _resolve_homogenized(d1, max_length, caps)


def coker_groebner(d: PolyMatrix, caps: Caps = DEFAULT_CAPS) -> GroebnerBasis:
    return buchberger(d.column_vectors(), d.ambient, d.rows, caps)


def coker_length(d: PolyMatrix, caps: Caps = DEFAULT_CAPS):
    """Length of ``coker d`` over the ambient ring (``inf`` if not finite)."""
    return coker_groebner(d, caps).quotient_length()


def betti_numbers(res: ChainComplex, upto: int | None = None) -> list[int]:
    """``dim Tor_i(coker d_1, k)`` computed from the constant parts of ``res``."""
    k = FiniteLengthModule.residue_field(res.ambient.names, res.ambient.p)
    n = res.length if upto is None else upto
    return tor_lengths_scalar(k, res, n)


def cokernel_module(d: PolyMatrix, caps: Caps = DEFAULT_CAPS) -> FiniteLengthModule:
    """``coker d`` as a finite-length module (its Gröbner standard basis with actions)."""
    gb = coker_groebner(d, caps)
    if not gb.standard_monomials().finite:
        raise ValueError("cokernel is not of finite length")
    return FiniteLengthModule.from_groebner(gb)


def homology_vanishes(c: ChainComplex, i: int, caps: Caps = DEFAULT_CAPS) -> bool:
    """Whether ``H_i(c) = 0`` for ``i >= 1``: every kernel generator of ``d_i`` lies in ``im d_{i+1}``."""
    if i < 1:
        raise ValueError("only positive degrees")
    di = c.d(i)
    if di is None:
        return True
    ker = module_kernel(di.column_vectors(), di.rows, c.ambient, caps)
    nxt = c.d(i + 1)
    if not ker:
        return True
    if nxt is None:
        return False
    im = buchberger(nxt.column_vectors(), c.ambient, di.cols, caps)
    return all(not im.normal_form(v) for v in ker)
