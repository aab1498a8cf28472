"""Buchberger's algorithm for submodules of free modules over a quotient ring.

Vectors are plain ``dict``s mapping packed term keys (see :mod:`polyring`) to
residues.  The order on free modules is position over term with the lowest
component index largest, so a basis of ``F_target (+) F_source`` eliminates the
target block first; kernels fall out as the basis elements that lead in the
source block.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .exactlin import ScalarMatrix, kernel_basis, rank
from .polyring import ModuleFrame, MonomialOrder, Polynomial, PolyRing, RingPresentation

INFINITE = math.inf

Vector = dict


class ResourceCapExceeded(RuntimeError):
    """A Gröbner computation hit its configured degree or size cap."""


@dataclass(frozen=True)
class Caps:
    max_degree: int = 64
    max_basis: int = 1 << 20


DEFAULT_CAPS = Caps()


# ---------------------------------------------------------------------------
# vector helpers
# ---------------------------------------------------------------------------

def poly_to_vector(f: Polynomial, comp: int = 0) -> Vector:
    if comp == 0:
        return dict(f.terms)
    r = f.ring
    shift = r.base(comp) - r.base(0)
    return {k + shift: c for k, c in f.terms.items()}


def column_vector(entries: Sequence[Polynomial], offset: int = 0) -> Vector:
    v: Vector = {}
    for i, f in enumerate(entries):
        if f.terms:
            v.update(poly_to_vector(f, offset + i))
    return v


def vector_entries(ring: PolyRing, v: Vector, rank_: int) -> list[Polynomial]:
    parts: list[dict] = [{} for _ in range(rank_)]
    for k, c in v.items():
        comp = ring.comp(k)
        parts[comp][ring.with_comp(k, 0)] = c
    return [Polynomial(ring, d) for d in parts]


def shift_comp(ring: PolyRing, v: Vector, by: int) -> Vector:
    """Move every component index by ``by`` (positive moves to higher indices)."""
    d = -(by << ring.top)
    return {k + d: c for k, c in v.items()}


def vector_degree(ring: PolyRing, v: Vector) -> int:
    return max((ring.degree(k) for k in v), default=0)


def add_scaled(v: Vector, w: Vector, c: int, p: int, shift: int = 0) -> None:
    """In place ``v += c * (monomial with delta shift) * w``."""
    for k, a in w.items():
        kk = k + shift
        nv = (v.get(kk, 0) + c * a) % p
        if nv:
            v[kk] = nv
        else:
            v.pop(kk, None)


# ---------------------------------------------------------------------------
# the engine
# ---------------------------------------------------------------------------

class _Builder:
    """Incremental Buchberger state (Gebauer-Möller pair management, sugar order)."""

    def __init__(self, ring: PolyRing | ModuleFrame, rank_: int, caps: Caps = DEFAULT_CAPS,
                 module: bool | None = None):
        self.ring = ring
        self.p = ring.p
        self.rank = rank_
        self.caps = caps
        self.module = rank_ > 1 if module is None else module
        self.lts: list[int] = []
        self.vecs: list[Vector] = []
        self.sugar: list[int] = []
        self.minimal: list[bool] = []
        self.reducers: dict[int, list[tuple[int, int, Vector]]] = {}
        self.pairs: list[tuple[int, int, int, int]] = []
        self.pending: list[tuple[int, int, int, Vector]] = []
        self._counter = 0
        # keys below ``floor`` are never reduced; vectors whose leading term
        # falls below it are collected in ``low`` instead of entering the basis
        self.floor: int | None = None
        self.low: list[Vector] = []
        # pairs of higher sugar are dropped (the basis is then only partial)
        self.drop_above: int | None = None

    # -- reduction ------------------------------------------------------------
    def _find_reducer(self, t: int):
        lst = self.reducers.get(self.ring.bucket(t))
        if not lst:
            return None
        tr = t & self.ring.rev_mask
        guard = self.ring.guard
        for lrev, lt, vec in lst:
            if (lrev - tr) & guard == 0:
                return lt, vec
        return None

    def reduce(self, v: Vector, full: bool = True) -> Vector:
        p = self.p
        v = dict(v)
        rem: Vector = {}
        find = self._find_reducer
        # max-heap of candidate leading terms; stale entries are skipped.
        # Reducing at t only creates terms below t, so each key is handled once.
        heap = [-k for k in v]
        heapq.heapify(heap)
        push, pop = heapq.heappush, heapq.heappop
        floor = self.floor
        while heap:
            t = -pop(heap)
            if t not in v:
                continue
            if floor is not None and t < floor:
                rem.update(v)
                return rem
            hit = find(t)
            if hit is None:
                if not full:
                    rem.update(v)
                    return rem
                rem[t] = v.pop(t)
                continue
            glt, g = hit
            d = t - glt
            if p == 2:
                for k in g:
                    kk = k + d
                    if kk in v:
                        del v[kk]
                    else:
                        v[kk] = 1
                        push(heap, -kk)
            else:
                c = v[t]
                for k, a in g.items():
                    kk = k + d
                    old = v.get(kk)
                    nv = ((old or 0) - c * a) % p
                    if nv:
                        v[kk] = nv
                        if old is None:
                            push(heap, -kk)
                    elif old is not None:
                        del v[kk]
        return rem

    # -- basis maintenance ----------------------------------------------------
    def _monic(self, v: Vector) -> tuple[int, Vector]:
        lt = max(v)
        c = v[lt]
        if c != 1:
            inv = pow(c, -1, self.p)
            v = {k: (a * inv) % self.p for k, a in v.items()}
        return lt, v

    def _insert(self, lt: int, v: Vector, sugar: int) -> int:
        idx = len(self.lts)
        if idx >= self.caps.max_basis:
            raise ResourceCapExceeded(f"basis size exceeded {self.caps.max_basis}")
        self.lts.append(lt)
        self.vecs.append(v)
        self.sugar.append(sugar)
        self.minimal.append(True)
        return idx

    def _rebuild_reducers(self, comp_key: int):
        lst = [(self.lts[i] & self.ring.rev_mask, self.lts[i], self.vecs[i])
               for i in range(len(self.lts)) if self.minimal[i] and self.ring.bucket(self.lts[i]) == comp_key]
        lst.sort(key=lambda x: x[1])
        self.reducers[comp_key] = lst

    def seed(self, vecs: Iterable[Vector]):
        """Add elements known to form a Gröbner basis among themselves (no pairs)."""
        touched = set()
        for v in vecs:
            if not v:
                continue
            lt, v = self._monic(v)
            self._insert(lt, v, vector_degree(self.ring, v))
            touched.add(self.ring.bucket(lt))
        for ck in touched:
            self._rebuild_reducers(ck)

    def add_generator(self, v: Vector):
        if not v:
            return
        self._counter += 1
        heapq.heappush(self.pending, (vector_degree(self.ring, v), 0, self._counter, v))

    def _update(self, h: int):
        ring = self.ring
        lth = self.lts[h]
        ck = ring.bucket(lth)
        others = [i for i in range(h) if self.minimal[i] and ring.bucket(self.lts[i]) == ck]
        lcms = {i: ring.lcm(lth, self.lts[i]) for i in others}
        module = self.module
        coprime = {i: (not module) and ring.coprime(lth, self.lts[i]) for i in others}
        # chain criterion among the new pairs
        C = list(others)
        D: list[int] = []
        while C:
            i = C.pop()
            if coprime[i]:
                D.append(i)
                continue
            li = lcms[i]
            if any(ring.divides(lcms[j], li) for j in C) or any(ring.divides(lcms[j], li) for j in D):
                continue
            D.append(i)
        new_pairs = [i for i in D if not coprime[i]]
        # prune old pairs (Gebauer-Möller B_{ijk})
        kept = []
        for entry in self.pairs:
            s, lcm_, a, b = entry
            if ring.bucket(lcm_) == ck and ring.divides(lth, lcm_):
                la = ring.lcm(self.lts[a], lth)
                lb = ring.lcm(self.lts[b], lth)
                if la != lcm_ and lb != lcm_:
                    continue
            kept.append(entry)
        if len(kept) != len(self.pairs):
            heapq.heapify(kept)
        self.pairs = kept
        sug_h = self.sugar[h]
        drop = self.drop_above
        for i in new_pairs:
            L = lcms[i]
            dL = ring.degree(L)
            s = max(sug_h + dL - ring.degree(lth), self.sugar[i] + dL - ring.degree(self.lts[i]))
            if drop is None or s <= drop:
                heapq.heappush(self.pairs, (s, L, i, h))
        # drop elements made redundant by h
        for i in others:
            if ring.divides(lth, self.lts[i]):
                self.minimal[i] = False
        self._rebuild_reducers(ck)

    def _spoly(self, i: int, j: int, L: int) -> Vector:
        p = self.p
        v: Vector = {}
        di = L - self.lts[i]
        dj = L - self.lts[j]
        for k, a in self.vecs[i].items():
            v[k + di] = a
        add_scaled(v, self.vecs[j], p - 1, p, dj)
        return v

    def run(self):
        caps = self.caps
        while self.pairs or self.pending:
            take_pending = bool(self.pending) and (not self.pairs or self.pending[0][0] <= self.pairs[0][0])
            if take_pending:
                sugar, _, _, v = heapq.heappop(self.pending)
            else:
                sugar, L, i, j = heapq.heappop(self.pairs)
                v = self._spoly(i, j, L)
            if sugar > caps.max_degree:
                raise ResourceCapExceeded(f"degree cap {caps.max_degree} exceeded (sugar {sugar})")
            # top reduction only: inhomogeneous tails fill up densely otherwise
            v = self.reduce(v, full=False)
            if not v:
                continue
            lt, v = self._monic(v)
            if self.floor is not None and lt < self.floor:
                self.low.append(v)
                continue
            h = self._insert(lt, v, max(sugar, 0))
            self._update(h)

    def reduced_basis(self) -> list[Vector]:
        idx = [i for i in range(len(self.lts)) if self.minimal[i]]
        idx.sort(key=lambda i: self.lts[i])
        out = []
        for i in idx:
            lt = self.lts[i]
            tail = dict(self.vecs[i])
            tail.pop(lt)
            red = self.reduce(tail)
            red[lt] = 1
            out.append(red)
        out.sort(key=lambda v: max(v), reverse=True)
        return out


# ---------------------------------------------------------------------------
# public types
# ---------------------------------------------------------------------------

@dataclass
class StandardMonomialSet:
    """Monomials (term keys) outside the leading-term module, per component."""

    finite: bool
    keys: list[int] = field(default_factory=list)

    def __len__(self):
        return len(self.keys)


class GroebnerBasis:
    """Reduced Gröbner basis of ``submodule + ambient relations * F`` in ``F = R^rank``.

    The basis is stored in the key layout of ``frame`` (the ring's own position
    over term layout by default); every public method takes and returns
    vectors in ordinary ring keys.
    """

    def __init__(self, ambient: RingPresentation, rank_: int, elements: list[Vector],
                 frame: ModuleFrame | None = None, native: bool = False):
        self.ambient = ambient
        self.ring = ambient.ring
        self.rank = rank_
        self.order = self.ring.order
        self.frame = frame
        keys = frame or self.ring
        self._keys = keys
        if native or frame is None:
            self._native = elements
        else:
            self._native = [frame.vec_from_ring(v) for v in elements]
        self._red = _Builder(keys, rank_)
        self._red.seed(self._native)
        self._std: StandardMonomialSet | None = None
        self._elements: list[Vector] | None = None

    def _in(self, v: Vector) -> Vector:
        return v if self.frame is None else self.frame.vec_from_ring(v)

    def _out(self, v: Vector) -> Vector:
        return v if self.frame is None else self.frame.vec_to_ring(v)

    @property
    def elements(self) -> list[Vector]:
        if self._elements is None:
            self._elements = [self._out(v) for v in self._native]
        return self._elements

    @property
    def leads(self) -> list[int]:
        """Leading terms (ring keys) in the basis order."""
        return [self._out({max(v): 1}).popitem()[0] for v in self._native]

    def __len__(self):
        return len(self._native)

    def normal_form(self, v: Vector) -> Vector:
        return self._out(self._red.reduce(self._in(v)))

    def reduce_poly(self, f: Polynomial) -> Polynomial:
        return Polynomial(self.ring, self.normal_form(dict(f.terms)))

    def contains(self, v: Vector) -> bool:
        return not self._red.reduce(self._in(v), full=False)

    def is_unit(self) -> bool:
        """Every component contains the basis vector itself."""
        keys = self._keys
        lts = {max(v) for v in self._native}
        return all(keys.base(c) in lts for c in range(self.rank))

    def leads_by_comp(self) -> dict[int, list[tuple[int, ...]]]:
        out: dict[int, list[tuple[int, ...]]] = {c: [] for c in range(self.rank)}
        for v in self._native:
            c, e = self._keys.decode(max(v))
            out[c].append(e)
        return out

    def polynomials(self) -> list[Polynomial]:
        if self.rank != 1:
            raise TypeError("not an ideal")
        return [Polynomial(self.ring, v) for v in self.elements]

    def entries(self, v: Vector) -> list[Polynomial]:
        return vector_entries(self.ring, v, self.rank)

    # -- standard monomials -----------------------------------------------------
    def standard_monomials(self, limit: int | None = None) -> StandardMonomialSet:
        if self._std is not None:
            return self._std
        keys = self._keys
        n = keys.n
        leads = self.leads_by_comp()
        for c in range(self.rank):
            pure = set()
            for e in leads[c]:
                nz = [i for i, x in enumerate(e) if x]
                if len(nz) == 1:
                    pure.add(nz[0])
                elif not nz:
                    pure = set(range(n))
                    break
            if len(pure) < n:
                self._std = StandardMonomialSet(False)
                return self._std
        red = self._red
        out: list[int] = []
        vd = keys.var_delta
        for c in range(self.rank):
            start = keys.base(c)
            if red._find_reducer(start) is not None:
                continue
            seen = {start}
            frontier = [start]
            while frontier:
                nxt = []
                for t in frontier:
                    out.append(t)
                    for i in range(n):
                        m = t + vd[i]
                        if m in seen:
                            continue
                        seen.add(m)
                        if red._find_reducer(m) is None:
                            nxt.append(m)
                if limit is not None and len(out) > limit:
                    raise ResourceCapExceeded(f"more than {limit} standard monomials")
                frontier = nxt
        if self.frame is not None:
            out = [self.frame.to_ring(k) for k in out]
        out.sort(reverse=True)
        self._std = StandardMonomialSet(True, out)
        return self._std

    def quotient_length(self) -> float | int:
        std = self.standard_monomials()
        return len(std.keys) if std.finite else INFINITE

    def multiplication_matrices(self) -> tuple[list[int], list[ScalarMatrix]]:
        """Basis of the (finite) quotient and the action matrix of each variable."""
        std = self.standard_monomials()
        if not std.finite:
            raise ValueError("quotient has infinite length")
        basis = std.keys
        pos = {k: i for i, k in enumerate(basis)}
        dim = len(basis)
        p = self.ring.p
        mats = []
        for d in self.ring.var_delta:
            cols = []
            for t in basis:
                nf = self.normal_form({t + d: 1})
                col = [0] * dim
                for k, c in nf.items():
                    col[pos[k]] = c
                cols.append(col)
            mats.append(ScalarMatrix.from_columns(cols, dim, p) if dim else ScalarMatrix.zeros(0, 0, p))
        return basis, mats

    def __eq__(self, other):
        if not isinstance(other, GroebnerBasis):
            return NotImplemented
        return (self.rank == other.rank and self.ring.same_as(other.ring)
                and sorted(map(sorted, map(dict.items, self.elements)))
                == sorted(map(sorted, map(dict.items, other.elements))))

    def __repr__(self):
        return f"GroebnerBasis(rank={self.rank}, {len(self)} elements over {self.ambient.name or self.ring})"


def _ideal_seed(ambient: RingPresentation, caps: Caps) -> list[Vector]:
    """Reduced basis of the ambient defining ideal (cached on the presentation)."""
    cache = getattr(ambient, "_ideal_gb_cache", None)
    if cache is None:
        cache = {}
        ambient._ideal_gb_cache = cache
    key = ambient.ring.order
    if key not in cache:
        b = _Builder(ambient.ring, 1, caps, module=False)
        for r in ambient.relations:
            b.add_generator(dict(r.terms))
        b.run()
        cache[key] = b.reduced_basis()
    return cache[key]


def _seeded_builder(ambient: RingPresentation, keys: PolyRing | ModuleFrame, rank_: int,
                    caps: Caps) -> _Builder:
    """Engine over ``keys`` with the ambient ideal placed in every component."""
    b = _Builder(keys, rank_, caps)
    seed = _ideal_seed(ambient, caps)
    for c in range(rank_):
        if isinstance(keys, ModuleFrame):
            b.seed({keys.from_ring(k, c): a for k, a in v.items()} for v in seed)
        else:
            b.seed(shift_comp(ambient.ring, v, c) for v in seed)
    return b


def module_frame(ring: PolyRing, rank_: int, order: str = "top",
                 shifts: Sequence[int] | None = None) -> ModuleFrame | None:
    """Key layout for ``ring^rank``: ``"pot"`` (None, the ring's own keys) or
    ``"top"`` (degree, then position)."""
    if order == "pot":
        return None
    if order != "top":
        raise ValueError(f"unknown module order {order!r}")
    return ModuleFrame(ring, rank_, shifts=shifts)


def buchberger(gens: Iterable[Vector | Polynomial], ambient: RingPresentation, rank_: int = 1,
               caps: Caps = DEFAULT_CAPS, order: str = "top") -> GroebnerBasis:
    """Reduced basis of the submodule of ``ambient^rank`` generated by ``gens``.

    The ambient defining ideal is adjoined in every component, so the result
    describes a submodule of a free module over the quotient ring.
    """
    ring = ambient.ring
    frame = module_frame(ring, rank_, order) if rank_ > 1 else None
    keys = frame or ring
    b = _seeded_builder(ambient, keys, rank_, caps)
    for g in gens:
        v = dict(g.terms) if isinstance(g, Polynomial) else g
        if v:
            if any(not 0 <= ring.comp(k) < rank_ for k in v):
                raise ValueError("generator component outside the free module")
            b.add_generator(frame.vec_from_ring(v) if frame else v)
    b.run()
    return GroebnerBasis(ambient, rank_, b.reduced_basis(), frame, native=True)


def ideal(gens: Iterable[Polynomial], ambient: RingPresentation, caps: Caps = DEFAULT_CAPS) -> GroebnerBasis:
    return buchberger([dict(g.terms) for g in gens], ambient, 1, caps)


def quotient_length(gb: GroebnerBasis) -> float | int:
    return gb.quotient_length()


def socle_dimension(gb: GroebnerBasis) -> int:
    """Dimension of the socle of the finite-length quotient ``F / gb``."""
    return socle_data(gb)[1]


def socle_data(gb: GroebnerBasis) -> tuple[list[Vector], int]:
    basis, mats = gb.multiplication_matrices()
    if not basis:
        return [], 0
    stacked = mats[0]
    for m in mats[1:]:
        stacked = stacked.vstack(m)
    ker = kernel_basis(stacked)
    vecs = [{basis[i]: c for i, c in enumerate(v) if c} for v in ker]
    return vecs, len(ker)


def shifted_degree(ring: PolyRing, v: Vector, shifts: Sequence[int] | None = None) -> int:
    """Largest degree of a term of ``v`` counting ``deg e_c = shifts[c]``."""
    if not shifts:
        return vector_degree(ring, v)
    return max((ring.degree(k) + shifts[ring.comp(k)] for k in v), default=0)


def module_kernel(columns: Sequence[Vector], target_rank: int, ambient: RingPresentation,
                  caps: Caps = DEFAULT_CAPS, shifts: Sequence[int] | None = None,
                  max_sugar: int | None = None) -> list[Vector]:
    """Generators of the kernel of ``ambient^s -> ambient^t`` (j-th column ``columns[j]``).

    Each column is tagged with its own basis vector of ``ambient^s`` and the
    tagged vectors are run through Buchberger in a frame where every target
    term outranks every source term, terms within a block comparing by degree
    first (source components shifted by the degree of their column).  Only
    pairs with target leading terms are formed: this completes a Gröbner basis
    of the image, and by the lifting of S-pair syzygies the remainders that
    land in the source block generate the kernel modulo the ambient ideal.
    The generators are not reduced and may be redundant.  With ``max_sugar``
    pairs of higher sugar are skipped and only part of the kernel is found.
    """
    ring = ambient.ring
    s = len(columns)
    t = target_rank
    tshift = list(shifts) if shifts else [0] * t
    sshift = [shifted_degree(ring, c, tshift) for c in columns]
    frame = ModuleFrame(ring, t + s, [1] * t + [0] * s, tshift + sshift)
    b = _seeded_builder(ambient, frame, t, caps)
    b.rank = t + s
    # coprime leading terms still carry a (Koszul) syzygy in the tags
    b.module = True
    b.drop_above = max_sugar
    b.floor = 1 << frame.block_pos
    for j, col in enumerate(columns):
        v = frame.vec_from_ring(col)
        tag = frame.base(t + j)
        v[tag] = (v.get(tag, 0) + 1) % ring.p
        b.add_generator(v)
    b.run()
    gb_zero = ideal([], ambient, caps)
    out = []
    for v in b.low:
        w = frame.vec_to_ring(v, -t)
        parts = vector_entries(ring, w, s)
        red = [gb_zero.reduce_poly(f) for f in parts]
        if any(f.terms for f in red):
            out.append(column_vector(red))
    return out


def module_kernel_basis(columns: Sequence[Vector], target_rank: int, ambient: RingPresentation,
                        caps: Caps = DEFAULT_CAPS, order: str = "top") -> GroebnerBasis:
    """Gröbner basis of the kernel module (generators from :func:`module_kernel`)."""
    return buchberger(module_kernel(columns, target_rank, ambient, caps), ambient, len(columns), caps, order)


def relation_free(gb: GroebnerBasis, ambient: RingPresentation | None = None) -> list[Vector]:
    """Elements of ``gb`` that are not already zero modulo the ambient relations."""
    ambient = ambient or gb.ambient
    zero = buchberger([], ambient, gb.rank)
    return [v for v in gb.elements if zero.normal_form(v)]


def is_regular_element(gb: GroebnerBasis, f: Polynomial, caps: Caps = DEFAULT_CAPS) -> bool:
    """Is multiplication by ``f`` injective on ``ambient / J`` (``J`` = ideal of ``gb``)?

    Decided by computing the colon ``(J : f)`` as the kernel of ``f`` acting on
    ``ambient / J`` and testing it against ``J``.
    """
    if gb.rank != 1:
        raise TypeError("is_regular_element expects an ideal")
    if not gb.normal_form(dict(f.terms)):
        raise ValueError("f lies in J; regularity is undefined")
    quotient = gb.ambient.with_relations(gb.polynomials())
    colon = module_kernel([dict(f.terms)], 1, quotient, caps)
    return all(not gb.normal_form(v) for v in colon)


def colon_ideal(gb: GroebnerBasis, f: Polynomial, caps: Caps = DEFAULT_CAPS) -> GroebnerBasis:
    quotient = gb.ambient.with_relations(gb.polynomials())
    colon = module_kernel([dict(f.terms)], 1, quotient, caps)
    return buchberger(colon, gb.ambient, 1, caps)


def is_regular_sequence(elements: Sequence[Polynomial], ambient: RingPresentation,
                        caps: Caps = DEFAULT_CAPS) -> bool:
    """Each element regular modulo its predecessors, and the final quotient nonzero."""
    done: list[Polynomial] = []
    for f in elements:
        gb = ideal(done, ambient, caps)
        if gb.is_unit():
            return False
        if not gb.normal_form(dict(f.terms)):
            return False
        if not is_regular_element(gb, f, caps):
            return False
        done.append(f)
    return not ideal(done, ambient, caps).is_unit()


def krull_dimension(gb: GroebnerBasis) -> int:
    """Dimension of ``ambient / J`` from the leading-term ideal: the size of a
    largest variable set containing the support of no leading monomial.
    The unit ideal has dimension -1."""
    if gb.rank != 1:
        raise TypeError("krull_dimension expects an ideal")
    n = gb.ring.n
    supports = []
    for lt in gb.leads:
        e = gb.ring.exps(lt)
        supports.append(sum(1 << i for i, x in enumerate(e) if x))
    if 0 in supports:
        return -1
    best = 0
    for mask in range(1 << n):
        size = bin(mask).count("1")
        if size <= best:
            continue
        if all(s & ~mask for s in supports):
            best = size
    return best


def subring_module_relations(elements: Sequence[Polynomial], ambient: RingPresentation,
                             keep: Sequence[str], caps: Caps = DEFAULT_CAPS) -> tuple[PolyRing, list[list[Polynomial]]]:
    """Relations over ``K[keep]`` among elements that are 1 or single eliminated variables.

    ``elements`` must be ``1`` followed by distinct variables outside ``keep``.
    Returns the subring and a list of coefficient vectors ``(g_0, ..., g_k)``
    with ``sum g_j * elements[j]`` in the ambient ideal; these generate all such
    relations.  Uses an elimination order ranking the degree in the
    non-kept variables first.
    """
    ring = ambient.ring
    keep = list(keep)
    elim_names = [nm for nm in ring.names if nm not in keep]
    elim = tuple(1 if nm in elim_names else 0 for nm in ring.names)
    order = MonomialOrder(ring.weights, elim)
    eamb = ambient.with_order(order)
    ering = eamb.ring
    gb = ideal([], eamb, caps)
    slot: dict[int, int] = {}
    for j, e in enumerate(elements):
        e = e.map_to(ering)
        if len(e.terms) != 1:
            raise ValueError("elements must be monomials")
        ((k, _),) = e.terms.items()
        if ering.elim_weights and sum(w * x for w, x in zip(ering.elim_weights, ering.exps(k))) > 1:
            raise ValueError("elements must have elimination degree <= 1")
        slot[tuple(x for x, nm in zip(ering.exps(k), ering.names) if nm in elim_names)] = j
    sub = PolyRing(keep, ring.p, MonomialOrder(tuple(ring.weights[ring.index[nm]] for nm in keep)))
    kidx = [ering.index[nm] for nm in keep]
    eidx = [ering.index[nm] for nm in elim_names]

    def split(v: Vector) -> list[Polynomial] | None:
        parts: list[dict] = [{} for _ in elements]
        for k, c in v.items():
            e = ering.exps(k)
            key = tuple(e[i] for i in eidx)
            if key not in slot:
                return None
            parts[slot[key]][sub.encode([e[i] for i in kidx])] = c
        return [Polynomial(sub, d) for d in parts]

    rels = []
    base_only = []
    for v in gb.elements:
        lt = max(v)
        ed = sum(w * x for w, x in zip(ering.elim_weights, ering.exps(lt)))
        if ed == 0:
            base_only.append(v)
        if ed <= 1:
            parts = split(v)
            if parts is None:
                raise ValueError("elimination basis element outside the expected span")
            rels.append(parts)
    # products of eliminated generators with relations purely in the subring
    for v in base_only:
        for j, e in enumerate(elements):
            if j == 0:
                continue
            prod = {k + (e.map_to(ering).leading_key() - ering.base(0)): c for k, c in v.items()}
            parts = split(prod)
            rels.append(parts)
    return sub, rels

