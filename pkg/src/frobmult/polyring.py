"""Multivariate polynomials over GF(p) with weighted grevlex orders.

A term (monomial times free-module basis vector) is encoded as a single Python
``int`` whose natural integer order *is* the monomial order:

    [ CMAX - component | elimination degree | weighted degree | revlex fields ]

Each revlex field holds ``MAXE - exponent`` in 16 bits with the last variable
in the most significant position, so that ties in degree are broken by the
smaller exponent of the last variable winning.  Multiplying by a monomial is
adding a fixed integer ("delta"), and divisibility is a borrow test on the
revlex fields.  Positions are compared first with the lowest component index
largest (position over term).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

FIELD_BITS = 16
MAXE = (1 << (FIELD_BITS - 1)) - 1
ROW_BITS = 32
CMAX = (1 << 24) - 1


@dataclass(frozen=True)
class MonomialOrder:
    """Weighted graded reverse lexicographic order.

    ``elim`` is an optional extra weight row compared before the grading; with
    weights supported on a block of variables it turns the order into an
    elimination order for that block.
    """

    weights: tuple[int, ...]
    elim: tuple[int, ...] | None = None
    kind: str = "grevlex"

    def __post_init__(self):
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be strictly positive")
        if self.elim is not None:
            if len(self.elim) != len(self.weights) or any(w < 0 for w in self.elim):
                raise ValueError("bad elimination weights")
        if self.kind != "grevlex":
            raise ValueError(f"unsupported order kind {self.kind!r}")

    @classmethod
    def standard(cls, n: int) -> MonomialOrder:
        return cls((1,) * n)


class PolyRing:
    """``GF(p)[x_0..x_{n-1}]`` together with a fixed monomial order."""

    def __init__(self, names: Sequence[str], p: int, order: MonomialOrder | None = None):
        from .exactlin import FieldSpec

        FieldSpec(p)
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        self.n = len(self.names)
        self.p = p
        self.order = order or MonomialOrder.standard(self.n)
        if len(self.order.weights) != self.n:
            raise ValueError("order weights do not match variable count")
        self.weights = self.order.weights
        self.index = {nm: i for i, nm in enumerate(self.names)}

        n = self.n
        self.rev_bits = FIELD_BITS * n
        self.deg_pos = self.rev_bits
        self.elim_pos = self.deg_pos + ROW_BITS
        self.top = self.elim_pos + ROW_BITS
        self.rev_mask = (1 << self.rev_bits) - 1
        self.guard = sum(1 << (FIELD_BITS * i + FIELD_BITS - 1) for i in range(n))
        self.deg_mask = (1 << ROW_BITS) - 1
        self.one_rev = sum(MAXE << (FIELD_BITS * i) for i in range(n))
        elim = self.order.elim or (0,) * n
        self.elim_weights = elim
        # delta of each single variable
        self.var_delta = tuple(
            (self.weights[i] << self.deg_pos) + (elim[i] << self.elim_pos) - (1 << (FIELD_BITS * i))
            for i in range(n)
        )

    # ------------------------------------------------------------------ keys
    def base(self, comp: int = 0) -> int:
        """Key of the basis vector ``e_comp`` (the monomial 1)."""
        return ((CMAX - comp) << self.top) | self.one_rev

    def delta(self, exps: Sequence[int]) -> int:
        d = 0
        vd = self.var_delta
        for i, e in enumerate(exps):
            if e:
                d += e * vd[i]
        return d

    def encode(self, exps: Sequence[int], comp: int = 0) -> int:
        if len(exps) != self.n:
            raise ValueError("exponent vector length mismatch")
        if any(e < 0 or e > MAXE for e in exps):
            raise ValueError("exponent out of range")
        return self.base(comp) + self.delta(exps)

    def comp(self, key: int) -> int:
        return CMAX - (key >> self.top)

    def bucket(self, key: int) -> int:
        """Terms can only divide each other within one bucket (the component)."""
        return key >> self.top

    def exps(self, key: int) -> tuple[int, ...]:
        return tuple(MAXE - ((key >> (FIELD_BITS * i)) & 0xFFFF) for i in range(self.n))

    def decode(self, key: int) -> tuple[int, tuple[int, ...]]:
        return self.comp(key), self.exps(key)

    def degree(self, key: int) -> int:
        return (key >> self.deg_pos) & self.deg_mask

    def monomial_part(self, key: int) -> int:
        """Delta of the monomial underlying a term (component stripped)."""
        return (key & ((1 << self.top) - 1)) - self.one_rev

    def divides(self, t: int, m: int) -> bool:
        """Does term ``t`` divide term ``m`` (same component)?"""
        if (t >> self.top) != (m >> self.top):
            return False
        return ((t & self.rev_mask) - (m & self.rev_mask)) & self.guard == 0

    def lcm(self, a: int, b: int) -> int:
        """Least common multiple of two terms in the same component."""
        ea, eb = self.exps(a), self.exps(b)
        return self.encode([x if x > y else y for x, y in zip(ea, eb)], self.comp(a))

    def coprime(self, a: int, b: int) -> bool:
        ea, eb = self.exps(a), self.exps(b)
        return all(x == 0 or y == 0 for x, y in zip(ea, eb))

    def with_comp(self, key: int, comp: int) -> int:
        return key - self.base(self.comp(key)) + self.base(comp)

    # -------------------------------------------------------------- helpers
    def with_order(self, order: MonomialOrder) -> PolyRing:
        return PolyRing(self.names, self.p, order)

    def gens(self) -> list[Polynomial]:
        return [self.var(nm) for nm in self.names]

    def var(self, name: str) -> Polynomial:
        e = [0] * self.n
        e[self.index[name]] = 1
        return Polynomial(self, {self.encode(e): 1})

    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    def one(self) -> Polynomial:
        return Polynomial(self, {self.base(0): 1})

    def const(self, c: int) -> Polynomial:
        c %= self.p
        return Polynomial(self, {self.base(0): c} if c else {})

    def monomial(self, exps: Sequence[int], coeff: int = 1) -> Polynomial:
        c = coeff % self.p
        return Polynomial(self, {self.encode(exps): c} if c else {})

    def parse(self, text: str) -> Polynomial:
        return parse_polynomial(self, text)

    def same_as(self, other: PolyRing) -> bool:
        return self is other or (self.names == other.names and self.p == other.p and self.order == other.order)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.same_as(other)

    def __hash__(self):
        return hash((self.names, self.p, self.order))

    def __repr__(self):
        return f"PolyRing({','.join(self.names)}; p={self.p}; w={self.weights})"


class ModuleFrame:
    """Alternative term layout for free modules ``ring^rank``.

    Keys are ``[block | elimination degree | degree + shift | CMAX - comp | revlex]``:
    components are compared after the (shifted) degree, so one block is a
    term-over-position order.  Distinct blocks eliminate each other, and giving
    every component its own descending block recovers position over term.
    The frame offers the key interface the Gröbner engine needs.
    """

    def __init__(self, ring: PolyRing, rank: int, blocks: Sequence[int] | None = None,
                 shifts: Sequence[int] | None = None):
        self.ring = ring
        self.rank = rank
        self.n, self.p, self.names = ring.n, ring.p, ring.names
        self.weights = ring.weights
        self.blocks = tuple(blocks) if blocks is not None else (0,) * rank
        self.shifts = tuple(shifts) if shifts is not None else (0,) * rank
        if len(self.blocks) != rank or len(self.shifts) != rank:
            raise ValueError("one block and one shift per component")
        if any(s < 0 for s in self.shifts) or any(b < 0 for b in self.blocks):
            raise ValueError("shifts and blocks must be non-negative")
        n = self.n
        self.rev_bits = FIELD_BITS * n
        self.comp_pos = self.rev_bits
        self.deg_pos = self.comp_pos + 24
        self.elim_pos = self.deg_pos + ROW_BITS
        self.block_pos = self.elim_pos + ROW_BITS
        self.rev_mask = ring.rev_mask
        self.guard = ring.guard
        self.one_rev = ring.one_rev
        self.deg_mask = (1 << ROW_BITS) - 1
        elim = ring.elim_weights
        self.elim_weights = elim
        self.var_delta = tuple(
            (self.weights[i] << self.deg_pos) + (elim[i] << self.elim_pos) - (1 << (FIELD_BITS * i))
            for i in range(n)
        )
        self._bases = [self._base(c) for c in range(rank)]

    def _base(self, c: int) -> int:
        return ((self.blocks[c] << self.block_pos) | (self.shifts[c] << self.deg_pos)
                | ((CMAX - c) << self.comp_pos) | self.one_rev)

    def base(self, comp: int = 0) -> int:
        return self._bases[comp]

    def encode(self, exps: Sequence[int], comp: int = 0) -> int:
        d = 0
        for i, e in enumerate(exps):
            if e:
                d += e * self.var_delta[i]
        return self._bases[comp] + d

    def comp(self, key: int) -> int:
        return CMAX - ((key >> self.comp_pos) & 0xFFFFFF)

    def bucket(self, key: int) -> int:
        return (key >> self.comp_pos) & 0xFFFFFF

    def exps(self, key: int) -> tuple[int, ...]:
        return tuple(MAXE - ((key >> (FIELD_BITS * i)) & 0xFFFF) for i in range(self.n))

    def decode(self, key: int) -> tuple[int, tuple[int, ...]]:
        return self.comp(key), self.exps(key)

    def degree(self, key: int) -> int:
        return (key >> self.deg_pos) & self.deg_mask

    def divides(self, t: int, m: int) -> bool:
        if ((t ^ m) >> self.comp_pos) & 0xFFFFFF:
            return False
        return ((t & self.rev_mask) - (m & self.rev_mask)) & self.guard == 0

    def lcm(self, a: int, b: int) -> int:
        ea, eb = self.exps(a), self.exps(b)
        return self.encode([x if x > y else y for x, y in zip(ea, eb)], self.comp(a))

    def coprime(self, a: int, b: int) -> bool:
        ea, eb = self.exps(a), self.exps(b)
        return all(x == 0 or y == 0 for x, y in zip(ea, eb))

    # -- conversion to and from ring keys ----------------------------------
    def from_ring(self, key: int, comp_offset: int = 0) -> int:
        r = self.ring
        m = self.deg_mask
        return (self._bases[r.comp(key) + comp_offset] + (key & self.rev_mask) - self.one_rev
                + (((key >> r.deg_pos) & m) << self.deg_pos) + (((key >> r.elim_pos) & m) << self.elim_pos))

    def to_ring(self, key: int, comp_offset: int = 0) -> int:
        r = self.ring
        m = self.deg_mask
        c = self.comp(key)
        deg = ((key >> self.deg_pos) & m) - self.shifts[c]
        return (r.base(c + comp_offset) + (key & self.rev_mask) - self.one_rev
                + (deg << r.deg_pos) + (((key >> self.elim_pos) & m) << r.elim_pos))

    def vec_from_ring(self, v: Mapping[int, int], comp_offset: int = 0) -> dict:
        return {self.from_ring(k, comp_offset): c for k, c in v.items()}

    def vec_to_ring(self, v: Mapping[int, int], comp_offset: int = 0) -> dict:
        return {self.to_ring(k, comp_offset): c for k, c in v.items()}

    def same_as(self, other) -> bool:
        return (isinstance(other, ModuleFrame) and self.ring.same_as(other.ring)
                and (self.rank, self.blocks, self.shifts) == (other.rank, other.blocks, other.shifts))


class Polynomial:
    """Immutable polynomial; ``terms`` maps term keys to nonzero residues."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Mapping[int, int]):
        self.ring = ring
        self.terms = {k: c for k, c in terms.items() if c % ring.p} if terms else {}
        for k in self.terms:
            self.terms[k] %= ring.p

    def _check(self, other: Polynomial):
        if not self.ring.same_as(other.ring):
            raise ValueError("polynomials live in different rings")

    def _lift(self, other) -> Polynomial:
        if isinstance(other, int):
            return self.ring.const(other)
        self._check(other)
        return other

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring.same_as(other.ring) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other) -> Polynomial:
        other = self._lift(other)
        p = self.ring.p
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = (out.get(k, 0) + c) % p
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        p = self.ring.p
        return Polynomial(self.ring, {k: (-c) % p for k, c in self.terms.items()})

    def __sub__(self, other) -> Polynomial:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> Polynomial:
        return self._lift(other) - self

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        ring = self.ring
        p = ring.p
        base = ring.base(0)
        out: dict[int, int] = {}
        for k1, c1 in self.terms.items():
            d = k1 - base
            for k2, c2 in other.terms.items():
                k = k2 + d
                v = (out.get(k, 0) + c1 * c2) % p
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return Polynomial(ring, out)

    __rmul__ = __mul__

    def scale(self, c: int) -> Polynomial:
        p = self.ring.p
        c %= p
        return Polynomial(self.ring, {k: (v * c) % p for k, v in self.terms.items()} if c else {})

    def __pow__(self, e: int) -> Polynomial:
        if e < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # ----------------------------------------------------------------- info
    def leading_key(self) -> int:
        return max(self.terms)

    def leading_term(self) -> tuple[int, tuple[int, ...]]:
        k = self.leading_key()
        return self.terms[k], self.ring.exps(k)

    def items(self) -> list[tuple[tuple[int, ...], int]]:
        """(exponents, coefficient) pairs, leading term first."""
        r = self.ring
        return [(r.exps(k), self.terms[k]) for k in sorted(self.terms, reverse=True)]

    def weighted_degree(self) -> int | None:
        """Common weighted degree of all terms; ``None`` if inhomogeneous or zero."""
        degs = {self.ring.degree(k) for k in self.terms}
        if len(degs) != 1:
            return None
        return degs.pop()

    def is_homogeneous(self) -> bool:
        return self.weighted_degree() is not None

    def max_degree(self) -> int:
        return max((self.ring.degree(k) for k in self.terms), default=0)

    def constant_term(self) -> int:
        return self.terms.get(self.ring.base(0), 0)

    def variables(self) -> set[str]:
        used = set()
        for k in self.terms:
            for i, e in enumerate(self.ring.exps(k)):
                if e:
                    used.add(self.ring.names[i])
        return used

    def frobenius_power(self, n: int) -> Polynomial:
        """``f^(p^n)``, computed term-wise (exact since char = p and c^p = c in GF(p))."""
        if n < 0:
            raise ValueError("n must be non-negative")
        if n == 0:
            return self
        q = self.ring.p ** n
        r = self.ring
        return Polynomial(r, {r.encode([e * q for e in r.exps(k)]): c for k, c in self.terms.items()})

    def map_to(self, target: PolyRing, images: Mapping[str, Polynomial] | None = None) -> Polynomial:
        """Ring homomorphism sending each variable to ``images[name]`` (default: the
        same-named variable of ``target``)."""
        if target.p != self.ring.p:
            raise ValueError("characteristic mismatch")
        if images is None and all(nm in target.index for nm in self.ring.names):
            idx = [target.index[nm] for nm in self.ring.names]
            out = {}
            for k, c in self.terms.items():
                e = [0] * target.n
                for i, x in enumerate(self.ring.exps(k)):
                    e[idx[i]] = x
                out[target.encode(e)] = c
            return Polynomial(target, out)
        images = dict(images or {})
        for nm in self.ring.names:
            if nm not in images:
                images[nm] = target.var(nm)
        gens = [images[nm] for nm in self.ring.names]
        if all(len(g.terms) == 1 for g in gens):
            return self._map_monomial(target, gens)
        result = target.zero()
        cache: dict[tuple[int, int], Polynomial] = {}
        for k, c in self.terms.items():
            term = target.const(c)
            for i, e in enumerate(self.ring.exps(k)):
                if e:
                    pw = cache.get((i, e))
                    if pw is None:
                        pw = cache[(i, e)] = gens[i] ** e
                    term = term * pw
            result = result + term
        return result

    def _map_monomial(self, target: PolyRing, gens: Sequence[Polynomial]) -> Polynomial:
        # every image is c * monomial: work on exponent vectors directly
        p = target.p
        imgs = [(target.exps(k), c) for g in gens for k, c in g.terms.items()]
        out: dict[int, int] = {}
        for k, c in self.terms.items():
            e = [0] * target.n
            for (ge, gc), x in zip(imgs, self.ring.exps(k)):
                if x:
                    c = c * pow(gc, x, p) % p
                    for i, y in enumerate(ge):
                        e[i] += x * y
            key = target.encode(e)
            v = (out.get(key, 0) + c) % p
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        return Polynomial(target, out)

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({self})"


def format_monomial(names: Sequence[str], exps: Sequence[int]) -> str:
    parts = []
    for nm, e in zip(names, exps):
        if e == 1:
            parts.append(nm)
        elif e > 1:
            parts.append(f"{nm}^{e}")
    return "*".join(parts)


def format_polynomial(f: Polynomial) -> str:
    if not f.terms:
        return "0"
    out = []
    for exps, c in f.items():
        mono = format_monomial(f.ring.names, exps)
        if not mono:
            out.append(str(c))
        elif c == 1:
            out.append(mono)
        else:
            out.append(f"{c}*{mono}")
    return " + ".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\^)|(\*)|([+-]))")


def parse_polynomial(ring: PolyRing, text: str) -> Polynomial:
    """Parse ``2*u^2*v + x - w*z`` style input.  Signs are reduced mod p."""
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial")
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text!r} at position {pos}")
        pos = m.end()
        if m.group(1):
            tokens.append(("num", int(m.group(1))))
        elif m.group(2):
            tokens.append(("var", m.group(2)))
        elif m.group(3):
            tokens.append(("pow", None))
        elif m.group(4):
            tokens.append(("mul", None))
        elif m.group(5):
            tokens.append(("sign", m.group(5)))
    result: dict[int, int] = {}
    i = 0
    p = ring.p
    while i < len(tokens):
        sign = 1
        while i < len(tokens) and tokens[i][0] == "sign":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        coeff = sign
        exps = [0] * ring.n
        expect_factor = True
        while i < len(tokens) and tokens[i][0] != "sign":
            kind, val = tokens[i]
            if kind == "mul":
                if expect_factor:
                    raise ValueError(f"dangling '*' in {text!r}")
                expect_factor = True
                i += 1
                continue
            if not expect_factor:
                raise ValueError(f"missing '*' in {text!r}")
            expect_factor = False
            if kind == "num":
                coeff *= val
                i += 1
            elif kind == "var":
                if val not in ring.index:
                    raise ValueError(f"unknown variable {val!r}")
                e = 1
                i += 1
                if i < len(tokens) and tokens[i][0] == "pow":
                    if i + 1 >= len(tokens) or tokens[i + 1][0] != "num":
                        raise ValueError(f"bad exponent in {text!r}")
                    e = tokens[i + 1][1]
                    i += 2
                exps[ring.index[val]] += e
            else:
                raise ValueError(f"unexpected token in {text!r}")
        if expect_factor:
            raise ValueError(f"incomplete term in {text!r}")
        k = ring.encode(exps)
        v = (result.get(k, 0) + coeff) % p
        if v:
            result[k] = v
        else:
            result.pop(k, None)
    return Polynomial(ring, result)


class RingPresentation:
    """``ring / (relations)``: the ambient ring of every computation."""

    def __init__(self, ring: PolyRing, relations: Iterable[Polynomial] = (), name: str = "",
                 require_homogeneous: bool = False):
        self.ring = ring
        self.relations = [r for r in relations]
        self.name = name
        for r in self.relations:
            if not r.ring.same_as(ring):
                raise ValueError("relation lives in a different ring")
            if r.is_zero():
                raise ValueError("zero relation generator")
            if require_homogeneous and not r.is_homogeneous():
                raise ValueError(f"relation {r} is not homogeneous")

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def names(self) -> tuple[str, ...]:
        return self.ring.names

    def with_relations(self, extra: Iterable[Polynomial], name: str = "") -> RingPresentation:
        return RingPresentation(self.ring, self.relations + list(extra), name=name or self.name)

    def with_order(self, order: MonomialOrder) -> RingPresentation:
        ring = self.ring.with_order(order)
        return RingPresentation(ring, [r.map_to(ring) for r in self.relations], name=self.name)

    def parse(self, text: str) -> Polynomial:
        return self.ring.parse(text)

    def to_text(self) -> str:
        lines = [f"p {self.p}", "vars " + " ".join(self.names),
                 "weights " + " ".join(str(w) for w in self.ring.weights)]
        lines += [f"rel {r}" for r in self.relations]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "", p: int | None = None) -> RingPresentation:
        fields: dict[str, str] = {}
        rels: list[str] = []
        for ln in text.splitlines():
            ln = ln.split("#", 1)[0].strip()
            if not ln:
                continue
            key, _, rest = ln.partition(" ")
            if key == "rel":
                rels.append(rest)
            else:
                fields[key] = rest.strip()
        names = fields["vars"].split()
        weights = tuple(int(w) for w in fields.get("weights", " ".join("1" * len(names))).split())
        prime = p if p is not None else int(fields["p"])
        ring = PolyRing(names, prime, MonomialOrder(weights))
        return cls(ring, [ring.parse(r) for r in rels], name=name)

    def __repr__(self):
        return f"RingPresentation({self.name or '?'}: {self.ring!r}, {len(self.relations)} relations)"
