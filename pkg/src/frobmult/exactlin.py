"""Exact dense linear algebra over prime fields GF(p).

Matrices over GF(2) are stored as one Python ``int`` per row, bit ``j`` holding
column ``j``; elimination is then a word-wise XOR on those ints.  Other primes
use ``numpy`` int64 arrays of residues with vectorised row operations.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_PRIME = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")
        if self.p >= MAX_PRIME:
            raise ValueError(f"characteristic {self.p} too large (need p < 2^16)")

    @property
    def packed(self) -> bool:
        return self.p == 2

    def inv(self, a: int) -> int:
        return pow(a % self.p, -1, self.p)


class ScalarMatrix:
    """An immutable ``rows x cols`` matrix over GF(p)."""

    __slots__ = ("p", "rows", "cols", "_bits", "_arr")

    def __init__(self, p: int, rows: int, cols: int, *, bits=None, arr=None):
        FieldSpec(p)
        self.p = p
        self.rows = rows
        self.cols = cols
        self._bits: tuple[int, ...] | None = None
        self._arr: np.ndarray | None = None
        if p == 2:
            if bits is None:
                bits = _array_to_bits(np.zeros((rows, cols), dtype=np.int64) if arr is None else arr)
            bits = tuple(bits)
            if len(bits) != rows:
                raise ValueError("row count does not match storage")
            limit = 1 << cols
            if any(b < 0 or b >= limit for b in bits):
                raise ValueError("row bitset wider than column count")
            self._bits = bits
        else:
            if arr is None:
                arr = np.zeros((rows, cols), dtype=np.int64) if bits is None else _bits_to_array(bits, cols)
            arr = np.array(arr, dtype=np.int64).reshape(rows, cols) % p
            arr.setflags(write=False)
            self._arr = arr

    # construction -----------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int, cols: int | None = None) -> ScalarMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        arr = np.array(rows, dtype=np.int64).reshape(len(rows), cols)
        return cls(p, len(rows), cols, arr=arr)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> ScalarMatrix:
        if p == 2:
            return cls(p, rows, cols, bits=(0,) * rows)
        return cls(p, rows, cols, arr=np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, n: int, p: int) -> ScalarMatrix:
        if p == 2:
            return cls(p, n, n, bits=tuple(1 << i for i in range(n)))
        return cls(p, n, n, arr=np.eye(n, dtype=np.int64))

    @classmethod
    def from_bits(cls, bits: Iterable[int], cols: int) -> ScalarMatrix:
        bits = tuple(bits)
        return cls(2, len(bits), cols, bits=bits)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int, p: int) -> ScalarMatrix:
        if not columns:
            return cls.zeros(rows, 0, p)
        arr = np.array(columns, dtype=np.int64).reshape(len(columns), rows).T
        return cls(p, rows, len(columns), arr=arr)

    @classmethod
    def block(cls, grid: Sequence[Sequence["ScalarMatrix | None"]], row_sizes: Sequence[int],
              col_sizes: Sequence[int], p: int) -> ScalarMatrix:
        """Assemble from a grid of blocks; ``None`` stands for a zero block."""
        total_r, total_c = sum(row_sizes), sum(col_sizes)
        out = np.zeros((total_r, total_c), dtype=np.int64)
        r0 = 0
        for bi, rs in enumerate(row_sizes):
            c0 = 0
            for bj, cs in enumerate(col_sizes):
                blk = grid[bi][bj]
                if blk is not None:
                    if (blk.rows, blk.cols) != (rs, cs):
                        raise ValueError(f"block ({bi},{bj}) has shape {blk.shape}, expected {(rs, cs)}")
                    out[r0:r0 + rs, c0:c0 + cs] = blk.to_numpy()
                c0 += cs
            r0 += rs
        return cls(p, total_r, total_c, arr=out)

    # access -----------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def row_bits(self) -> tuple[int, ...]:
        if self._bits is None:
            raise TypeError("row bitsets only exist for p = 2")
        return self._bits

    def to_numpy(self) -> np.ndarray:
        if self._arr is not None:
            return self._arr.copy()
        return _bits_to_array(self._bits, self.cols)

    def tolist(self) -> list[list[int]]:
        return self.to_numpy().tolist()

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        if self._bits is not None:
            return (self._bits[i] >> j) & 1
        return int(self._arr[i, j])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScalarMatrix):
            return NotImplemented
        if (self.p, self.rows, self.cols) != (other.p, other.rows, other.cols):
            return False
        if self._bits is not None:
            return self._bits == other._bits
        return bool(np.array_equal(self._arr, other._arr))

    def __hash__(self):
        return hash((self.p, self.rows, self.cols, self._bits if self._bits is not None else self._arr.tobytes()))

    def __repr__(self):
        return f"ScalarMatrix(p={self.p}, shape={self.shape})"

    def is_zero(self) -> bool:
        if self._bits is not None:
            return not any(self._bits)
        return not self._arr.any()

    # arithmetic ---------------------------------------------------------------
    def transpose(self) -> ScalarMatrix:
        if self._bits is not None:
            cols = [0] * self.cols
            for i, row in enumerate(self._bits):
                bit = 1 << i
                while row:
                    low = row & -row
                    cols[low.bit_length() - 1] |= bit
                    row ^= low
            return ScalarMatrix(2, self.cols, self.rows, bits=cols)
        return ScalarMatrix(self.p, self.cols, self.rows, arr=self._arr.T)

    @property
    def T(self) -> ScalarMatrix:
        return self.transpose()

    def __add__(self, other: ScalarMatrix) -> ScalarMatrix:
        _check_same(self, other)
        if self._bits is not None:
            return ScalarMatrix(2, self.rows, self.cols, bits=[a ^ b for a, b in zip(self._bits, other._bits)])
        return ScalarMatrix(self.p, self.rows, self.cols, arr=self._arr + other._arr)

    def __neg__(self) -> ScalarMatrix:
        if self._bits is not None:
            return self
        return ScalarMatrix(self.p, self.rows, self.cols, arr=-self._arr)

    def __sub__(self, other: ScalarMatrix) -> ScalarMatrix:
        return self + (-other)

    def scale(self, c: int) -> ScalarMatrix:
        c %= self.p
        if c == 0:
            return ScalarMatrix.zeros(self.rows, self.cols, self.p)
        if self._bits is not None:
            return self
        return ScalarMatrix(self.p, self.rows, self.cols, arr=self._arr * c)

    def __matmul__(self, other: ScalarMatrix) -> ScalarMatrix:
        if self.p != other.p:
            raise ValueError("mismatched characteristics")
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        if self._bits is not None:
            ob = other._bits
            out = []
            for row in self._bits:
                acc = 0
                while row:
                    low = row & -row
                    acc ^= ob[low.bit_length() - 1]
                    row ^= low
                out.append(acc)
            return ScalarMatrix(2, self.rows, other.cols, bits=out)
        return ScalarMatrix(self.p, self.rows, other.cols, arr=_matmul_mod(self._arr, other._arr, self.p))

    def hstack(self, other: ScalarMatrix) -> ScalarMatrix:
        if self.rows != other.rows or self.p != other.p:
            raise ValueError("hstack needs equal row counts")
        if self._bits is not None:
            sh = self.cols
            return ScalarMatrix(2, self.rows, self.cols + other.cols,
                                bits=[a | (b << sh) for a, b in zip(self._bits, other._bits)])
        return ScalarMatrix(self.p, self.rows, self.cols + other.cols, arr=np.hstack([self._arr, other._arr]))

    def vstack(self, other: ScalarMatrix) -> ScalarMatrix:
        if self.cols != other.cols or self.p != other.p:
            raise ValueError("vstack needs equal column counts")
        if self._bits is not None:
            return ScalarMatrix(2, self.rows + other.rows, self.cols, bits=self._bits + other._bits)
        return ScalarMatrix(self.p, self.rows + other.rows, self.cols, arr=np.vstack([self._arr, other._arr]))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> ScalarMatrix:
        arr = self.to_numpy()[np.ix_(list(rows), list(cols))]
        return ScalarMatrix(self.p, len(rows), len(cols), arr=arr)

    def apply(self, v: Sequence[int]) -> list[int]:
        """Matrix times column vector."""
        x = np.asarray(v, dtype=np.int64).reshape(self.cols, 1)
        if self.cols == 0:
            return [0] * self.rows
        return (_matmul_mod(self.to_numpy(), x, self.p)[:, 0]).tolist()


def _check_same(a: ScalarMatrix, b: ScalarMatrix):
    if a.shape != b.shape or a.p != b.p:
        raise ValueError(f"shape/characteristic mismatch: {a!r} vs {b!r}")


def _matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # chunk the inner dimension so int64 accumulation cannot overflow
    inner = a.shape[1]
    step = max(1, (1 << 62) // ((p - 1) ** 2 + 1))
    if inner <= step:
        return (a @ b) % p
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(0, inner, step):
        out = (out + a[:, k:k + step] @ b[k:k + step, :]) % p
    return out


def _array_to_bits(arr) -> list[int]:
    arr = np.asarray(arr, dtype=np.int64) % 2
    out = []
    for row in arr:
        idx = np.flatnonzero(row)
        v = 0
        for j in idx.tolist():
            v |= 1 << j
        out.append(v)
    return out


def _bits_to_array(bits, cols: int) -> np.ndarray:
    out = np.zeros((len(bits), cols), dtype=np.int64)
    for i, row in enumerate(bits):
        while row:
            low = row & -row
            out[i, low.bit_length() - 1] = 1
            row ^= low
    return out


# ---------------------------------------------------------------------------
# elimination kernels
# ---------------------------------------------------------------------------

def rank_bits(rows: Iterable[int]) -> int:
    """Rank of a set of GF(2) row bitsets (incremental basis keyed by top bit)."""
    basis: dict[int, int] = {}
    for v in rows:
        while v:
            top = v.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = v
                break
            v ^= b
    return len(basis)


def _rref_bits(bits: Sequence[int], cols: int) -> tuple[list[int], list[int]]:
    rows = [b for b in bits]
    pivots: list[int] = []
    r = 0
    n = len(rows)
    for c in range(cols):
        mask = 1 << c
        sel = None
        for i in range(r, n):
            if rows[i] & mask:
                sel = i
                break
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        piv = rows[r]
        for i in range(n):
            if i != r and rows[i] & mask:
                rows[i] ^= piv
        pivots.append(c)
        r += 1
        if r == n:
            break
    return rows, pivots


def _rref_array(arr: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    a = np.array(arr, dtype=np.int64) % p
    nr, nc = a.shape
    pivots: list[int] = []
    r = 0
    inv = _inverse_table(p)
    for c in range(nc):
        if r == nr:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        sel = r + int(nz[0])
        if sel != r:
            a[[r, sel]] = a[[sel, r]]
        a[r] = (a[r] * inv[a[r, c]]) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


_INV_CACHE: dict[int, np.ndarray] = {}


def _inverse_table(p: int) -> np.ndarray:
    tab = _INV_CACHE.get(p)
    if tab is None:
        tab = np.zeros(p, dtype=np.int64)
        for a in range(1, p):
            tab[a] = pow(a, -1, p)
        _INV_CACHE[p] = tab
    return tab


def rref(m: ScalarMatrix) -> tuple[ScalarMatrix, list[int]]:
    """Reduced row echelon form and pivot columns.  The input is left untouched."""
    if m.p == 2:
        rows, pivots = _rref_bits(m.row_bits, m.cols)
        return ScalarMatrix(2, m.rows, m.cols, bits=rows), pivots
    arr, pivots = _rref_array(m.to_numpy(), m.p)
    return ScalarMatrix(m.p, m.rows, m.cols, arr=arr), pivots


def rank(m: ScalarMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.p == 2:
        return rank_bits(m.row_bits)
    return len(_rref_array(m.to_numpy(), m.p)[1])


def kernel_basis(m: ScalarMatrix) -> list[list[int]]:
    """Basis of the right null space ``{v : m v = 0}`` as lists of residues."""
    red, pivots = rref(m)
    pivset = set(pivots)
    free = [j for j in range(m.cols) if j not in pivset]
    arr = red.to_numpy()
    p = m.p
    basis = []
    for f in free:
        v = [0] * m.cols
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = int(-arr[r, f]) % p
        basis.append(v)
    return basis


def image_basis(m: ScalarMatrix) -> list[list[int]]:
    """Basis of the column space, as the pivot columns of ``m``."""
    _, pivots = rref(m)
    arr = m.to_numpy()
    return [arr[:, c].tolist() for c in pivots]


def nullity(m: ScalarMatrix) -> int:
    return m.cols - rank(m)


# ---------------------------------------------------------------------------
# text matrix-exchange format:  "rows cols p" then one row of residues per line
# ---------------------------------------------------------------------------

def to_text(m: ScalarMatrix) -> str:
    lines = [f"{m.rows} {m.cols} {m.p}"]
    for row in m.tolist():
        lines.append(" ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def from_text(text: str, p: int | None = None) -> ScalarMatrix:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty matrix text")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError(f"bad header {lines[0]!r}; expected 'rows cols p'")
    rows, cols, fp = (int(x) for x in head)
    if p is not None:
        fp = p
    body = [[int(x) for x in ln.split()] for ln in lines[1:]]
    if len(body) != rows:
        raise ValueError(f"expected {rows} rows, found {len(body)}")
    for i, r in enumerate(body):
        if len(r) != cols:
            raise ValueError(f"row {i} has {len(r)} entries, expected {cols}")
    if rows == 0:
        return ScalarMatrix.zeros(0, cols, fp)
    return ScalarMatrix.from_rows(body, fp, cols=cols)
