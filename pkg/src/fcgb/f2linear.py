"""Dense linear algebra over F_2 with rows packed into Python integers.

Column ``c`` of a row is bit ``c`` of the row integer, so row operations are
single XORs regardless of width.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


@dataclass
class BitMatrix:
    rows: int
    cols: int
    bits: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.bits:
            self.bits = [0] * self.rows
        if len(self.bits) != self.rows:
            raise ValueError("row count does not match storage")
        mask = (1 << self.cols) - 1
        for r in self.bits:
            if r & ~mask:
                raise ValueError("row has bits beyond the column count")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "BitMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        bits = []
        for row in rows:
            if len(row) != cols:
                raise ValueError("ragged rows")
            bits.append(sum(1 << c for c, v in enumerate(row) if v & 1))
        return cls(len(rows), cols, bits)

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "BitMatrix":
        """``["1100", "0110"]``: leftmost character is column 0."""
        return cls.from_rows([[int(ch) for ch in s] for s in rows])

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, [0] * rows)

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, list(self.bits))

    def get(self, r: int, c: int) -> int:
        return (self.bits[r] >> c) & 1

    def to_rows(self) -> list[list[int]]:
        return [[(b >> c) & 1 for c in range(self.cols)] for b in self.bits]

    def to_strings(self) -> list[str]:
        return ["".join(str((b >> c) & 1) for c in range(self.cols)) for b in self.bits]

    def mul_vec(self, v: int) -> int:
        """Product with a column vector packed as an int (bit c = entry c)."""
        out = 0
        for r, b in enumerate(self.bits):
            if (b & v).bit_count() & 1:
                out |= 1 << r
        return out

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.bits) == (other.rows, other.cols, other.bits)


# One row operation: ("swap", i, j) exchanges rows, ("add", src, dst) does
# row[dst] ^= row[src].
RowOp = tuple[str, int, int]


def row_reduce(m: BitMatrix) -> tuple[BitMatrix, list[int], list[RowOp]]:
    """Reduced row echelon form.

    Pivots are chosen at the lowest column with a nonzero entry among the
    unreduced rows, taking the lowest such row. Returns the RREF, the pivot
    columns, and the list of row operations that produced it.
    """
    bits = list(m.bits)
    ops: list[RowOp] = []
    pivots: list[int] = []
    prow = 0
    for c in range(m.cols):
        if prow == m.rows:
            break
        bit = 1 << c
        found = -1
        for r in range(prow, m.rows):
            if bits[r] & bit:
                found = r
                break
        if found < 0:
            continue
        if found != prow:
            bits[found], bits[prow] = bits[prow], bits[found]
            ops.append(("swap", found, prow))
        pivot = bits[prow]
        for r in range(m.rows):
            if r != prow and bits[r] & bit:
                bits[r] ^= pivot
                ops.append(("add", prow, r))
        pivots.append(c)
        prow += 1
    return BitMatrix(m.rows, m.cols, bits), pivots, ops


def replay(ops: Iterable[RowOp], rows: list) -> list:
    """Apply recorded row operations to any row list supporting ``^``."""
    rows = list(rows)
    for kind, a, b in ops:
        if kind == "swap":
            rows[a], rows[b] = rows[b], rows[a]
        else:
            rows[b] = rows[b] ^ rows[a]
    return rows


def rank(m: BitMatrix) -> int:
    return len(row_reduce(m)[1])


def kernel_basis(m: BitMatrix) -> list[int]:
    """Basis of ``{v : m v = 0}`` as packed column vectors."""
    red, pivots, _ = row_reduce(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = 1 << free
        for r, p in enumerate(pivots):
            if (red.bits[r] >> free) & 1:
                v |= 1 << p
        basis.append(v)
    return basis


class EchelonBasis:
    """Incrementally maintained span of packed vectors.

    Vectors are kept reduced against each other on their highest bit, which
    makes membership and rank queries linear in the basis size.
    """

    def __init__(self):
        self._pivots: dict[int, int] = {}

    def __len__(self):
        return len(self._pivots)

    def reduce(self, v: int) -> int:
        pivots = self._pivots
        while v:
            top = v.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                return v
            v ^= p
        return 0

    def add(self, v: int) -> bool:
        """Insert ``v``; return False when it was already in the span."""
        v = self.reduce(v)
        if not v:
            return False
        self._pivots[v.bit_length() - 1] = v
        return True

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    def vectors(self) -> list[int]:
        return [self._pivots[k] for k in sorted(self._pivots)]
