"""Slow reference computations used to check the fast engines.

Nothing here touches the filtered ordering or the Groebner code. Products
come either from the dual Hopf algebra A_* = F_2[xi_1, xi_2, ...] with
coproduct psi(xi_n) = sum_i xi_{n-i}^{2^i} (x) xi_i, or from the Milnor
product, and everything else is dense linear algebra over F_2.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product as cartesian
from typing import Iterable, Sequence

from .f2linear import BitMatrix, EchelonBasis, kernel_basis, rank
from .milnor import degree, milnor_product, trim


@lru_cache(maxsize=None)
def milnor_basis(d: int) -> tuple[tuple, ...]:
    """All R with deg P(R) = d, sorted."""
    out = []

    def rec(k: int, rest: int, acc: list):
        if rest == 0:
            out.append(trim(acc))
            return
        w = (1 << k) - 1
        if w > rest:
            return
        for x in range(rest // w, -1, -1):
            rec(k + 1, rest - x * w, acc + [x])

    if d == 0:
        return ((),)
    rec(1, d, [])
    return tuple(sorted(set(out)))


# ---------- dual coproduct ----------


def _add_exp(a: tuple, k: int, e: int) -> tuple:
    a = list(a) + [0] * (k - len(a))
    a[k - 1] += e
    return trim(a)


def _mul_dual(x: tuple, y: tuple) -> tuple:
    n = max(len(x), len(y))
    return trim(a + b for a, b in zip(x + (0,) * (n - len(x)), y + (0,) * (n - len(y))))


@lru_cache(maxsize=None)
def _psi_power(n: int, b: int) -> frozenset:
    """psi(xi_n)^{2^b} as a set of (left, right) exponent tuples."""
    out = set()
    for i in range(n + 1):
        left = _add_exp((), n - i, 1 << (i + b)) if n - i else ()
        right = _add_exp((), i, 1 << b) if i else ()
        out ^= {(left, right)}
    return frozenset(out)


@lru_cache(maxsize=None)
def dual_coproduct(t: tuple) -> frozenset:
    """psi(xi^T) = prod_n psi(xi_n)^{t_n}, expanded over F_2."""
    acc = {((), ())}
    for n, tn in enumerate(t, start=1):
        b = 0
        while tn:
            if tn & 1:
                new: set = set()
                for (l1, r1), (l2, r2) in cartesian(acc, _psi_power(n, b)):
                    new ^= {(_mul_dual(l1, l2), _mul_dual(r1, r2))}
                acc = new
            tn >>= 1
            b += 1
    return frozenset(acc)


def pairing_product_table(d: int) -> dict[tuple, frozenset]:
    """P(R) P(S) for every pair with deg R + deg S = d, read off psi(xi^T).

    <P(R) P(S), xi^T> = <P(R) (x) P(S), psi(xi^T)>.
    """
    table: dict[tuple, set] = {}
    for t in milnor_basis(d):
        for pair in dual_coproduct(t):
            table.setdefault(pair, set()).symmetric_difference_update({t})
    for r in range(d + 1):
        for a in milnor_basis(r):
            for b in milnor_basis(d - r):
                table.setdefault((a, b), set())
    return {k: frozenset(v) for k, v in table.items()}


# ---------- free modules in the Milnor basis ----------


class FreeModuleBasis:
    """Basis P(R) e_k of a free module in one degree; e_k has degree ``degs[k]``."""

    def __init__(self, degs: Sequence[int], d: int):
        self.items = [(k, r) for k, dk in enumerate(degs) if dk <= d for r in milnor_basis(d - dk)]
        self.index = {x: i for i, x in enumerate(self.items)}

    def __len__(self):
        return len(self.items)

    def pack(self, x: Iterable[tuple[int, tuple]]) -> int:
        v = 0
        for k, r in x:
            v ^= 1 << self.index[(k, r)]
        return v


def act(r: tuple, x: Iterable[tuple[int, tuple]]) -> frozenset:
    """P(R) * x for x a set of (slot, R') pairs."""
    acc: set = set()
    for k, s in x:
        acc ^= {(k, t) for t in milnor_product(r, s).terms}
    return frozenset(acc)


def combine_vectors(vec: Iterable[tuple[int, tuple]], images: Sequence[Iterable[tuple[int, tuple]]]) -> frozenset:
    acc: set = set()
    for k, r in vec:
        acc ^= act(r, images[k])
    return frozenset(acc)


def element_degree(x: Iterable[tuple[int, tuple]], degs: Sequence[int]) -> int:
    k, r = next(iter(x))
    return degree(r) + degs[k]


def span_dimension(gens: Sequence[frozenset], degs: Sequence[int], d: int) -> int:
    """dim of the degree-d part of the submodule generated by ``gens``."""
    basis = FreeModuleBasis(degs, d)
    span = EchelonBasis()
    for x in gens:
        e = element_degree(x, degs)
        if e > d:
            continue
        for a in milnor_basis(d - e):
            span.add(basis.pack(act(a, x)))
    return len(span)


def quotient_dimensions(gens: Sequence[frozenset], degs: Sequence[int], upto: int) -> list[int]:
    """dim (A^r / <gens>)_d for d = 0..upto."""
    return [len(FreeModuleBasis(degs, d)) - span_dimension(gens, degs, d) for d in range(upto + 1)]


def syzygy_dimensions(xs: Sequence[frozenset], degs: Sequence[int], upto: int) -> list[int]:
    """dim of ker(A^m -> A^r, e_k -> x_k) in each degree, m = len(xs)."""
    sdeg = [element_degree(x, degs) for x in xs]
    out = []
    for d in range(upto + 1):
        src = FreeModuleBasis(sdeg, d)
        tgt = FreeModuleBasis(degs, d)
        cols = [tgt.pack(act(r, xs[k])) for k, r in src.items]
        # rows of the transpose are the images; kernel of the map = kernel of that transpose
        m = BitMatrix(len(tgt), len(src), _transpose(cols, len(tgt)))
        out.append(len(src) - rank(m))
    return out


def _transpose(cols: Sequence[int], nrows: int) -> list[int]:
    rows = [0] * nrows
    for c, v in enumerate(cols):
        while v:
            low = v & -v
            rows[low.bit_length() - 1] |= 1 << c
            v ^= low
    return rows


# ---------- minimal resolution of F_2 by dense linear algebra ----------


def minimal_resolution_ranks(t_max: int, s_max: int | None = None) -> dict[tuple[int, int], int]:
    """dim Ext^{s,t}(F_2, F_2) for t <= t_max, by resolving degree by degree.

    F_s is held as a list of generator degrees and differential values (sets
    of (slot, R)). In degree t, the new generators of F_{s+1} are a basis of
    ker(d_s)_t modulo the image of the existing generators.
    """
    s_max = t_max if s_max is None else s_max
    gens: list[list[int]] = [[0]]
    diffs: list[list[frozenset]] = [[frozenset()]]
    for s in range(1, s_max + 1):
        gens.append([])
        diffs.append([])
    for t in range(t_max + 1):
        for s in range(s_max):
            basis = FreeModuleBasis(gens[s], t)
            if not len(basis):
                continue
            if s == 0:
                # augmentation: A_t -> F_2 kills everything of positive degree
                kernel = [1 << i for i, (_, r) in enumerate(basis.items) if r != ()]
            else:
                tgt = FreeModuleBasis(gens[s - 1], t)
                cols = [tgt.pack(combine_vectors([(k, r)], diffs[s])) if tgt.items else 0
                        for k, r in basis.items]
                kernel = kernel_basis(BitMatrix(len(tgt), len(basis), _transpose(cols, len(tgt))))
            image = EchelonBasis()
            for j, dj in enumerate(gens[s + 1]):
                if dj > t:
                    continue
                for a in milnor_basis(t - dj):
                    image.add(basis.pack(act(a, diffs[s + 1][j])))
            for v in kernel:
                if image.add(v):
                    gens[s + 1].append(t)
                    diffs[s + 1].append(frozenset(basis.items[i] for i in range(len(basis)) if v >> i & 1))
    out = {}
    for s in range(s_max + 1):
        for t in gens[s]:
            if t <= t_max:
                out[(s, t)] = out.get((s, t), 0) + 1
    return out


# ---------- reduced cobar complex ----------

# A cobar cell [a_1 | ... | a_s] is a tuple of nonconstant dual monomials.


def dual_degree(x: tuple) -> int:
    return degree(x)


def cells(s: int, t: int) -> list[tuple]:
    if s == 0:
        return [()] if t == 0 else []
    out = []
    for first in range(1, t - s + 2):
        for a in milnor_basis(first):
            for rest in cells(s - 1, t - first):
                out.append((a,) + rest)
    return out


def _reduced_coproduct(x: tuple) -> frozenset:
    return frozenset(p for p in dual_coproduct(x) if p[0] != () and p[1] != ())


def cobar_differential(cell: tuple) -> frozenset:
    acc: set = set()
    for i, a in enumerate(cell):
        for left, right in _reduced_coproduct(a):
            acc ^= {cell[:i] + (left, right) + cell[i + 1:]}
    return frozenset(acc)


class CobarCohomology:
    """H^{s,t} of the reduced cobar complex of A_*, with juxtaposition products."""

    def __init__(self, t_max: int):
        self.t_max = t_max
        self._cells: dict[tuple[int, int], dict[tuple, int]] = {}
        self._boundaries: dict[tuple[int, int], EchelonBasis] = {}
        self._classes: dict[tuple[int, int], list[int]] = {}

    def index(self, s: int, t: int) -> dict[tuple, int]:
        key = (s, t)
        if key not in self._cells:
            self._cells[key] = {c: i for i, c in enumerate(cells(s, t))}
        return self._cells[key]

    def pack(self, s: int, t: int, chain: Iterable[tuple]) -> int:
        idx = self.index(s, t)
        v = 0
        for c in chain:
            v ^= 1 << idx[c]
        return v

    def boundaries(self, s: int, t: int) -> EchelonBasis:
        key = (s, t)
        if key not in self._boundaries:
            b = EchelonBasis()
            if s > 0:
                for c in self.index(s - 1, t):
                    b.add(self.pack(s, t, cobar_differential(c)))
            self._boundaries[key] = b
        return self._boundaries[key]

    def cocycles(self, s: int, t: int) -> list[int]:
        src = self.index(s, t)
        tgt = self.index(s + 1, t)
        cols = [self.pack(s + 1, t, cobar_differential(c)) for c in src]
        return kernel_basis(BitMatrix(len(tgt), len(src), _transpose(cols, len(tgt))))

    def classes(self, s: int, t: int) -> list[int]:
        """Cocycle representatives of a basis of H^{s,t}."""
        key = (s, t)
        if key not in self._classes:
            span = EchelonBasis()
            for v in self.boundaries(s, t).vectors():
                span.add(v)
            reps = [z for z in self.cocycles(s, t) if span.add(z)]
            self._classes[key] = reps
        return self._classes[key]

    def dim(self, s: int, t: int) -> int:
        return len(self.classes(s, t))

    def unpack(self, s: int, t: int, v: int) -> list[tuple]:
        items = list(self.index(s, t))
        return [items[i] for i in range(len(items)) if v >> i & 1]

    def multiply(self, a: tuple[int, int, int], b: tuple[int, int, int]) -> tuple[int, int, int]:
        """Juxtapose two packed cocycles given as ``(s, t, vector)``."""
        s1, t1, v1 = a
        s2, t2, v2 = b
        acc: set = set()
        for x in self.unpack(s1, t1, v1):
            for y in self.unpack(s2, t2, v2):
                acc ^= {x + y}
        return (s1 + s2, t1 + t2, self.pack(s1 + s2, t1 + t2, acc))

    def is_zero(self, x: tuple[int, int, int]) -> bool:
        s, t, v = x
        return self.boundaries(s, t).reduce(v) == 0

    def add(self, x: tuple[int, int, int], y: tuple[int, int, int]) -> tuple[int, int, int]:
        if x[:2] != y[:2]:
            raise ValueError("classes of different bidegrees")
        return (x[0], x[1], x[2] ^ y[2])

    def h(self, i: int) -> tuple[int, int, int]:
        t = 1 << i
        return (1, t, self.pack(1, t, [((t,),)]))

    def product_rank(self, a: tuple[int, int], b: tuple[int, int]) -> int:
        """dim of the span of all products H^a * H^b inside H^{a+b}."""
        s, t = a[0] + b[0], a[1] + b[1]
        span = EchelonBasis()
        for v in self.boundaries(s, t).vectors():
            span.add(v)
        base = len(span)
        for x in self.classes(*a):
            for y in self.classes(*b):
                span.add(self.multiply((*a, x), (*b, y))[2])
        return len(span) - base
