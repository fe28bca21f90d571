"""The mod 2 Steenrod algebra in the Milnor basis.

Milnor basis elements P(R) are tuples ``R = (r_1, r_2, ...)`` with trailing
zeros trimmed. An element of the algebra is a :class:`MilnorElt`, a set of
such tuples (coefficients are in F_2).

Besides products this module holds the weight filtration, the projection to
the exterior algebra gr(A), and the change of basis between the Milnor basis
and the lifted basis of ordered products of P~^i_j = P(0,..,2^i,..).
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .order import (
    GENERATORS,
    AlgElt,
    encode,
    GrPolynomial,
    Monomial,
    generator,
    iter_bits,
    mask_deg,
    mask_generators,
)

Milnor = tuple  # R = (r_1, r_2, ...)


@dataclass(frozen=True)
class TruncationBound:
    """Work in A_{<=n}: products of total degree above ``n`` vanish."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("truncation degree must be non-negative")


def trim(r: Iterable[int]) -> Milnor:
    r = list(r)
    while r and r[-1] == 0:
        r.pop()
    return tuple(r)


def degree(r: Milnor) -> int:
    return sum(x * ((1 << k) - 1) for k, x in enumerate(r, start=1))


def weight(r: Milnor) -> int:
    """Sum of (2k - 1) over the binary digits of every r_k."""
    return sum((2 * k - 1) * x.bit_count() for k, x in enumerate(r, start=1))


@lru_cache(maxsize=None)
def _product(r: Milnor, s: Milnor) -> frozenset:
    """Milnor's product formula.

    Sums over matrices x_{ij} (i, j >= 0, not both 0) with row sums
    r_i = sum_j 2^j x_{ij} and column sums s_j = sum_i x_{ij}. A matrix
    contributes P(T), t_n = sum_{i+j=n} x_{ij}, when every diagonal
    multinomial is odd, i.e. the entries on each diagonal have disjoint
    binary digits.
    """
    if not r:
        return frozenset((s,))
    if not s:
        return frozenset((r,))
    nr, ns = len(r), len(s)
    ndiag = nr + ns
    bits = [0] * (ndiag + 1)
    sums = [0] * (ndiag + 1)
    colrem = list(s)
    result: set = set()

    def finish():
        # Row 0 takes whatever is left of each column.
        placed = []
        ok = True
        for j in range(1, ns + 1):
            v = colrem[j - 1]
            if bits[j] & v:
                ok = False
                break
            bits[j] |= v
            sums[j] += v
            placed.append((j, v))
        if ok:
            result.symmetric_difference_update((trim(sums[1:]),))
        for j, v in placed:
            bits[j] ^= v
            sums[j] -= v

    def row(i: int):
        if i > nr:
            finish()
            return
        cols(i, 1, r[i - 1])

    def cols(i: int, j: int, remaining: int):
        if j > ns:
            # x_{i0} absorbs the rest of r_i.
            if bits[i] & remaining:
                return
            bits[i] |= remaining
            sums[i] += remaining
            row(i + 1)
            bits[i] ^= remaining
            sums[i] -= remaining
            return
        n = i + j
        top = min(colrem[j - 1], remaining >> j)
        for x in range(top + 1):
            if bits[n] & x:
                continue
            bits[n] |= x
            sums[n] += x
            colrem[j - 1] -= x
            cols(i, j + 1, remaining - (x << j))
            colrem[j - 1] += x
            sums[n] -= x
            bits[n] ^= x

    row(1)
    return frozenset(result)


def milnor_product(a: Milnor, b: Milnor, trunc: TruncationBound | None = None) -> "MilnorElt":
    a, b = trim(a), trim(b)
    if trunc is not None and degree(a) + degree(b) > trunc.n:
        return MilnorElt()
    return MilnorElt(_product(a, b))


class MilnorElt:
    """An element of the Steenrod algebra: a set of Milnor basis tuples."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Milnor] = ()):
        acc: set = set()
        for t in terms:
            acc ^= {trim(t)}
        self.terms = frozenset(acc)

    @classmethod
    def basis(cls, r: Iterable[int]) -> "MilnorElt":
        return cls((tuple(r),))

    @classmethod
    def sq(cls, n: int) -> "MilnorElt":
        return cls(((n,),)) if n else cls(((),))

    @classmethod
    def parse(cls, text: str) -> "MilnorElt":
        return parse_milnor(text)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, MilnorElt):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __add__(self, other: "MilnorElt") -> "MilnorElt":
        out = MilnorElt()
        out.terms = self.terms ^ other.terms
        return out

    __sub__ = __add__

    def __mul__(self, other: "MilnorElt") -> "MilnorElt":
        return milnor_product_elt(self, other)

    def degrees(self) -> set[int]:
        return {degree(t) for t in self.terms}

    @property
    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def sorted_terms(self) -> list[Milnor]:
        return sorted(self.terms, key=lambda t: (degree(t), t))

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join("P(" + ",".join(map(str, t)) + ")" for t in self.sorted_terms())

    def __repr__(self):
        return f"MilnorElt({self})"


def milnor_product_elt(a: MilnorElt, b: MilnorElt, trunc: TruncationBound | None = None) -> MilnorElt:
    acc: set = set()
    for r in a.terms:
        dr = degree(r)
        for s in b.terms:
            if trunc is not None and dr + degree(s) > trunc.n:
                continue
            acc ^= _product(r, s)
    out = MilnorElt()
    out.terms = frozenset(acc)
    return out


def sq_product(*ns: int) -> MilnorElt:
    """Sq^{n_1} Sq^{n_2} ... evaluated in the Milnor basis."""
    out = MilnorElt.sq(0)
    for n in ns:
        out = out * MilnorElt.sq(n)
    return out


def binom2(n: int, k: int) -> int:
    """Binomial coefficient mod 2 (Lucas): 1 iff k's bits are a subset of n's."""
    if k < 0 or n < 0 or k > n:
        return 0
    return 1 if (n & k) == k else 0


def adem_expand(i: int, j: int) -> MilnorElt:
    """Right-hand side of the Adem relation for Sq^i Sq^j, in the Milnor basis."""
    if not (0 < i < 2 * j):
        raise ValueError(f"Adem relation needs 0 < i < 2j, got i={i}, j={j}")
    out = MilnorElt()
    for k in range(i // 2 + 1):
        if binom2(j - k - 1, i - 2 * k):
            out = out + sq_product(i + j - k, k)
    return out


INFINITY = float("inf")


def filtration_v(x: MilnorElt):
    """Minimal weight of a term; +inf for zero."""
    if not x.terms:
        return INFINITY
    return min(weight(t) for t in x.terms)


# ---------- gr(A) and the lifted basis ----------


def milnor_to_mask(r: Milnor) -> int:
    """The square-free monomial prod P^i_j over the binary digits 2^i of r_j."""
    mask = 0
    for j, x in enumerate(r, start=1):
        i = 0
        while x:
            if x & 1:
                mask |= generator(i, j).bit
            x >>= 1
            i += 1
    return mask


def mask_to_milnor(mask: int) -> Milnor:
    r: list[int] = []
    for g in mask_generators(mask):
        while len(r) < g.j:
            r.append(0)
        r[g.j - 1] += 1 << g.i
    return tuple(r)


def pr(x: MilnorElt) -> GrPolynomial:
    """Projection of ``x`` to gr(A); zero maps to zero."""
    if not x.terms:
        return GrPolynomial(())
    w = filtration_v(x)
    monos = [Monomial.from_mask(milnor_to_mask(t)) for t in x.terms if weight(t) == w]
    monos.sort(reverse=True)
    return GrPolynomial(tuple(monos))


@lru_cache(maxsize=None)
def _lift_mask(mask: int) -> frozenset:
    """Milnor expansion of the ordered product of P~ factors of ``mask``."""
    acc = frozenset(((),))
    for b in iter_bits(mask):
        g = mask_generators(b)[0]
        r = [0] * g.j
        r[g.j - 1] = 1 << g.i
        tail = tuple(r)
        nxt: set = set()
        for t in acc:
            nxt ^= _product(t, tail)
        acc = frozenset(nxt)
    lead = mask_to_milnor(mask)
    w = weight(lead)
    if lead not in acc or any(weight(t) <= w for t in acc if t != lead):
        raise AssertionError(f"lift of {mask_generators(mask)} does not project to its monomial")
    return acc


def pst_monomial_lift(m: Monomial | int, trunc: TruncationBound | None = None) -> MilnorElt:
    mask = m if isinstance(m, int) else m.mask
    if trunc is not None and mask_deg(mask) > trunc.n:
        return MilnorElt()
    out = MilnorElt()
    out.terms = _lift_mask(mask)
    return out


def milnor_to_masks(terms: Iterable[Milnor]) -> frozenset:
    """Coordinates of a Milnor-basis sum in the lifted basis, as masks."""
    out: set = set()
    for t in terms:
        out.symmetric_difference_update(_basis_to_masks(t))
    return frozenset(out)


@lru_cache(maxsize=None)
def _basis_to_masks(r: Milnor) -> frozenset:
    # The lift of mask(R) is P(R) plus terms of larger weight, so peeling off
    # the lowest (weight, R) term terminates.
    x = {r}
    out: set = set()
    while x:
        t = min(x, key=lambda u: (weight(u), u))
        mask = milnor_to_mask(t)
        out ^= {mask}
        x ^= _lift_mask(mask)
    return frozenset(out)


def masks_to_milnor(masks: Iterable[int]) -> frozenset:
    acc: set = set()
    for m in masks:
        acc ^= _lift_mask(m)
    return frozenset(acc)


def milnor_to_pst(x: MilnorElt, trunc: TruncationBound | None = None):
    terms = x.terms
    if trunc is not None:
        terms = [t for t in terms if degree(t) <= trunc.n]
    return AlgElt(frozenset(encode(0, m) for m in milnor_to_masks(terms)))


def pst_to_milnor(a, trunc: TruncationBound | None = None) -> MilnorElt:
    masks = []
    for slot, m in a.terms():
        if slot != 0:
            raise ValueError("pst_to_milnor expects an element of A (slot 0)")
        if trunc is None or mask_deg(m) <= trunc.n:
            masks.append(m)
    out = MilnorElt()
    out.terms = masks_to_milnor(masks)
    return out


# Products of lifted basis monomials, the dominant hot path of the Groebner
# engine. The table is a pure function of its key, so concurrent writers can
# only ever store identical values.
_PST_PRODUCTS: dict[tuple[int, int], tuple[int, ...]] = {}
_PST_LOCK = threading.Lock()


def pst_product(a: int, b: int) -> tuple[int, ...]:
    """m~_a * m~_b expressed in the lifted basis, as a tuple of masks."""
    key = (a, b)
    hit = _PST_PRODUCTS.get(key)
    if hit is not None:
        return hit
    if not a:
        res = (b,)
    elif not b:
        res = (a,)
    else:
        acc: set = set()
        la, lb = _lift_mask(a), _lift_mask(b)
        for r in la:
            for s in lb:
                acc ^= _product(r, s)
        res = tuple(sorted(milnor_to_masks(acc)))
    with _PST_LOCK:
        _PST_PRODUCTS.setdefault(key, res)
    return res


def pst_square(rank: int) -> tuple[int, ...]:
    """(P~^i_j)^2 in the lifted basis, for the generator of the given rank."""
    b = GENERATORS[rank].bit
    return pst_product(b, b)


def cache_info() -> dict[str, int]:
    return {
        "milnor_products": _product.cache_info().currsize,
        "pst_products": len(_PST_PRODUCTS),
        "basis_changes": _basis_to_masks.cache_info().currsize,
    }


# ---------- text syntax ----------

_TERM = re.compile(r"(Sq|P)\(([^)]*)\)")


def parse_milnor(text: str) -> MilnorElt:
    """Parse sums of products like ``Sq(2)*Sq(2) + P(1,1)``; ``0`` and ``1`` allowed."""
    text = text.strip()
    out = MilnorElt()
    if text == "0" or not text:
        return out
    for summand in text.split("+"):
        prod = MilnorElt.sq(0)
        for factor in summand.split("*"):
            factor = factor.strip()
            if factor == "1":
                continue
            m = _TERM.fullmatch(factor)
            if not m:
                raise ValueError(f"cannot parse {factor!r}")
            args = [int(a) for a in m.group(2).split(",") if a.strip()]
            if m.group(1) == "Sq":
                if len(args) != 1:
                    raise ValueError("Sq takes one argument")
                f = MilnorElt.sq(args[0])
            else:
                f = MilnorElt.basis(args)
            prod = prod * f
        out = out + prod
    return out
