"""Monomials of gr(A) = E[P^i_j] and the degree-reversed monomial ordering.

Square-free monomials are stored as integer bitmasks. The generator of rank
``r`` (ranks ascend with internal degree) occupies bit ``WIDTH - 1 - r``;
this reversal makes "lexicographically greater" coincide with "numerically
greater", so the ordering becomes an integer comparison.

A term ``m * e_slot`` of a free module is packed into a single integer whose
natural order is the module monomial ordering:

* a lower slot index is larger,
* within one slot, smaller filtration degree is larger,
* within one filtration degree, the lexicographically smaller monomial is
  larger (lex scans ascending rank; a larger exponent wins).

Free-module elements over F_2 are then just sets of such integers and the
leading term is ``max``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Iterator

WIDTH = 64
FULL = (1 << WIDTH) - 1
FDEG_BITS = 16
FDEG_LIMIT = 1 << FDEG_BITS
SLOT_SHIFT = WIDTH + FDEG_BITS
SLOT_LIMIT = 1 << 40
MONO_MASK = (1 << SLOT_SHIFT) - 1


@dataclass(frozen=True)
class Generator:
    """The exterior generator P^i_j of gr(A)."""

    i: int
    j: int
    deg: int
    fdeg: int
    rank: int

    @property
    def bit(self) -> int:
        return 1 << (WIDTH - 1 - self.rank)

    def __str__(self):
        return f"P({self.i},{self.j})"


def _build_generators() -> list[Generator]:
    cands = []
    for j in range(1, 40):
        for i in range(0, 40):
            d = (1 << i) * ((1 << j) - 1)
            if d < (1 << 40):
                cands.append((d, i, j))
    cands.sort()
    return [Generator(i, j, d, 2 * j - 1, r) for r, (d, i, j) in enumerate(cands[:WIDTH])]


GENERATORS: list[Generator] = _build_generators()
# Every generator of degree <= MAX_DEGREE is representable.
MAX_DEGREE: int = min(
    (1 << i) * ((1 << j) - 1)
    for j in range(1, 40)
    for i in range(40)
    if not any(g.i == i and g.j == j for g in GENERATORS)
) - 1
_BY_IJ = {(g.i, g.j): g for g in GENERATORS}
_BY_BIT = {g.bit: g for g in GENERATORS}


def generator(i: int, j: int) -> Generator:
    try:
        return _BY_IJ[(i, j)]
    except KeyError:
        raise ValueError(f"P^{i}_{j} is outside the supported generator range") from None


def generators_upto(n: int) -> list[Generator]:
    """Generators with internal degree <= n, ascending rank."""
    if n > MAX_DEGREE:
        raise ValueError(f"degree {n} exceeds supported maximum {MAX_DEGREE}")
    return [g for g in GENERATORS if g.deg <= n]


# ---------- bitmask monomials ----------

_deg_cache: dict[int, int] = {0: 0}
_fdeg_cache: dict[int, int] = {0: 0}


def iter_bits(mask: int) -> Iterator[int]:
    """Single-bit masks of ``mask`` in ascending generator rank."""
    while mask:
        top = 1 << (mask.bit_length() - 1)
        yield top
        mask ^= top


def mask_deg(mask: int) -> int:
    d = _deg_cache.get(mask)
    if d is None:
        d = sum(_BY_BIT[b].deg for b in iter_bits(mask))
        _deg_cache[mask] = d
    return d


def mask_fdeg(mask: int) -> int:
    d = _fdeg_cache.get(mask)
    if d is None:
        d = sum(_BY_BIT[b].fdeg for b in iter_bits(mask))
        _fdeg_cache[mask] = d
    return d


def mask_generators(mask: int) -> list[Generator]:
    return [_BY_BIT[b] for b in iter_bits(mask)]


def mask_from_ij(pairs: Iterable[tuple[int, int]]) -> int:
    mask = 0
    for i, j in pairs:
        b = generator(i, j).bit
        if mask & b:
            raise ValueError("monomial is not square-free")
        mask |= b
    return mask


def mono_key(mask: int) -> int:
    """Integer key whose order is the monomial ordering on square-free masks."""
    return ((FDEG_LIMIT - 1 - mask_fdeg(mask)) << WIDTH) | (FULL ^ mask)


def encode(slot: int, mask: int) -> int:
    return ((SLOT_LIMIT - 1 - slot) << SLOT_SHIFT) | mono_key(mask)


def term_slot(term: int) -> int:
    return SLOT_LIMIT - 1 - (term >> SLOT_SHIFT)


def term_mask(term: int) -> int:
    return (term & FULL) ^ FULL


def reslot(term: int, delta: int) -> int:
    """The same monomial moved from slot ``s`` to slot ``s + delta``."""
    return term - (delta << SLOT_SHIFT)


def mask_str(mask: int) -> str:
    if not mask:
        return "1"
    return "*".join(str(g) for g in mask_generators(mask))


_PIJ = re.compile(r"P\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_mask(text: str) -> int:
    text = text.strip()
    if text == "1":
        return 0
    pairs = []
    for factor in text.split("*"):
        m = _PIJ.fullmatch(factor.strip())
        if not m:
            raise ValueError(f"bad monomial factor {factor!r}")
        pairs.append((int(m.group(1)), int(m.group(2))))
    return mask_from_ij(pairs)


# ---------- general monomials (exponents allowed) ----------


@total_ordering
@dataclass(frozen=True)
class Monomial:
    """A monomial of k[P^i_j] as a sorted tuple of (rank, exponent).

    Only square-free monomials are basis elements; exponent 2 shows up when
    forming lcms against the relations (P^i_j)^2.
    """

    exps: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_mask(cls, mask: int) -> "Monomial":
        return cls(tuple((g.rank, 1) for g in mask_generators(mask)))

    @classmethod
    def parse(cls, text: str) -> "Monomial":
        return cls.from_mask(parse_mask(text))

    @classmethod
    def gen(cls, i: int, j: int, e: int = 1) -> "Monomial":
        return cls(((generator(i, j).rank, e),))

    @property
    def is_square_free(self) -> bool:
        return all(e == 1 for _, e in self.exps)

    @property
    def mask(self) -> int:
        if not self.is_square_free:
            raise ValueError("only square-free monomials have a mask")
        m = 0
        for r, _ in self.exps:
            m |= GENERATORS[r].bit
        return m

    @property
    def deg(self) -> int:
        return sum(GENERATORS[r].deg * e for r, e in self.exps)

    @property
    def fdeg(self) -> int:
        return sum(GENERATORS[r].fdeg * e for r, e in self.exps)

    def _dict(self) -> dict[int, int]:
        return dict(self.exps)

    def divides(self, other: "Monomial") -> bool:
        o = other._dict()
        return all(o.get(r, 0) >= e for r, e in self.exps)

    def lcm(self, other: "Monomial") -> "Monomial":
        d = self._dict()
        for r, e in other.exps:
            d[r] = max(d.get(r, 0), e)
        return Monomial(tuple(sorted(d.items())))

    def __mul__(self, other: "Monomial") -> "Monomial":
        d = self._dict()
        for r, e in other.exps:
            d[r] = d.get(r, 0) + e
        return Monomial(tuple(sorted(d.items())))

    def quotient(self, divisor: "Monomial") -> "Monomial":
        if not divisor.divides(self):
            raise ValueError(f"{divisor} does not divide {self}")
        d = self._dict()
        for r, e in divisor.exps:
            d[r] -= e
        return Monomial(tuple(sorted((r, e) for r, e in d.items() if e)))

    def _lex_vector(self, ranks: list[int]) -> list[int]:
        d = self._dict()
        return [d.get(r, 0) for r in ranks]

    def __lt__(self, other: "Monomial") -> bool:
        return cmp_monomial(self, other) < 0

    def __str__(self):
        if not self.exps:
            return "1"
        parts = []
        for r, e in self.exps:
            g = GENERATORS[r]
            parts.append(f"{g}" if e == 1 else f"{g}^{e}")
        return "*".join(parts)


PstMonomial = Monomial


def cmp_monomial(a: Monomial, b: Monomial) -> int:
    """-1, 0 or 1 as ``a`` is smaller than, equal to or larger than ``b``.

    Larger filtration degree means smaller; equal filtration degree is
    decided by reversed lex (``a >_lex b`` means ``a < b``).
    """
    if a.fdeg != b.fdeg:
        return -1 if a.fdeg > b.fdeg else 1
    ranks = sorted({r for r, _ in a.exps} | {r for r, _ in b.exps})
    va, vb = a._lex_vector(ranks), b._lex_vector(ranks)
    if va == vb:
        return 0
    return -1 if va > vb else 1


@total_ordering
@dataclass(frozen=True)
class ModMonomial:
    """``m * e_slot``; slots are 0-based here and printed 1-based."""

    m: Monomial
    slot: int

    def divides(self, other: "ModMonomial") -> bool:
        return self.slot == other.slot and self.m.divides(other.m)

    def lcm(self, other: "ModMonomial") -> "ModMonomial":
        if self.slot != other.slot:
            raise ValueError("lcm needs a common slot")
        return ModMonomial(self.m.lcm(other.m), self.slot)

    def quotient(self, divisor: "ModMonomial") -> Monomial:
        if self.slot != divisor.slot:
            raise ValueError("quotient needs a common slot")
        return self.m.quotient(divisor.m)

    def __lt__(self, other: "ModMonomial") -> bool:
        return cmp_mod_monomial(self, other) < 0

    def __str__(self):
        return f"{self.m}*e{self.slot + 1}"


def cmp_mod_monomial(a: ModMonomial, b: ModMonomial) -> int:
    if a.slot != b.slot:
        return -1 if a.slot > b.slot else 1
    return cmp_monomial(a.m, b.m)


# ---------- elements ----------


class FreeElt:
    """An F_2-combination of lifted basis elements m~ e_slot.

    Stored as a frozenset of packed terms; ``terms()`` lists them descending.
    An element of A itself is a FreeElt living in slot 0.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[int] = ()):
        self._terms = terms if isinstance(terms, frozenset) else frozenset(terms)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "FreeElt":
        """From ``(slot, mask)`` pairs, cancelling duplicates."""
        acc: set[int] = set()
        for slot, mask in pairs:
            acc ^= {encode(slot, mask)}
        return cls(acc)

    @property
    def raw(self) -> frozenset:
        return self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, FreeElt):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __add__(self, other: "FreeElt") -> "FreeElt":
        return FreeElt(self._terms ^ other._terms)

    __sub__ = __add__

    def terms(self) -> list[tuple[int, int]]:
        return [(term_slot(t), term_mask(t)) for t in sorted(self._terms, reverse=True)]

    def mod_monomials(self) -> list[ModMonomial]:
        return [ModMonomial(Monomial.from_mask(m), s) for s, m in self.terms()]

    def leading(self) -> ModMonomial:
        if not self._terms:
            raise ValueError("zero element has no leading monomial")
        t = max(self._terms)
        return ModMonomial(Monomial.from_mask(term_mask(t)), term_slot(t))

    def pr_elt(self) -> "GrPolynomial":
        """Projection to gr: the terms of minimal filtration degree.

        For a free module the leading slot is kept as well, so the result is
        the part of the element visible to the leading-monomial map.
        """
        if not self._terms:
            return GrPolynomial(())
        lead = max(self._terms)
        slot = term_slot(lead)
        fd = mask_fdeg(term_mask(lead))
        keep = [t for t in self._terms if term_slot(t) == slot and mask_fdeg(term_mask(t)) == fd]
        return GrPolynomial(tuple(Monomial.from_mask(term_mask(t)) for t in sorted(keep, reverse=True)))

    def __repr__(self):
        return f"FreeElt({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{mask_str(m)}*e{s + 1}" for s, m in self.terms())


AlgElt = FreeElt


@dataclass(frozen=True)
class GrPolynomial:
    """An element of gr(A) over F_2, terms strictly descending."""

    terms: tuple[Monomial, ...]

    def __post_init__(self):
        for a, b in zip(self.terms, self.terms[1:]):
            if not cmp_monomial(a, b) > 0:
                raise ValueError("terms must be strictly descending")

    def __bool__(self):
        return bool(self.terms)

    def leading(self) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return self.terms[0]

    def __str__(self):
        return " + ".join(map(str, self.terms)) if self.terms else "0"


_by_degree: dict[int, tuple[int, ...]] = {}


def monomials_of_degree(d: int) -> tuple[int, ...]:
    """All square-free masks of internal degree ``d``, descending in the ordering."""
    hit = _by_degree.get(d)
    if hit is not None:
        return hit
    if d < 0:
        return ()
    gens = generators_upto(d)
    out: list[int] = []

    def rec(k: int, mask: int, rest: int):
        if rest == 0:
            out.append(mask)
            return
        for i in range(k, len(gens)):
            g = gens[i]
            if g.deg > rest:
                break
            rec(i + 1, mask | g.bit, rest - g.deg)

    rec(0, 0, d)
    out.sort(key=mono_key, reverse=True)
    _by_degree[d] = tuple(out)
    return _by_degree[d]
