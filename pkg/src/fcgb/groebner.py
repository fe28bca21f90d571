"""Groebner bases of left submodules of free modules over A_{<=n}.

Elements are frozensets of packed terms (see :mod:`fcgb.order`). The engine
works degree by degree: critical pairs are kept in a heap keyed by the
internal degree of their lcm, and all pairs of one degree are reduced against
a frozen snapshot before being merged in a canonical order. Results are
therefore independent of pair insertion order and of the worker count.
"""

from __future__ import annotations

import heapq
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .order import (
    MONO_MASK,
    FreeElt,
    encode,
    iter_bits,
    mask_deg,
    mask_str,
    mono_key,
    term_mask,
    term_slot,
)
from .order import GENERATORS, _BY_BIT  # noqa: F401  (rank lookup)
from .milnor import pst_product

Terms = frozenset


class GroebnerError(ValueError):
    pass


# pst_product results with every mask already turned into its ordering key
_KEYED: dict[tuple[int, int], tuple[int, ...]] = {}


def _keyed_product(q: int, m: int) -> tuple[int, ...]:
    hit = _KEYED.get((q, m))
    if hit is None:
        hit = _KEYED[(q, m)] = tuple(mono_key(r) for r in pst_product(q, m))
    return hit


def mul_mask(q: int, terms: Iterable[int]) -> frozenset:
    """q~ * x for a basis monomial q and an element x."""
    if not q:
        return terms if isinstance(terms, frozenset) else frozenset(terms)
    acc: set = set()
    for t in terms:
        high = t & ~MONO_MASK
        keys = _keyed_product(q, term_mask(t))
        if high:
            acc.symmetric_difference_update([high | k for k in keys])
        else:
            acc.symmetric_difference_update(keys)
    return frozenset(acc)


def mul_elt(a: Iterable[int], x: Iterable[int]) -> frozenset:
    """a * x for ``a`` an element of A given by slot-0 terms."""
    acc: set = set()
    for t in a:
        acc.symmetric_difference_update(mul_mask(term_mask(t), x))
    return frozenset(acc)


def combine(vector: Iterable[int], elements: Sequence[Iterable[int]]) -> frozenset:
    """sum_k vector_k * elements[k] for a vector over A^s."""
    acc: set = set()
    for t in vector:
        acc.symmetric_difference_update(mul_mask(term_mask(t), elements[term_slot(t)]))
    return frozenset(acc)


@dataclass
class GBEntry:
    elt: frozenset
    lead: int
    degree: int
    origin: tuple
    tag: frozenset | None = None

    @property
    def slot(self) -> int:
        return term_slot(self.lead)

    @property
    def lead_mask(self) -> int:
        return term_mask(self.lead)


@dataclass
class SyzygyRecord:
    kind: str  # "g" for a relation pair, "s" for an overlap pair
    pair: tuple
    vector: FreeElt


@dataclass(order=True)
class _Pair:
    degree: int
    seq: int
    kind: str = field(compare=False)
    a: int = field(compare=False)
    b: int = field(compare=False)  # entry index for "s", generator rank for "g"
    square: bool = field(default=False, compare=False)

    @property
    def provenance(self):
        return (self.kind, self.a, self.b, self.square)


class GroebnerData:
    """An ordered Groebner basis under construction.

    ``slot_degrees`` gives the internal degree of each basis vector e_i and
    may grow while the basis is being built. Pairs above ``deg_cap`` are
    discarded as they are created.
    """

    def __init__(
        self,
        slot_degrees: Mapping[int, int] | Callable[[int], int],
        deg_cap: int,
        *,
        literal_pairs: bool = False,
        triple: bool = False,
        threads: int = 1,
        track: bool = False,
        syzygies: bool = False,
        keep_multiples: bool = True,
        memo: bool = True,
    ):
        self._sdeg = slot_degrees if callable(slot_degrees) else slot_degrees.__getitem__
        self.deg_cap = deg_cap
        self.literal_pairs = literal_pairs
        self.triple = triple
        self.threads = max(1, int(threads))
        self.track = track
        self.syzygies = syzygies
        self.keep_multiples = keep_multiples
        self.memo = memo
        self.entries: list[GBEntry] = []
        self._leads: dict[int, list[tuple[int, int]]] = {}
        self._pairs: list[_Pair] = []
        self._seq = 0
        self._red_cache: dict[int, object] = {}
        self._mult: dict[tuple[int, int], frozenset] = {}
        self.records: list[SyzygyRecord] = []
        self.stats = {"pairs": 0, "pruned": 0, "zero": 0}
        # normal forms of single terms, packed over the standard terms met so far
        self._lock = threading.Lock()
        self._nf: dict[int, int] = {}
        self._cols: dict[int, int] = {}
        self._col_terms: list[int] = []
        self._cache_degree = None

    # ----- basic queries -----

    def __len__(self):
        return len(self.entries)

    def degree_of(self, terms: Iterable[int]) -> int:
        t = max(terms)
        return mask_deg(term_mask(t)) + self._sdeg(term_slot(t))

    def leads(self) -> list[int]:
        return [e.lead for e in self.entries]

    def pending(self) -> int:
        return len(self._pairs)

    def next_degree(self) -> int | None:
        return self._pairs[0].degree if self._pairs else None

    # ----- multiplication and reduction -----

    def multiple(self, q: int, idx: int) -> frozenset:
        if not self.keep_multiples:
            return mul_mask(q, self.entries[idx].elt)
        key = (q, idx)
        hit = self._mult.get(key)
        if hit is None:
            hit = mul_mask(q, self.entries[idx].elt)
            self._mult[key] = hit
        return hit

    def find_reducer(self, term: int) -> tuple[int, int] | None:
        """(entry index, quotient mask) of the first entry whose lead divides ``term``."""
        hit = self._red_cache.get(term)
        if type(hit) is tuple:
            return hit
        start = hit or 0
        leads = self._leads.get(term_slot(term))
        if not leads:
            return None
        mask = term_mask(term)
        for k in range(start, len(leads)):
            lm, idx = leads[k]
            if not lm & ~mask:
                found = (idx, mask ^ lm)
                self._red_cache[term] = found
                return found
        self._red_cache[term] = len(leads)
        return None

    def reduce(self, terms: Iterable[int], record: bool = False):
        """Full reduction; with ``record`` also the (quotient mask, entry) steps.

        The largest reducible term is always eliminated next, using the
        first entry of the basis that reduces it. The remainder is then a
        linear function of the input, which the memoized path exploits.
        """
        if record or not self.memo:
            return self._reduce_heap(terms, record)
        terms = terms if isinstance(terms, (set, frozenset)) else set(terms)
        if not terms:
            return frozenset()
        self._use_degree(self.degree_of(terms))
        v = 0
        nf = self._nf
        for t in terms:
            x = nf.get(t)
            v ^= x if x is not None else self._nf_term(t)
        return self._unpack(v)

    def _reduce_heap(self, terms: Iterable[int], record: bool):
        cur = set(terms)
        heap = [-t for t in cur]
        heapq.heapify(heap)
        quotients = [] if record else None
        find = self.find_reducer
        while heap:
            t = -heapq.heappop(heap)
            if t not in cur:
                continue
            red = find(t)
            if red is None:
                continue
            idx, q = red
            prod = self.multiple(q, idx)
            added = prod.difference(cur)
            cur.symmetric_difference_update(prod)
            for a in added:
                heapq.heappush(heap, -a)
            if record:
                quotients.append((q, idx))
        rem = frozenset(cur)
        return (rem, quotients) if record else rem

    def _use_degree(self, d: int) -> None:
        """Caches only serve one degree at a time; switching drops them."""
        if d == self._cache_degree:
            return
        with self._lock:
            if d != self._cache_degree:
                self._clear_memo()
                self._mult.clear()
                self._red_cache.clear()
                self._cache_degree = d

    def _clear_memo(self) -> None:
        self._nf = {}
        self._cols = {}
        self._col_terms = []

    def _nf_term(self, t: int) -> int:
        nf = self._nf
        stack = [t]
        while stack:
            u = stack[-1]
            if u in nf:
                stack.pop()
                continue
            red = self.find_reducer(u)
            if red is None:
                nf[u] = self._column(u)
                stack.pop()
                continue
            tail = self.multiple(red[1], red[0])
            missing = [w for w in tail if w != u and w not in nf]
            if missing:
                stack.extend(missing)
                continue
            v = 0
            for w in tail:
                if w != u:
                    v ^= nf[w]
            nf[u] = v
            stack.pop()
        return nf[t]

    def _column(self, u: int) -> int:
        if self.threads > 1:
            with self._lock:
                return self._new_column(u)
        return self._new_column(u)

    def _new_column(self, u: int) -> int:
        c = self._cols.get(u)
        if c is None:
            c = self._cols[u] = len(self._col_terms)
            self._col_terms.append(u)
        return 1 << c

    def _unpack(self, v: int) -> frozenset:
        if not v:
            return frozenset()
        cols = self._col_terms
        s = bin(v)
        top = len(s) - 1
        out = []
        i = s.find("1", 2)
        while i != -1:
            out.append(cols[top - i])
            i = s.find("1", i + 1)
        return frozenset(out)

    def is_reducible(self, terms: Iterable[int]) -> bool:
        return any(self.find_reducer(t) is not None for t in terms)

    def quotient_tag(self, quotients, start: frozenset = frozenset()) -> frozenset:
        acc = set(start)
        for q, idx in quotients:
            acc.symmetric_difference_update(mul_mask(q, self.entries[idx].tag))
        return frozenset(acc)

    # ----- growth -----

    def add(self, terms: Iterable[int], origin: tuple = ("input",), tag: frozenset | None = None,
            check_growth: bool = False) -> int:
        """Append an element as it is (no reduction) and queue its pairs."""
        terms = frozenset(terms)
        if not terms:
            raise GroebnerError("cannot add zero to a Groebner basis")
        if self.track and tag is None:
            raise GroebnerError("tracked basis needs a tag for every entry")
        lead = max(terms)
        slot, lm = term_slot(lead), term_mask(lead)
        if check_growth and self.find_reducer(lead) is not None:
            raise GroebnerError("leading monomial ideal did not grow")
        idx = len(self.entries)
        with self._lock:
            self._clear_memo()
        entry = GBEntry(terms, lead, mask_deg(lm) + self._sdeg(slot), origin, tag)
        self.entries.append(entry)
        self._queue_pairs(idx, -1, self.deg_cap)
        self._leads.setdefault(slot, []).append((lm, idx))
        return idx

    def _queue_pairs(self, idx: int, lo: int, hi: int) -> None:
        """Queue the pairs of entry ``idx`` with earlier entries, for degrees in (lo, hi]."""
        entry = self.entries[idx]
        lm = entry.lead_mask
        for b in iter_bits(lm):
            d = entry.degree + mask_deg(b)
            if lo < d <= hi:
                self._push(d, "g", idx, _BY_BIT[b].rank)
        if self.literal_pairs:
            for g in GENERATORS:
                d = entry.degree + 2 * g.deg
                if d > hi:
                    break
                if d > lo and not lm & g.bit:
                    self._push(d, "g", idx, g.rank, square=True)
        for olm, oidx in self._leads.get(entry.slot, ()):
            if oidx >= idx:
                break
            d = entry.degree + mask_deg(olm & ~lm)
            if lo < d <= hi:
                self._push(d, "s", oidx, idx)

    def raise_cap(self, new_cap: int) -> None:
        """Extend the degree cap, queueing pairs that the old cap discarded."""
        if new_cap <= self.deg_cap:
            return
        old, self.deg_cap = self.deg_cap, new_cap
        for idx in range(len(self.entries)):
            self._queue_pairs(idx, old, new_cap)

    def drop_pairs_upto(self, degree: int) -> None:
        """Forget queued pairs of degree <= ``degree`` (already handled elsewhere)."""
        self._pairs = [p for p in self._pairs if p.degree > degree]
        heapq.heapify(self._pairs)

    def _push(self, degree, kind, a, b, square=False):
        heapq.heappush(self._pairs, _Pair(degree, self._seq, kind, a, b, square))
        self._seq += 1

    def pair_element(self, p: _Pair) -> tuple[frozenset, frozenset | None, frozenset]:
        """(element, tag, syzygy seed) of a critical pair before reduction."""
        ea = self.entries[p.a]
        if p.kind == "g":
            bit = GENERATORS[p.b].bit
            if p.square:
                elt = mul_mask(bit, mul_mask(bit, ea.elt))
                qterms = frozenset(encode(p.a, m) for m in pst_product(bit, bit))
            else:
                elt = self.multiple(bit, p.a)
                qterms = frozenset((encode(p.a, bit),))
            tag = mul_elt(_rebase(qterms), ea.tag) if self.track else None
            return elt, tag, qterms
        eb = self.entries[p.b]
        la, lb = ea.lead_mask, eb.lead_mask
        ta, tb = lb & ~la, la & ~lb
        elt = self.multiple(ta, p.a) ^ self.multiple(tb, p.b)
        seed = frozenset((encode(p.a, ta), encode(p.b, tb)))
        tag = None
        if self.track:
            tag = mul_mask(ta, ea.tag) ^ mul_mask(tb, eb.tag)
        return elt, tag, seed

    def _chain_criterion(self, p: _Pair) -> bool:
        ea, eb = self.entries[p.a], self.entries[p.b]
        la, lb = ea.lead_mask, eb.lead_mask
        L = la | lb
        for lk, k in self._leads.get(ea.slot, ()):
            if k == p.a or k == p.b or lk & ~L:
                continue
            if (la | lk) != L and (lb | lk) != L:
                return True
        return False

    def _reduce_pair(self, p: _Pair):
        elt, tag, seed = self.pair_element(p)
        if self.track or self.syzygies:
            rem, quot = self.reduce(elt, record=True)
        else:
            rem, quot = self.reduce(elt), None
        return p, rem, quot, tag, seed

    def process_degree(self, degree: int) -> list[int]:
        """Handle every queued pair of the given degree; return new entry indices."""
        batch = []
        while self._pairs and self._pairs[0].degree == degree:
            batch.append(heapq.heappop(self._pairs))
        if self._pairs and self._pairs[0].degree < degree:
            raise GroebnerError("pairs of a lower degree are still pending")
        if self.triple:
            kept = [p for p in batch if p.kind != "s" or not self._chain_criterion(p)]
            self.stats["pruned"] += len(batch) - len(kept)
            batch = kept
        self.stats["pairs"] += len(batch)
        self._use_degree(degree)
        if self.threads > 1 and len(batch) > 1:
            with ThreadPoolExecutor(self.threads) as pool:
                results = list(pool.map(self._reduce_pair, batch))
        else:
            results = [self._reduce_pair(p) for p in batch]
        results.sort(key=lambda r: (-(max(r[1]) if r[1] else -1), r[0].provenance))
        new = []
        for p, rem, quot, tag, seed in results:
            if rem and quot is not None:
                rem, more = self.reduce(rem, record=True)
                quot = quot + more
            elif rem:
                rem = self.reduce(rem)
            if rem:
                tag_new = self.quotient_tag(quot, tag) if self.track else None
                idx = self.add(rem, (p.kind, p.a, p.b), tag_new, check_growth=True)
                new.append(idx)
                if self.syzygies:
                    self._record(p, seed, quot, extra=idx)
            else:
                self.stats["zero"] += 1
                if self.syzygies:
                    self._record(p, seed, quot)
        return new

    def _record(self, p: _Pair, seed: frozenset, quot, extra=None):
        acc = set(seed)
        for q, idx in quot:
            acc ^= {encode(idx, q)}
        if extra is not None:
            acc ^= {encode(extra, 0)}
        self.records.append(SyzygyRecord(p.kind, p.provenance[1:], FreeElt(frozenset(acc))))

    def run(self, upto: int | None = None) -> None:
        """Process queued pairs in ascending degree up to ``upto`` (default: cap)."""
        upto = self.deg_cap if upto is None else min(upto, self.deg_cap)
        while self._pairs and self._pairs[0].degree <= upto:
            self.process_degree(self._pairs[0].degree)

    def staircase(self, slots: Iterable[int], degree: int, monomials_of_degree: Callable[[int], list[int]]) -> list[int]:
        """Standard monomials (terms not divisible by any lead) of a given degree."""
        out = []
        for s in slots:
            d = degree - self._sdeg(s)
            if d < 0:
                continue
            for m in monomials_of_degree(d):
                t = encode(s, m)
                if self.find_reducer(t) is None:
                    out.append(t)
        return out

    def dump(self) -> str:
        lines = []
        for i, e in enumerate(self.entries):
            origin = ",".join(map(str, e.origin))
            lines.append(f"{i}\t{mask_str(e.lead_mask)}*e{e.slot + 1}\t{len(e.elt)}\t{origin}")
        return "\n".join(lines) + ("\n" if lines else "")


def _rebase(terms: Iterable[int]) -> frozenset:
    """Move terms of any slot to slot 0 (as algebra coefficients)."""
    return frozenset(encode(0, term_mask(t)) for t in terms)


# ---------- functional front end ----------


def _as_terms(x) -> frozenset:
    if isinstance(x, FreeElt):
        return x.raw
    return frozenset(x)


def reduce_once(a, b: GBEntry) -> FreeElt:
    """Eliminate the largest term of ``a`` divisible by the lead of ``b``."""
    terms = _as_terms(a)
    lm, slot = b.lead_mask, b.slot
    for t in sorted(terms, reverse=True):
        if term_slot(t) == slot and not lm & ~term_mask(t):
            q = term_mask(t) ^ lm
            return FreeElt(terms ^ mul_mask(q, b.elt))
    raise GroebnerError("element is not reducible by this entry")


def reduce_full(a, H: GroebnerData) -> tuple[FreeElt, list[tuple[int, int]]]:
    """Remainder of ``a`` and the (quotient mask, entry index) record."""
    rem, quot = H.reduce(_as_terms(a), record=True)
    return FreeElt(rem), quot


def verify_quotients(a, rem: FreeElt, quot, H: GroebnerData) -> bool:
    acc = set(_as_terms(a)) ^ rem.raw
    for q, idx in quot:
        acc ^= mul_mask(q, H.entries[idx].elt)
    return not acc


def _slot_degrees_for(X, rank_degrees):
    if rank_degrees is not None:
        return dict(enumerate(rank_degrees))
    slots = {term_slot(t) for x in X for t in _as_terms(x)}
    return {s: 0 for s in slots}


def buchberger(X: Sequence, trunc=None, deg_cap: int | None = None, *, slot_degrees=None,
               track: bool = False, syzygies: bool = False, **options) -> GroebnerData:
    """Expand X (kept verbatim as the first entries) to a Groebner basis.

    ``slot_degrees`` lists the internal degrees of e_1, e_2, ... (default 0).
    Every degree up to ``deg_cap`` (default: the truncation degree) is made
    complete.
    """
    if deg_cap is None:
        if trunc is None:
            raise GroebnerError("need a truncation bound or a degree cap")
        deg_cap = trunc.n if hasattr(trunc, "n") else int(trunc)
    elts = [_as_terms(x) for x in X]
    if any(not x for x in elts):
        raise GroebnerError("generating set contains zero")
    sdeg = _slot_degrees_for(elts, slot_degrees)
    H = GroebnerData(sdeg, deg_cap, track=track or syzygies, syzygies=syzygies, **options)
    for k, x in enumerate(elts):
        H.add(x, ("input", k), frozenset((encode(k, 0),)) if H.track else None)
    H.run()
    return H


def syzygy_generators(H: GroebnerData) -> list[SyzygyRecord]:
    if H.pending():
        raise GroebnerError("pair queue is not empty")
    if not H.syzygies:
        raise GroebnerError("basis was built without syzygy records")
    return list(H.records)


def syzygy_of_generators(X: Sequence, trunc=None, deg_cap: int | None = None, **kw) -> list[FreeElt]:
    """Generators of Syz(X) over A^t, as the rows of S Q."""
    if not X:
        return []
    H = buchberger(X, trunc, deg_cap, syzygies=True, **kw)
    Q = [e.tag for e in H.entries]
    out = []
    seen = set()
    for rec in syzygy_generators(H):
        row = combine(rec.vector.raw, Q)
        if row and row not in seen:
            seen.add(row)
            out.append(FreeElt(row))
    return out


def check_syzygy(vector, elements: Sequence) -> bool:
    return not combine(_as_terms(vector), [_as_terms(e) for e in elements])
