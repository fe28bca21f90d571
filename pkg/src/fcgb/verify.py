"""Invariant checks and oracle comparisons, shared by ``fcgb verify`` and the tests.

Each check raises ``AssertionError`` with a short diagnostic on failure and
returns a one-line summary on success.
"""

from __future__ import annotations

import random
from os import PathLike
from typing import Callable

from . import oracles
from .f2linear import EchelonBasis
from .groebner import buchberger, syzygy_of_generators
from .milnor import (
    MilnorElt,
    adem_expand,
    filtration_v,
    milnor_product,
    milnor_product_elt,
    masks_to_milnor,
    milnor_to_pst,
    sq_product,
)
from .order import GENERATORS, Monomial, cmp_monomial, encode, monomials_of_degree, term_mask, term_slot
from .resolution import (
    ResolutionState,
    RunOptions,
    ext_chart,
    is_trivial_module,
    load_checkpoint,
    load_module,
    products,
)

Check = tuple[str, Callable[[], str]]


# ---------- random data ----------


def random_monomial(rng: random.Random, max_fdeg: int, max_exp: int = 3) -> Monomial:
    """A monomial in the P^i_j (exponents allowed above 1) with fdeg <= max_fdeg."""
    exps: dict[int, int] = {}
    budget = rng.randint(0, max_fdeg)
    gens = [g for g in GENERATORS if g.fdeg <= max_fdeg and g.deg <= 1 << 12]
    while True:
        g = rng.choice(gens)
        if g.fdeg > budget:
            break
        e = rng.randint(1, max_exp)
        while e and g.fdeg * e > budget:
            e -= 1
        if not e:
            break
        exps[g.rank] = exps.get(g.rank, 0) + e
        budget -= g.fdeg * e
        if rng.random() < 0.3:
            break
    return Monomial(tuple(sorted(exps.items())))


def random_milnor(rng: random.Random, max_degree: int, max_terms: int = 3, degree: int | None = None) -> MilnorElt:
    """A random homogeneous element with at most ``max_terms`` basis terms."""
    if degree is None:
        degree = rng.randint(0, max_degree)
    basis = oracles.milnor_basis(degree)
    k = rng.randint(1, min(max_terms, len(basis)))
    return MilnorElt(rng.sample(basis, k))


def random_submodule(rng: random.Random, r: int, top: int, count: int) -> list[frozenset]:
    """Random homogeneous elements of A^r (slot degrees 0), as (slot, R) sets."""
    gens = []
    while len(gens) < count:
        d = rng.randint(1, top // 2)
        x: set = set()
        for slot in range(r):
            for t in rng.sample(oracles.milnor_basis(d), min(2, len(oracles.milnor_basis(d)))):
                if rng.random() < 0.5:
                    x ^= {(slot, t)}
        if x:
            gens.append(frozenset(x))
    return gens


def to_free(x) -> frozenset:
    """(slot, R) pairs to packed lifted-basis terms."""
    out: set = set()
    for slot, r in x:
        for t in milnor_to_pst(MilnorElt([r])).raw:
            out ^= {encode(slot, term_mask(t))}
    return frozenset(out)


def from_free(terms) -> frozenset:
    """Packed lifted-basis terms back to (slot, R) pairs."""
    by_slot: dict[int, list[int]] = {}
    for t in terms:
        by_slot.setdefault(term_slot(t), []).append(term_mask(t))
    return frozenset((slot, r) for slot, masks in by_slot.items() for r in masks_to_milnor(masks))


# ---------- individual checks ----------


def check_pairing_oracle(max_degree: int) -> str:
    n = 0
    for d in range(max_degree + 1):
        for (a, b), expect in oracles.pairing_product_table(d).items():
            got = milnor_product(a, b).terms
            assert got == expect, f"P{a} P{b}: product {sorted(got)} but pairing gives {sorted(expect)}"
            n += 1
    return f"{n} basis pairs up to degree {max_degree}"


def check_associativity(rng: random.Random, count: int, max_degree: int) -> str:
    for _ in range(count):
        da = rng.randint(0, max_degree)
        db = rng.randint(0, max_degree - da)
        dc = rng.randint(0, max_degree - da - db)
        a, b, c = (random_milnor(rng, 0, degree=d) for d in (da, db, dc))
        left = milnor_product_elt(milnor_product_elt(a, b), c)
        right = milnor_product_elt(a, milnor_product_elt(b, c))
        assert left == right, f"({a})({b})({c}) is not associative"
    return f"{count} triples up to degree {max_degree}"


def check_adem(max_sum: int) -> str:
    n = 0
    for j in range(1, max_sum):
        for i in range(1, min(2 * j, max_sum - j + 1)):
            lhs = sq_product(i, j)
            rhs = adem_expand(i, j)
            assert lhs == rhs, f"Sq{i} Sq{j}: {lhs} vs Adem {rhs}"
            n += 1
    return f"{n} Adem relations with i+j <= {max_sum}"


def check_ordering_axioms(rng: random.Random, count: int, max_fdeg: int) -> str:
    for _ in range(count):
        m, n, l = (random_monomial(rng, max_fdeg) for _ in range(3))
        c = cmp_monomial(m, n)
        assert c == cmp_monomial(m * l, n * l), f"multiplying by {l} changes the order of {m} and {n}"
        if m.fdeg > n.fdeg:
            assert c < 0, f"{m} has larger fdeg than {n} but is not smaller"
        elif m.fdeg < n.fdeg:
            assert c > 0, f"{n} has larger fdeg than {m} but is not smaller"
    return f"{count} triples with fdeg <= {max_fdeg}"


def check_filtration(rng: random.Random, count: int, max_degree: int) -> str:
    for _ in range(count):
        a = random_milnor(rng, max_degree)
        b = random_milnor(rng, max_degree - max(a.degrees()))
        ab = milnor_product_elt(a, b)
        assert filtration_v(ab) >= filtration_v(a) + filtration_v(b), f"v({a} * {b}) too small"
    return f"{count} pairs up to degree {max_degree}"


def check_quotient_dims(rng: random.Random, instances: int, top: int, r: int = 2) -> str:
    for k in range(instances):
        gens = random_submodule(rng, r, top, rng.randint(2, 4))
        H = buchberger([to_free(x) for x in gens], deg_cap=top, slot_degrees=[0] * r)
        got = [len(H.staircase(range(r), d, monomials_of_degree)) for d in range(top + 1)]
        want = oracles.quotient_dimensions(gens, [0] * r, top)
        assert got == want, f"instance {k}: staircase {got} but ranks give {want}"
    return f"{instances} submodules of A^{r} up to degree {top}"


def check_syzygies(rng: random.Random, instances: int, top: int, r: int = 1) -> str:
    """Emitted syzygies annihilate the generators and span the whole kernel up to ``top``."""
    for k in range(instances):
        xs = random_submodule(rng, r, top, rng.randint(2, 3))
        sdeg = [oracles.element_degree(x, [0] * r) for x in xs]
        rows = syzygy_of_generators([to_free(x) for x in xs], deg_cap=top, slot_degrees=[0] * r)
        vecs = [from_free(v.raw) for v in rows]
        for v in vecs:
            assert not oracles.combine_vectors(v, xs), f"instance {k}: {v} is not a syzygy"
        got = [oracles.span_dimension(vecs, sdeg, d) for d in range(top + 1)]
        want = oracles.syzygy_dimensions(xs, [0] * r, top)
        assert got == want, f"instance {k}: syzygies span {got}, kernel has {want}"
    return f"{instances} generating sets in A^{r} up to degree {top}"


def check_resolution_against_oracle(state: ResolutionState, t_max: int) -> str:
    chart = ext_chart(state, t_max=t_max)
    got = {k: v for k, v in chart.dims().items()}
    want = oracles.minimal_resolution_ranks(t_max, state.s_max)
    assert got == want, f"chart ranks {sorted(got.items())} differ from oracle {sorted(want.items())}"
    return f"{len(chart.entries)} generators agree with the dense resolution for t <= {t_max}"


def check_complex(state: ResolutionState) -> str:
    state.check_complex()
    state.check_minimal()
    state.check_graph()
    return f"d^2 = 0 and minimal on {sum(len(lv.gens) for lv in state.levels)} generators"


def check_products_against_cobar(state: ResolutionState, t_max: int) -> str:
    """Basis-free comparison: rank of every product map H^a x H^b -> H^{a+b}."""
    cobar = oracles.CobarCohomology(t_max)
    chart = ext_chart(state, t_max=t_max)
    entries = [e for e in chart.entries if e.s > 0]
    by_bideg: dict[tuple[int, int], list] = {}
    for e in entries:
        by_bideg.setdefault((e.s, e.t), []).append(e)
    table = products(state, [e.name for e in entries], t_max=t_max, chart=chart)
    n = 0
    for a in by_bideg:
        for b in by_bideg:
            if a > b or a[0] + b[0] > state.s_max or a[1] + b[1] > t_max:
                continue
            target = {e.name: i for i, e in enumerate(chart.entries)}
            vecs = set()
            for x in by_bideg[a]:
                for y in by_bideg[b]:
                    v = 0
                    for name in table[(x.name, y.name)]:
                        v ^= 1 << target[name]
                    vecs.add(v)
            ours = _rank(vecs)
            theirs = cobar.product_rank(a, b)
            assert ours == theirs, f"products {a} x {b}: rank {ours}, cobar rank {theirs}"
            n += 1
    for (x, y), res in table.items():
        if (y, x) in table:
            assert res == table[(y, x)], f"{x}*{y} = {res} but {y}*{x} = {table[(y, x)]}"
    return f"{n} product maps match the cobar complex for t <= {t_max}"


def _rank(vectors) -> int:
    basis = EchelonBasis()
    for v in vectors:
        basis.add(v)
    return len(basis)


def check_checkpoint(path: str | PathLike, options: RunOptions | None, t_range: int) -> str:
    """Reload a checkpoint (which re-checks d^2 = 0) and compare F_2 charts with the oracle."""
    state = load_checkpoint(path, None, options, check=False)
    msg = check_complex(state)
    top = min(t_range, state.frontier())
    if top >= 0 and is_trivial_module(state):
        msg += "; " + check_resolution_against_oracle(state, top)
    return msg


def default_checks(t_range: int = 12, rng: random.Random | None = None) -> list[Check]:
    rng = rng or random.Random(0)
    holder: dict = {}

    def resolution() -> ResolutionState:
        if "state" not in holder:
            holder["state"] = ResolutionState(load_module("F2")).extend(t_range, t_range)
        return holder["state"]

    return [
        ("ordering-axioms", lambda: check_ordering_axioms(rng, 2000, 25)),
        ("filtration", lambda: check_filtration(rng, 300, 24)),
        ("milnor-pairing", lambda: check_pairing_oracle(12)),
        ("associativity", lambda: check_associativity(rng, 100, 30)),
        ("adem", lambda: check_adem(16)),
        ("groebner-quotients", lambda: check_quotient_dims(rng, 2, 10)),
        ("d-squared", lambda: check_complex(resolution())),
        ("resolution-oracle", lambda: check_resolution_against_oracle(resolution(), t_range)),
        ("products-cobar", lambda: check_products_against_cobar(resolution(), min(t_range, 10))),
    ]

