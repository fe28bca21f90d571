import random
from concurrent.futures import ThreadPoolExecutor

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcgb import oracles
from fcgb.milnor import (
    MilnorElt,
    TruncationBound,
    adem_expand,
    degree,
    filtration_v,
    mask_to_milnor,
    milnor_product,
    milnor_product_elt,
    milnor_to_mask,
    milnor_to_pst,
    parse_milnor,
    pr,
    pst_monomial_lift,
    pst_to_milnor,
    sq_product,
    weight,
)
from fcgb.order import GENERATORS, Monomial, mask_fdeg
from fcgb.verify import check_adem, check_associativity, check_pairing_oracle


def P(*r):
    return MilnorElt.basis(r)


def elements(max_degree=30):
    return st.builds(
        lambda seed, d: _random_elt(random.Random(seed), d),
        st.integers(0, 2**32),
        st.integers(0, max_degree),
    )


def _random_elt(rng, d):
    basis = oracles.milnor_basis(d)
    return MilnorElt(rng.sample(basis, rng.randint(0, len(basis))))


def test_unit_is_identity():
    assert milnor_product((3, 1), ()) == P(3, 1)
    assert milnor_product((), (0, 2)) == P(0, 2)


def test_sq1_squared_vanishes():
    assert not milnor_product((1,), (1,))


def test_sq2_squared():
    assert milnor_product((2,), (2,)) == P(1, 1)


def test_elementwise_trivia():
    x = MilnorElt.parse("P(1)+P(2)")
    assert not milnor_product_elt(MilnorElt(), x)
    assert milnor_product_elt(x, P()) == x
    assert not milnor_product_elt(P(1) + P(1), x)


def test_truncation_drops_high_products():
    assert not milnor_product((1,), (2,), TruncationBound(2))
    assert milnor_product((1,), (2,), TruncationBound(3)) == P(3)
    with pytest.raises(ValueError):
        TruncationBound(-1)


def test_adem_examples():
    assert not adem_expand(1, 1)
    assert adem_expand(2, 2) == P(1, 1)
    # Sq1 Sq2 = Sq3; the pairing oracle gives the same single Milnor term
    assert adem_expand(1, 2) == P(3)
    assert oracles.pairing_product_table(3)[((1,), (2,))] == {(3,)}


@pytest.mark.parametrize("i,j", [(2, 1), (0, 3), (-1, 2)])
def test_adem_rejects_admissible_pairs(i, j):
    with pytest.raises(ValueError):
        adem_expand(i, j)


def test_weights():
    assert weight((1,)) == 1
    assert weight((0, 1)) == 3
    assert weight((3, 1)) == 5
    assert filtration_v(MilnorElt()) == float("inf")
    assert filtration_v(P(1) + P(0, 1)) == 1


def test_pr_examples():
    assert pr(P(1)).terms == (Monomial.gen(0, 1),)
    assert pr(P(1, 1)).terms == (Monomial.gen(0, 1) * Monomial.gen(0, 2),)
    assert pr(P(1) + P(0, 1)).terms == (Monomial.gen(0, 1),)
    assert not pr(MilnorElt())


def test_lift_examples():
    assert pst_monomial_lift(Monomial(())) == P()
    assert pst_monomial_lift(Monomial.gen(0, 1)) == P(1)
    m = Monomial.gen(0, 1) * Monomial.gen(0, 2)
    assert pst_monomial_lift(m) == milnor_product((1,), (0, 1))
    assert pst_monomial_lift(m) == P(1, 1)


def test_basis_change_examples():
    assert not milnor_to_pst(MilnorElt())
    assert not pst_to_milnor(milnor_to_pst(MilnorElt()))
    assert milnor_to_pst(P(1)).terms() == [(0, Monomial.gen(0, 1).mask)]
    # P(2)P(4) = P(6) + P(3,1), so the sum is a single lifted monomial
    assert len(milnor_to_pst(P(6) + P(3, 1))) == 1


def test_generator_lifts_are_the_pst_elements():
    for g in GENERATORS[:12]:
        r = [0] * (g.j - 1) + [1 << g.i]
        assert pst_monomial_lift(Monomial.gen(g.i, g.j)) == MilnorElt.basis(r)


def test_lift_leading_term_is_bit_set():
    # every square-free monomial of degree <= 20 lifts to P(bits) plus higher weight
    from fcgb.order import monomials_of_degree

    for d in range(21):
        for mask in monomials_of_degree(d):
            lift = pst_monomial_lift(mask)
            r = mask_to_milnor(mask)
            low = [t for t in lift.terms if weight(t) == filtration_v(lift)]
            assert low == [r]
            assert weight(r) == mask_fdeg(mask)
            assert milnor_to_mask(r) == mask


def test_squares_vanish_in_gr():
    for g in GENERATORS:
        if g.deg > 64:
            continue
        x = pst_monomial_lift(Monomial.gen(g.i, g.j))
        assert filtration_v(milnor_product_elt(x, x)) > 2 * g.fdeg


def test_pairing_oracle_small():
    check_pairing_oracle(12)


def test_adem_small():
    check_adem(16)


def test_associativity_small():
    check_associativity(random.Random(1), 60, 30)


@settings(max_examples=60, deadline=None)
@given(elements())
def test_basis_round_trip(x):
    assert pst_to_milnor(milnor_to_pst(x)) == x


@settings(max_examples=60, deadline=None)
@given(elements(), elements())
def test_filtration_is_multiplicative(x, y):
    assert filtration_v(x * y) >= filtration_v(x) + filtration_v(y)


@settings(max_examples=60, deadline=None)
@given(elements(20), elements(20))
def test_product_is_homogeneous(x, y):
    xy = x * y
    if xy:
        assert xy.degrees() == {a + b for a in x.degrees() for b in y.degrees()}


@settings(max_examples=100)
@given(elements(40))
def test_parse_print_round_trip(x):
    assert parse_milnor(str(x)) == x


def test_parse_syntax():
    assert parse_milnor("Sq(3) + P(1,1)") == P(3) + P(1, 1)
    assert parse_milnor("0") == MilnorElt()
    assert parse_milnor("P()") == P()
    with pytest.raises(ValueError):
        parse_milnor("Sq(1")


def test_sq_product_and_degree():
    assert sq_product(2, 2) == P(1, 1)
    assert degree((3, 1)) == 6


def test_concurrent_products_agree():
    rng = random.Random(3)
    pairs = [(random.Random(k).choice(oracles.milnor_basis(9)), rng.choice(oracles.milnor_basis(11)))
             for k in range(200)]
    serial = [milnor_product(a, b) for a, b in pairs]
    with ThreadPoolExecutor(4) as pool:
        threaded = list(pool.map(lambda ab: milnor_product(*ab), pairs))
    assert serial == threaded
