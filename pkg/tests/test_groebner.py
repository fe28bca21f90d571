import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcgb import oracles
from fcgb.groebner import (
    GroebnerData,
    GroebnerError,
    buchberger,
    check_syzygy,
    combine,
    mul_mask,
    reduce_full,
    reduce_once,
    syzygy_generators,
    syzygy_of_generators,
    verify_quotients,
)
from fcgb.milnor import MilnorElt, milnor_to_pst
from fcgb.order import FreeElt, Monomial, encode, monomials_of_degree, term_mask
from fcgb.verify import check_quotient_dims, check_syzygies, from_free, random_milnor, random_submodule, to_free


def sq(*ns):
    """Left ideal generators Sq^n as packed terms in slot 0."""
    return [milnor_to_pst(MilnorElt.sq(n)).raw for n in ns]


def staircase_dims(H, slots, top):
    return [len(H.staircase(slots, d, monomials_of_degree)) for d in range(top + 1)]


def random_combination(rng, H, X, top):
    """A random A-combination of the generators, as packed terms."""
    acc = set()
    for x in X:
        e = H.degree_of(x)
        if e >= top:
            continue
        a = random_milnor(rng, 0, degree=rng.randint(0, top - e))
        acc ^= combine(encode_vector(a), [x])
    return frozenset(acc)


def encode_vector(a):
    return frozenset(encode(0, term_mask(t)) for t in milnor_to_pst(a).raw)


def test_unit_ideal():
    H = buchberger([{encode(0, 0)}], deg_cap=10)
    assert len(H) == 1
    assert staircase_dims(H, [0], 10) == [0] * 11


@pytest.mark.parametrize("gens,top", [((1,), 8), ((1, 2), 12)])
def test_left_ideal_quotients_match_oracle(gens, top):
    H = buchberger(sq(*gens), deg_cap=top)
    want = oracles.quotient_dimensions([frozenset({(0, (n,))}) for n in gens], [0], top)
    assert staircase_dims(H, [0], top) == want


def test_cyclic_sq1_dimensions():
    # A / A Sq1: 1, 0, 1, 1, 1, 1, 2, 2, 2
    H = buchberger(sq(1), deg_cap=8)
    assert staircase_dims(H, [0], 8) == [1, 0, 1, 1, 1, 1, 2, 2, 2]


def test_rejects_zero_generator():
    with pytest.raises(GroebnerError):
        buchberger([frozenset()], deg_cap=4)


def test_reduce_once_self():
    x = sq(2)[0]
    H = buchberger([x], deg_cap=4)
    rem = reduce_once(x, H.entries[0])
    assert not rem or max(rem.raw) < max(x)
    with pytest.raises(GroebnerError):
        reduce_once(frozenset(), H.entries[0])


def test_reduce_once_exterior_toy():
    p01, p11, p02 = (Monomial.gen(*ij).mask for ij in ((0, 1), (1, 1), (0, 2)))
    a = FreeElt.from_pairs([(0, p01 | p02), (0, p11)])
    b = GroebnerData({0: 0}, 10)
    b.add({encode(0, p02)})
    out = reduce_once(a, b.entries[0])
    top = encode(0, p01 | p02)
    assert top not in out.raw
    introduced = out.raw - a.raw
    assert all(t < top for t in introduced)


def test_reduce_full_trivia():
    H = buchberger(sq(1, 2), deg_cap=10)
    rem, quot = reduce_full(frozenset(), H)
    assert not rem and not quot
    for e in H.entries:
        rem, quot = reduce_full(e.elt, H)
        assert not rem
        assert verify_quotients(e.elt, rem, quot, H)


def test_reduce_full_quotients_are_decreasing():
    H = buchberger(sq(1, 2), deg_cap=12)
    rng = random.Random(2)
    for _ in range(30):
        x = random_combination(rng, H, [e.elt for e in H.entries[:2]], 12) | encode_vector(random_milnor(rng, 12))
        rem, quot = reduce_full(x, H)
        assert verify_quotients(x, rem, quot, H)
        assert not H.is_reducible(rem.raw)
        leads = [max(mul_mask(q, {H.entries[i].lead})) for q, i in quot]
        assert all(a > b for a, b in zip(leads, leads[1:]))


def test_membership_of_random_combinations():
    rng = random.Random(7)
    gens = [to_free(x) for x in random_submodule(rng, 2, 14, 3)]
    H = buchberger(gens, deg_cap=14, slot_degrees=[0, 0])
    for _ in range(50):
        x = random_combination(rng, H, gens, 14)
        assert not H.reduce(x)


def test_random_submodule_quotients():
    check_quotient_dims(random.Random(11), 2, 10)


def test_memo_and_heap_reductions_agree():
    rng = random.Random(4)
    gens = [to_free(x) for x in random_submodule(rng, 2, 14, 3)]
    H = buchberger(gens, deg_cap=14, slot_degrees=[0, 0])
    for _ in range(40):
        x = encode_vector(random_milnor(rng, 14)) | {encode(1, m) for m in monomials_of_degree(rng.randint(1, 14))[:2]}
        if not x:
            continue
        assert H.reduce(x) == H.reduce(x, record=True)[0]


@pytest.mark.parametrize("flags", [{"triple": True}, {"literal_pairs": True}, {"threads": 3},
                                   {"memo": False}])
def test_options_give_same_quotient(flags):
    rng = random.Random(9)
    gens = [to_free(x) for x in random_submodule(rng, 2, 12, 3)]
    base = buchberger(gens, deg_cap=12, slot_degrees=[0, 0])
    other = buchberger(gens, deg_cap=12, slot_degrees=[0, 0], **flags)
    assert staircase_dims(base, [0, 1], 12) == staircase_dims(other, [0, 1], 12)
    for e in other.entries:
        assert not base.reduce(e.elt)


def test_thread_count_is_invisible():
    rng = random.Random(12)
    gens = [to_free(x) for x in random_submodule(rng, 2, 14, 4)]
    one = buchberger(gens, deg_cap=14, slot_degrees=[0, 0])
    four = buchberger(gens, deg_cap=14, slot_degrees=[0, 0], threads=4)
    assert one.dump() == four.dump()
    assert [e.elt for e in one.entries] == [e.elt for e in four.entries]


def test_leads_grow_strictly():
    H = buchberger(sq(1, 2, 4), deg_cap=16)
    leads = [e.lead for e in H.entries]
    assert len(set(leads)) == len(leads)


def test_dump_format():
    H = buchberger(sq(1), deg_cap=3)
    first = H.dump().splitlines()[0].split("\t")
    assert first == ["0", "P(0,1)*e1", "1", "input,0"]


def test_syzygies_of_unit():
    # pruned pairs never touch a lead of 1; the literal mode emits the square pairs
    assert not syzygy_generators(buchberger([{encode(0, 0)}], deg_cap=6, syzygies=True))
    H = buchberger([{encode(0, 0)}], deg_cap=6, syzygies=True, literal_pairs=True)
    recs = syzygy_generators(H)
    assert recs and all(r.kind == "g" for r in recs)
    for r in recs:
        assert check_syzygy(r.vector, [e.elt for e in H.entries])


def test_syzygies_of_two_coprime_leads():
    p01, p11 = Monomial.gen(0, 1).mask, Monomial.gen(1, 1).mask
    X = [{encode(0, p01)}, {encode(0, p11)}]
    H = buchberger(X, deg_cap=6, syzygies=True)
    recs = syzygy_generators(H)
    assert any(r.kind == "s" and set(r.pair[:2]) == {0, 1} for r in recs)
    for r in recs:
        assert check_syzygy(r.vector, [e.elt for e in H.entries])


def test_syzygy_errors_and_empty():
    assert syzygy_of_generators([]) == []
    H = buchberger(sq(1), deg_cap=4)
    with pytest.raises(GroebnerError):
        syzygy_generators(H)


def test_duplicate_generator_syzygy():
    x = sq(2)[0]
    rows = syzygy_of_generators([x, x], deg_cap=8)
    want = {(0, ()), (1, ())}
    span = [from_free(v.raw) for v in rows]
    for v in span:
        assert not oracles.combine_vectors(v, [frozenset({(0, (2,))})] * 2)
    sdeg = [2, 2]
    with_target = oracles.span_dimension(span + [frozenset(want)], sdeg, 2)
    assert with_target == oracles.span_dimension(span, sdeg, 2)


def test_unit_syzygies_are_generated():
    # a * 1 = 0 forces a = 0, so the kernel oracle and the engine both give nothing
    assert oracles.syzygy_dimensions([frozenset({(0, ())})], [0], 6) == [0] * 7
    for flags in ({}, {"literal_pairs": True}):
        assert syzygy_of_generators([{encode(0, 0)}], deg_cap=6, **flags) == []


def test_syzygies_span_kernel():
    check_syzygies(random.Random(0), 3, 10, r=1)
    check_syzygies(random.Random(1), 2, 10, r=2)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32))
def test_syzygy_exactness_property(seed):
    rng = random.Random(seed)
    xs = random_submodule(rng, 2, 10, 3)
    for v in syzygy_of_generators([to_free(x) for x in xs], deg_cap=10, slot_degrees=[0, 0]):
        assert not oracles.combine_vectors(from_free(v.raw), xs)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32))
def test_staircase_property(seed):
    rng = random.Random(seed)
    xs = random_submodule(rng, 1, 10, 2)
    H = buchberger([to_free(x) for x in xs], deg_cap=10, slot_degrees=[0])
    assert staircase_dims(H, [0], 10) == oracles.quotient_dimensions(xs, [0], 10)
