import json

import pytest

from fcgb import oracles
from fcgb.groebner import combine
from fcgb.milnor import milnor_to_masks
from fcgb.order import encode, mask_deg, term_mask
from fcgb.resolution import (
    OFFSET,
    ModulePresentation,
    ResolutionError,
    ResolutionState,
    RunOptions,
    ext_chart,
    format_module_element,
    lift_chain_map,
    load_checkpoint,
    load_module,
    minimal_generators,
    minimize_presentation,
    parse_module,
    products,
    products_tsv,
    read_manifest,
    record_line,
    resolve,
    save_checkpoint,
    trivial_module,
)
from fcgb.verify import check_products_against_cobar, check_resolution_against_oracle


def sq_terms(n, slot=0):
    return {encode(slot, m) for m in milnor_to_masks([(n,)])}


@pytest.fixture(scope="module")
def f2():
    return resolve("F2", s_max=12, t_max=12)


@pytest.fixture(scope="module")
def chart(f2):
    return ext_chart(f2)


# ---------- presentations ----------


def test_trivial_module_is_already_minimal():
    p = trivial_module(64)
    q = minimize_presentation(p)
    assert q.r == 1 and q.gen_degrees == [0]
    assert q.relations == p.relations


def test_redundant_generator_is_eliminated():
    # v2 = Sq1 v1 in degree 1, plus Sq2 v2 = 0
    rel1 = frozenset({encode(1, 0)} ^ sq_terms(1, 0))
    rel2 = frozenset(sq_terms(2, 1))
    q = minimize_presentation(ModulePresentation(2, [0, 1], [rel1, rel2]))
    assert q.r == 1 and q.gen_degrees == [0]
    # Sq2 v2 becomes Sq2 Sq1 v1 = (P(3) + P(0,1)) v1
    texts = [format_module_element(x) for x in q.relations]
    assert texts == ["P(3)*v1 + P(0,1)*v1"] or texts == ["P(0,1)*v1 + P(3)*v1"]


def test_minimization_without_units_is_identity():
    p = ModulePresentation(2, [0, 2], [frozenset(sq_terms(1, 1))])
    assert minimize_presentation(p) == p


def test_module_text_round_trip():
    text = "# HZ\nrank 1\ndegrees 0\nrelation Sq(1)*v1\n"
    p = parse_module(text)
    assert p.r == 1 and p.relations == [frozenset(sq_terms(1))]
    assert parse_module(p.canonical_text()) == p
    with pytest.raises(ValueError):
        parse_module("rank 1\ndegrees 0\nrelation Sq(1)*v2\n")
    with pytest.raises(ValueError):
        parse_module("degrees 0\n")
    with pytest.raises(ValueError):
        ModulePresentation(1, [0], [frozenset(sq_terms(1) | sq_terms(2))])


def test_load_module_file(tmp_path):
    f = tmp_path / "joker.txt"
    f.write_text("rank 1\ndegrees 0\nrelation Sq(4)*v1\nrelation Sq(8)*v1\nrelation Sq(3)*v1\n")
    p = load_module(str(f))
    assert p.name == "joker" and len(p.relations) == 3


# ---------- minimal generating sets ----------


def test_minimal_generators_examples():
    x = frozenset(sq_terms(1))
    assert minimal_generators([x, x]) == [x]
    multiple = combine({encode(0, m) for m in milnor_to_masks([(2,)])}, [x])
    assert minimal_generators([multiple, x], deg_cap=6) == [x]
    assert minimal_generators([]) == []


def test_minimal_generators_indecomposables():
    # A_+ in degrees <= 16 is generated by the Sq^{2^i}
    xs = [frozenset(sq_terms(n)) for n in range(1, 17)]
    kept = minimal_generators(xs, deg_cap=16)
    assert [mask_deg(term_mask(max(x))) for x in kept] == [1, 2, 4, 8, 16]


# ---------- the resolution ----------


def test_small_resolution():
    st = resolve("F2", s_max=2, t_max=4)
    assert st.gens(1) == [1, 2, 4]
    assert 2 in st.gens(2)
    dims = ext_chart(st).dims()
    assert dims[(2, 2)] == 1 and (2, 4) in dims


def test_only_presentation_at_s_zero():
    st = resolve("F2", s_max=0, t_max=6)
    assert st.s_max == 0
    assert [e.name for e in ext_chart(st).entries] == ["1"]


def test_extend_is_idempotent():
    a = resolve("F2", s_max=4, t_max=8)
    before = (a.config_hash(), [lv.gens[:] for lv in a.levels], [lv.diffs[:] for lv in a.levels])
    a.extend(4, 8)
    assert (a.config_hash(), [lv.gens for lv in a.levels], [lv.diffs for lv in a.levels]) == before


def test_incremental_equals_one_shot():
    a = resolve("F2", s_max=5, t_max=10)
    b = ResolutionState(load_module("F2")).extend(3, 6).extend(5, 10)
    assert ext_chart(a).to_tsv() == ext_chart(b).to_tsv()
    assert [lv.diffs for lv in a.levels] == [lv.diffs for lv in b.levels]


def test_chart_against_oracle(f2):
    check_resolution_against_oracle(f2, 12)


def test_complex_and_minimality(f2):
    f2.check_complex()
    f2.check_minimal()
    for s in range(1, f2.s_max + 1):
        for x in f2.levels[s].diffs:
            assert all(term_mask(t) for t in x)


def test_known_classes(chart):
    names = chart.by_name()
    for i in range(4):
        e = names[f"h{i}"]
        assert (e.s, e.t) == (1, 1 << i)
    assert "1" in names
    assert all(e.t >= e.s for e in chart.entries)
    # t - s = 7: h0^k h3 for k = 0..3
    assert sum(1 for e in chart.entries if e.t - e.s == 7) == 4


def test_chart_tsv(chart):
    lines = chart.to_tsv().splitlines()
    assert lines[0] == "s\tt\tindex\tname"
    rows = [tuple(int(v) for v in l.split("\t")[:3]) for l in lines[1:]]
    assert rows == sorted(rows, key=lambda r: (r[1], r[0], r[2]))
    assert lines[1] == "0\t0\t0\t1"


def test_chart_beyond_frontier(f2):
    with pytest.raises(ResolutionError):
        ext_chart(f2, t_max=13)


def test_thread_and_pair_options_do_not_change_chart():
    base = ext_chart(resolve("F2", 6, 10)).to_tsv()
    for opts in (RunOptions(threads=3), RunOptions(triple=True), RunOptions(literal_pairs=True)):
        assert ext_chart(resolve("F2", 6, 10, options=opts)).to_tsv() == base


def test_hz_is_an_h0_tower():
    # A / A Sq1 is induced up from E[Sq1], so its Ext is F_2[h0]
    st = resolve("HZ", s_max=5, t_max=10)
    st.check_complex()
    st.check_minimal()
    assert ext_chart(st).dims() == {(s, s): 1 for s in range(6)}


# ---------- chain maps and products ----------


def test_unit_chain_map_is_identity(f2, chart):
    one = chart.by_name()["1"]
    cm = lift_chain_map(f2, one, 3, 12)
    for k in range(4):
        for j, v in enumerate(cm.values[k]):
            if v is not None:
                assert v == frozenset({encode(j, 0)})


def test_products(f2, chart):
    table = products(f2, ["1", "h0", "h1", "h2"], t_max=12, chart=chart)
    assert table[("h0", "h1")] == []
    assert table[("h1", "h2")] == []
    assert table[("h0", "h0")] == ["2_2_0"]
    assert table[("1", "h3")] == ["h3"]
    assert table[("h1", "h0")] == table[("h0", "h1")]
    h1h1 = table[("h1", "h1")]
    assert len(h1h1) == 1
    h1cubed = products(f2, [h1h1[0]], t_max=12, chart=chart)[(h1h1[0], "h1")]
    h0sq_h2 = products(f2, ["2_2_0"], t_max=12, chart=chart)[("2_2_0", "h2")]
    assert h1cubed == h0sq_h2 != []


def test_products_against_cobar(f2):
    check_products_against_cobar(f2, 10)


def test_products_tsv(f2, chart):
    text = products_tsv(products(f2, ["h0"], t_max=4, chart=chart))
    assert text.splitlines()[0] == "g1\tg2\tresult"
    assert "h0\th0\t2_2_0" in text.splitlines()


def test_product_errors(f2, chart):
    with pytest.raises(ResolutionError):
        products(f2, ["nope"], t_max=6)
    with pytest.raises(ResolutionError):
        products(f2, ["h0"], t_max=40)


def test_module_action_over_f2():
    hz = resolve("HZ", s_max=4, t_max=6)
    f2 = resolve("F2", s_max=4, t_max=6)
    ch = ext_chart(hz)
    bottom = [e for e in ch.entries if (e.s, e.t) == (0, 0)][0]
    table = products(hz, [bottom.name], t_max=6, chart=ch, target=f2)
    assert table[(bottom.name, "h0")] == [e.name for e in ch.entries if (e.s, e.t) == (1, 1)]
    assert table[(bottom.name, "h1")] == []


# ---------- checkpoints ----------


def test_checkpoint_round_trip(tmp_path):
    st = resolve("F2", s_max=6, t_max=10)
    save_checkpoint(st, tmp_path)
    back = load_checkpoint(tmp_path)
    assert back.config_hash() == st.config_hash()
    assert ext_chart(back).to_tsv() == ext_chart(st).to_tsv()
    assert [lv.diffs for lv in back.levels] == [lv.diffs for lv in st.levels]
    back.extend(6, 12)
    assert ext_chart(back).to_tsv() == ext_chart(resolve("F2", 6, 12)).to_tsv()


def test_resume_after_interrupt(tmp_path):
    class Stop(Exception):
        pass

    def barrier(state, t):
        save_checkpoint(state, tmp_path)
        if t == 7:
            raise Stop

    with pytest.raises(Stop):
        ResolutionState(load_module("F2")).extend(6, 11, on_barrier=barrier)
    assert read_manifest(tmp_path)["t_cap"] >= 7
    back = load_checkpoint(tmp_path)
    assert back.frontier() == 7
    back.extend(6, 11, on_barrier=lambda s, t: save_checkpoint(s, tmp_path))
    final = load_checkpoint(tmp_path)
    assert ext_chart(final).to_tsv() == ext_chart(resolve("F2", 6, 11)).to_tsv()


def test_checkpoint_refuses_other_config(tmp_path):
    save_checkpoint(resolve("F2", 3, 5), tmp_path)
    with pytest.raises(ResolutionError):
        load_checkpoint(tmp_path, options=RunOptions(triple=True))
    with pytest.raises(ResolutionError):
        save_checkpoint(resolve("F2", 3, 5, options=RunOptions(literal_pairs=True)), tmp_path)


def _flip_bit(path, level, t, field, reseal):
    """Flip one mask bit of the first differential or basis entry at degree t."""
    f = path / f"level_{level}.jsonl"
    lines = f.read_bytes().splitlines(keepends=True)
    rec = json.loads(lines[t])
    rec.pop("sha")
    terms = rec["diffs"][0] if field == "diffs" else rec["entries"][0][0]
    terms[0][1] ^= 1 << 60
    if reseal:
        lines[t] = record_line(rec)
    else:
        rec["sha"] = json.loads(lines[t])["sha"]
        lines[t] = (json.dumps(rec, separators=(",", ":")) + "\n").encode()
    f.write_bytes(b"".join(lines))
    m = json.loads((path / "manifest.json").read_text())
    m["bytes"][level] = f.stat().st_size
    (path / "manifest.json").write_text(json.dumps(m))


@pytest.mark.parametrize("level,t,field", [(2, 4, "diffs"), (2, 6, "entries"), (1, 3, "entries")])
def test_flipped_bit_breaks_the_digest(tmp_path, level, t, field):
    save_checkpoint(resolve("F2", 3, 6), tmp_path)
    load_checkpoint(tmp_path)
    _flip_bit(tmp_path, level, t, field, reseal=False)
    with pytest.raises(ResolutionError, match="digest"):
        load_checkpoint(tmp_path)


def test_resealed_bad_differential_fails_on_load(tmp_path):
    save_checkpoint(resolve("F2", 3, 6), tmp_path)
    _flip_bit(tmp_path, 2, 4, "diffs", reseal=True)
    with pytest.raises(ResolutionError):
        load_checkpoint(tmp_path)


@pytest.mark.parametrize("level,t", [(2, 6), (1, 3)])
def test_resealed_bad_basis_entry_fails_graph_check(tmp_path, level, t):
    save_checkpoint(resolve("F2", 3, 6), tmp_path)
    _flip_bit(tmp_path, level, t, "entries", reseal=True)
    with pytest.raises(ResolutionError):
        load_checkpoint(tmp_path, check=False).check_graph()


def test_truncated_record_is_rejected(tmp_path):
    save_checkpoint(resolve("F2", 2, 4), tmp_path)
    f = tmp_path / "level_1.jsonl"
    f.write_bytes(f.read_bytes()[:-5] + b"\n")
    m = json.loads((tmp_path / "manifest.json").read_text())
    m["bytes"][1] = f.stat().st_size
    (tmp_path / "manifest.json").write_text(json.dumps(m))
    with pytest.raises(ResolutionError):
        load_checkpoint(tmp_path)


def test_oracle_resolution_ranks_small():
    ranks = oracles.minimal_resolution_ranks(8, 4)
    assert ranks[(1, 1)] == ranks[(1, 2)] == ranks[(1, 4)] == ranks[(1, 8)] == 1
    assert (1, 3) not in ranks
    assert OFFSET > 1 << 20
