import itertools

import pytest

from ifnet.graph import (CapError, build_message_graph, enumerate_right_sided, export_dot, is_satellite,
                         to_encoding_graph)
from ifnet.model import SpecError, msg

EIGHT_SETS = [(1, 2, 3, 4), (2, 3, 4), (1, 2), (1, 4), (3, 4), (1,), (2,), (3,)]


def test_two_user_edges():
    g = build_message_graph([(1, 2), (1,), (2,)], 2)
    assert set(g.edges) == {((1, 2), (1,)), ((1, 2), (2,))}


def test_eight_sets_edges():
    g = build_message_graph(EIGHT_SETS, 4)
    assert ((2, 3, 4), (3, 4)) in g.edges
    assert ((2, 3, 4), (2,)) in g.edges
    assert ((1, 2, 3, 4), (3, 4)) not in g.edges
    assert set(g.edges) == {
        ((1, 2, 3, 4), (2, 3, 4)), ((1, 2, 3, 4), (1, 2)), ((1, 2, 3, 4), (1, 4)),
        ((2, 3, 4), (3, 4)), ((2, 3, 4), (2,)),
        ((1, 2), (1,)), ((1, 2), (2,)), ((1, 4), (1,)), ((3, 4), (3,)),
    }
    assert g.columns[4] == [(1, 2, 3, 4)] and g.columns[2] == [(1, 2), (1, 4), (3, 4)]


def test_single_node():
    g = build_message_graph([(1,)], 1)
    assert g.nodes == ((1,),) and g.edges == ()


def test_duplicate_tx_rejected():
    with pytest.raises(SpecError):
        build_message_graph([msg("12", "1"), msg("12", "2")], 2)


def test_satellite():
    assert is_satellite(msg("1", "3"), msg("124", "3"))
    assert not is_satellite(msg("12", "1"), msg("12", "2"))
    assert not is_satellite(msg("3", "1"), msg("12", "1"))


def test_two_user_encoding_law():
    eg = to_encoding_graph(build_message_graph([(1, 2), (1,), (2,)], 2))
    assert eg.factors == (("W_{1,2}", (), False), ("X_1", ("W_{1,2}",), False), ("X_2", ("W_{1,2}",), False))
    assert not eg.with_q


def test_eight_sets_encoding_law():
    eg = to_encoding_graph(build_message_graph(EIGHT_SETS, 4))
    f = {s: (set(c), d) for s, c, d in eg.factors}
    assert f["W_{1,2,3,4}"] == (set(), False)
    assert f["W_{3,4}"] == ({"W_{2,3,4}", "W_{1,2,3,4}"}, False)
    assert f["X_1"] == ({"W_{1,2}", "W_{1,4}", "W_{1,2,3,4}"}, False)
    assert f["X_4"] == ({"W_{1,4}", "W_{3,4}", "W_{2,3,4}", "W_{1,2,3,4}"}, True)
    assert len(eg.nodes) == 9
    assert [s for s, _, _ in eg.factors][:1] == ["W_{1,2,3,4}"]


def test_single_private_message_gets_q():
    eg = to_encoding_graph(build_message_graph([(1,)], 2))
    assert eg.factors == (("X_1", ("Q",), False), ("X_2", ("Q",), True))


def test_dot_export():
    txt = export_dot(build_message_graph([(1, 2), (1,), (2,)], 2))
    assert txt.startswith("digraph G {")
    assert txt.count("->") == 2 and txt.count(";") == 6
    txt = export_dot(build_message_graph(EIGHT_SETS, 4))
    assert txt.count("->") == 9
    assert sum(1 for line in txt.splitlines() if line.endswith('";') and "->" not in line) == 8
    empty = export_dot(build_message_graph([], 1))
    assert "->" not in empty and '"' not in empty


def _brute_right_sided(labels):
    out = []
    for r in range(len(labels) + 1):
        for sub in itertools.combinations(labels, r):
            if all(b in sub for a in sub for b in labels if set(b.tx) <= set(a.tx)):
                out.append(set(sub))
    return out


def test_right_sided_examples():
    m12, m1, m2 = msg("12", "1"), msg("1", "1"), msg("2", "1")
    got = [set(s) for s in enumerate_right_sided([m12, m1, m2])]
    assert sorted(map(sorted, got)) == sorted(map(sorted, [set(), {m1}, {m2}, {m1, m2}, {m12, m1, m2}]))
    assert [set(s) for s in enumerate_right_sided([m1])] == [set(), {m1}]
    assert len(enumerate_right_sided([msg("12", "1"), msg("34", "1")])) == 4


def test_right_sided_matches_brute_force_on_four_tx_mac():
    from netgen import FOUR_TX_MAC
    got = enumerate_right_sided(FOUR_TX_MAC)
    want = _brute_right_sided(FOUR_TX_MAC)
    assert len(got) == len(want)
    assert all(set(s) in want for s in got)


def test_right_sided_cap():
    labels = [msg([i], "1") for i in range(1, 23)]
    with pytest.raises(CapError):
        enumerate_right_sided(labels)
