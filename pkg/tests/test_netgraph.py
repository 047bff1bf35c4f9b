import numpy as np
import pytest

from helpers import all_paths, build
from layernc.errors import CycleDetected, UnknownNode
from layernc.gf import field_new
from layernc.netgraph import (
    SISO,
    VARIANT2,
    DestinationSpec,
    Hybrid,
    ancestral_order,
    coding_points,
    group_out_edges,
    path_length_spectrum,
    validate,
)
from layernc.randnet import random_dag

DIAMOND = [("a", "S", "u"), ("b", "S", "w"), ("c", "u", "x"), ("d", "w", "x"), ("e", "x", "D1")]


def test_basic_queries():
    net = build(DIAMOND)
    assert net.n == 2 and net.K == 1
    assert [e.id for e in net.in_edges("x")] == ["c", "d"]
    assert net.destination(1).node == "D1" and net.destination("D1").taps == ("e",)
    assert net.successors("S") == ["u", "w"] and net.predecessors("x") == ["u", "w"]
    with pytest.raises(UnknownNode):
        net.node("nope")


def test_valid_network(fig2):
    assert validate(fig2).ok
    assert validate(build(DIAMOND)).ok


@pytest.mark.parametrize(
    "edges, kw, code",
    [
        ([("a", "S", "u"), ("b", "u", "w"), ("c", "w", "u"), ("d", "w", "D1")], {}, "CycleDetected"),
        ([("a", "S", "u"), ("b", "S", "u"), ("c", "u", "D1")], {}, "ParallelEdge"),
        ([("a", "S", "u"), ("b", "u", "S"), ("c", "u", "D1")], {}, "SourceInDegree"),
        ([("a", "S", "D1"), ("b", "D1", "u"), ("c", "u", "D2")], {}, "DestinationOutDegree"),
        ([("a", "S", "r"), ("b", "S", "u"), ("c", "r", "D1"), ("d", "u", "r")], {"kinds": {"r": SISO}}, "SisoDegree"),
        ([("a", "S", "u"), ("b", "u", "D1")], {"variants": {"u": Hybrid(3)}}, "HybridRange"),
        ([("a", "S", "u"), ("b", "u", "D1")], {"dests": [DestinationSpec("D1", ("a",))]}, "TapMismatch"),
    ],
)
def test_validate_codes(edges, kw, code):
    rep = validate(build(edges, **kw))
    assert not rep.ok
    assert code in rep.codes()
    assert rep.to_json()["ok"] is False


def test_ancestral_order_chain_and_diamond():
    chain = build([("a", "S", "u"), ("b", "u", "w"), ("c", "w", "D1")])
    assert ancestral_order(chain) == ["S", "u", "w", "D1"]
    assert ancestral_order(build(DIAMOND)) == ["S", "u", "w", "x", "D1"]


def test_ancestral_order_cycle():
    net = build([("a", "S", "u"), ("b", "u", "w"), ("c", "w", "u"), ("d", "w", "D1")])
    with pytest.raises(CycleDetected):
        ancestral_order(net)


def test_ancestral_order_respects_edges(rng):
    for _ in range(50):
        net = random_dag(rng, field=field_new(7))
        pos = {v: i for i, v in enumerate(ancestral_order(net))}
        assert len(pos) == len(net.nodes)
        assert all(pos[e.tail] < pos[e.head] for e in net.edges)


def test_coding_points_recount(rng, fig2):
    assert coding_points(fig2) == {"N2", "N5"}
    for _ in range(50):
        net = random_dag(rng, field=field_new(7))
        expect = {n.id for n in net.nodes if n.kind != "destination" and len(net.in_edges(n.id)) >= 2}
        assert coding_points(net) == expect


def test_path_spectrum_matches_enumeration(rng, fig2):
    assert path_length_spectrum(fig2, "D1") == {3, 4, 5}
    for _ in range(50):
        net = random_dag(rng, max_nodes=10, field=field_new(7))
        for d in net.destinations:
            assert path_length_spectrum(net, d.node) == {len(p) for p in all_paths(net, d.node)}


def test_path_spectrum_unreachable():
    net = build([("a", "S", "D1"), ("b", "u", "D2")])
    assert path_length_spectrum(net, "D2") == set()


def test_group_out_edges_hybrid():
    edges = [("a", "S", "u")] + [(f"o{i}", "u", f"D{i}") for i in range(5)]
    net = build(edges, variants={"u": Hybrid(2)})
    assert [[e.id for e in g] for g in group_out_edges(net, "u")] == [["o0", "o1", "o2"], ["o3", "o4"]]
    v2 = build(edges, variants={"u": VARIANT2})
    assert len(group_out_edges(v2, "u")) == 5
    assert len(group_out_edges(build(edges), "u")) == 1


def test_random_dag_reproducible():
    a = random_dag(np.random.default_rng(1))
    b = random_dag(np.random.default_rng(1))
    assert a.edges == b.edges and a.nodes == b.nodes
