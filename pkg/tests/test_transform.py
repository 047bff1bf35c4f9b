from fractions import Fraction

import numpy as np
import pytest

from helpers import build
from layernc.errors import InvalidNetwork, NotLayered, Unreachable
from layernc.gf import field_new
from layernc.lnc import assign_random, channel_matrix, transport
from layernc.netgraph import SISO, VARIANT1, VARIANT2, Hybrid, path_length_spectrum, validate
from layernc.randnet import random_dag, random_layered
from layernc.transform import LayeredNetwork, layer, layered_variant1, layering_cost, to_variant1


def test_variant2_node_splits():
    # one Variant-II node with two inputs and two outputs
    net = build(
        [("a", "S", "u"), ("b", "S", "w"), ("c", "u", "x"), ("d", "w", "x"), ("e", "x", "D1"), ("f", "x", "D2")],
        variants={"x": VARIANT2},
    )
    v1, cmap = to_variant1(net)
    assert cmap.aux["x"] == ["x.1", "x.2"]
    assert all(n.variant == VARIANT1 for n in v1.nodes if n.kind == "intermediate")
    for a in ("x.1", "x.2"):
        assert sorted(cmap.edge_origin[e.id] for e in v1.in_edges(a)) == ["c", "d"]
    assert [e.id for e in v1.out_edges("x.1")] == ["e"]
    assert [e.id for e in v1.out_edges("x.2")] == ["f"]
    assert validate(v1).ok


def test_source_edge_into_split_node_gets_relay():
    net = build([("a", "S", "x"), ("e", "x", "D1"), ("f", "x", "D2")], variants={"x": VARIANT2})
    v1, cmap = to_variant1(net)
    assert cmap.relays == ["a.relay"]
    assert v1.n == 1
    assert cmap.node_origin["a.relay"] is None


def test_hybrid_split_counts():
    edges = [("a", "S", "x")] + [(f"o{i}", "x", f"D{i}") for i in range(4)]
    v1, cmap = to_variant1(build(edges, variants={"x": Hybrid(2)}))
    assert cmap.aux["x"] == ["x.1", "x.2"]
    assert [e.id for e in v1.out_edges("x.1")] == ["o0", "o1"]


def test_conversion_idempotent(rng):
    net = random_dag(rng, variants=(VARIANT2,))
    v1, _ = to_variant1(net)
    v1b, cmap = to_variant1(v1)
    assert v1b.nodes == v1.nodes and v1b.edges == v1.edges
    assert not cmap.relays


@pytest.mark.parametrize("i", range(40))
def test_conversion_preserves_channels(i):
    rng = np.random.default_rng(100 + i)
    net = random_dag(rng, max_nodes=10, field=field_new(11), variants=(VARIANT2, "hybrid", VARIANT1))
    asg = assign_random(net, i)
    v1, cmap = to_variant1(net)
    asg1 = transport(asg, net, v1, cmap)
    for d in net.destinations:
        assert channel_matrix(net, asg, d.node).matrix == channel_matrix(v1, asg1, d.node).matrix


def test_fig2_layering(fig2):
    lnet = layer(fig2)
    assert lnet.L == 4 and lnet.sizes == [2, 2, 4, 3]
    assert len(lnet.inserted) == 6
    assert all(lnet.network.node(r).kind == SISO for r in lnet.inserted)
    # destination taps follow their relay chains
    assert lnet.network.destination("D1").taps == tuple(lnet.chains[t][-1] for t in fig2.destination("D1").taps)


def test_layering_invariants(rng):
    for _ in range(60):
        net = random_dag(rng, max_nodes=12, field=field_new(7), variants=(VARIANT1, VARIANT2))
        lnet = layer(net)
        out = lnet.network
        assert validate(out).ok
        for d in out.destinations:
            assert path_length_spectrum(out, d.node) == {lnet.L + 1}
        # chains cover each original edge
        for e in net.edges:
            chain = lnet.chains[e.id]
            assert out.edge(chain[0]).tail == e.tail and out.edge(chain[-1]).head == e.head
        assert len(lnet.layer_nodes(1)) == net.n


def test_layering_fixed_point(rng):
    for _ in range(20):
        lnet = random_layered(rng, field=field_new(7))
        again = layer(lnet.network)
        assert not again.inserted
        assert again.network.edges == lnet.network.edges
        assert again.layers == lnet.layers


def test_layering_unreachable_node():
    net = build([("a", "S", "u"), ("b", "u", "D1"), ("c", "w", "D1")])
    with pytest.raises(Unreachable):
        layer(net)


def test_layering_rejects_invalid():
    net = build([("a", "S", "u"), ("b", "S", "u"), ("c", "u", "D1")])
    with pytest.raises(InvalidNetwork):
        layer(net)


def test_direct_source_destination_edge():
    lnet = layer(build([("a", "S", "D1")]))
    assert lnet.L == 1 and len(lnet.inserted) == 1


def test_layered_network_check():
    net = build([("a", "S", "u"), ("b", "u", "w"), ("c", "w", "D1"), ("d", "S", "w")])
    with pytest.raises(NotLayered):
        LayeredNetwork(net, {"u": 1, "w": 2})


def test_layering_cost(fig2):
    assert layering_cost(fig2) == (2, Fraction(2))
    assert layering_cost(build([("a", "S", "u"), ("b", "u", "D1")])) == (0, Fraction(0))
    net = build([("a", "S", "u"), ("b", "S", "w"), ("c", "S", "x"), ("d", "u", "x"), ("e", "w", "x"),
                 ("f", "x", "D1"), ("g", "u", "D1")])
    # D1 has two inputs but destinations are not coding points
    assert layering_cost(net) == (1, Fraction(3))


def test_layered_variant1_steps(rng):
    net = random_dag(rng, variants=(VARIANT2,))
    lnet, steps = layered_variant1(net)
    assert all(n.variant == VARIANT1 for n in lnet.network.nodes)
    assert steps[-1] is lnet
