"""End-to-end acceptance checks, one test per criterion, each with its time budget."""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import ACCEPTANCE
from layernc.analysis import mincut_report
from layernc.duality import (
    backward_channel_by_simulation,
    backward_individual,
    backward_interlayer_matrix,
    backward_matrix,
    backward_valid,
    decode,
    reverse,
    square_reduce,
)
from layernc.gf import field_new, mat_rank, mat_transpose
from layernc.lnc import (
    CodingAssignment,
    assign_random,
    channel_matrix,
    individual_matrix,
    interlayer_matrix,
    overall_matrix,
    simulate,
    simulate_timed,
    transport,
)
from layernc.netgraph import VARIANT2, DestinationSpec, Edge, Node, DESTINATION, path_length_spectrum
from layernc.randnet import random_dag, random_layered
from layernc.transform import LayeredNetwork, layer, layered_variant1, to_variant1

pytestmark = pytest.mark.acceptance


@contextmanager
def criterion(n, budget):
    start = time.perf_counter()
    info = {"detail": ""}
    ok = False
    try:
        yield info
        ok = True
    finally:
        secs = time.perf_counter() - start
        within = secs < budget
        ACCEPTANCE[n] = (ok and within, secs, f"budget {budget}s; {info['detail']}".strip("; "))
    assert within, f"criterion {n} took {secs:.2f}s, budget {budget}s"


def with_full_tap(lnet):
    """Copy of ``lnet`` with an extra destination tapping every last-layer node."""
    net = lnet.network
    last = lnet.layer_nodes(lnet.L)
    extra = [Edge(f"all.{i}", v, "ALL") for i, v in enumerate(last)]
    dests = list(net.destinations) + [DestinationSpec("ALL", tuple(e.id for e in extra))]
    return net.replace(nodes=[*net.nodes, Node("ALL", DESTINATION)], edges=[*net.edges, *extra], destinations=dests)


def layered_instances(count, seed=3):
    rng = np.random.default_rng(seed)
    fields = (field_new(7), field_new(2, 8))
    return [random_layered(rng, max_layers=8, max_width=10, field=fields[i % 2]) for i in range(count)]


# 1 ------------------------------------------------------------------------------------

def test_criterion_1_two_layer_transpose(two_layer):
    with criterion(1, 1.0) as info:
        lnet = two_layer if isinstance(two_layer, LayeredNetwork) else layer(two_layer)
        net = lnet.network
        assert lnet.layer_nodes(1) == ["1", "2", "3"] and lnet.layer_nodes(2) == ["A", "B", "C", "D"]
        # eight distinct nonzero coefficients in GF(11)
        named = ["1A", "2A", "1B", "2B", "3B", "2C", "3C", "3D"]
        coeffs = {(e.head, e.id, None): 1 for e in net.edges if e.tail == "S"}
        for c, eid in enumerate(named, start=1):
            coeffs[(net.edge(eid).head, eid, None)] = c
        asg = CodingAssignment(net.field, coeffs)
        fwd = interlayer_matrix(lnet, asg, 1)
        assert fwd.tolist() == [[1, 2, 0], [3, 4, 5], [0, 6, 7], [0, 0, 8]]
        rev = reverse(lnet, asg, "T")
        back = backward_interlayer_matrix(rev, 1)
        assert back == mat_transpose(fwd)
        info["detail"] = "A_{1,2} == A_{2,1}^T"


# 2 ------------------------------------------------------------------------------------

def test_criterion_2_fig2_layering(fig2):
    with criterion(2, 1.0) as info:
        assert {3, 5} <= path_length_spectrum(fig2, "D1")
        lnet = layer(fig2)
        assert lnet.L == 4
        lv1, _ = layered_variant1(fig2)
        asg = assign_random(lv1.network, 0)
        shapes = [interlayer_matrix(lv1, asg, l).shape for l in range(1, lv1.L)]
        assert shapes == [(2, 2), (4, 2), (3, 4)]
        info["detail"] = f"L={lnet.L}, shapes={shapes}"


# 3 + 4 --------------------------------------------------------------------------------

def test_criterion_3_factorization_equivalence():
    with criterion(3, 30.0) as info:
        cases = layered_instances(200)
        for lnet in cases:
            asg = assign_random(lnet.network, 11)
            a = overall_matrix(lnet, asg).matrix
            assert a == channel_matrix(with_full_tap(lnet), asg, "ALL").matrix
            for d in lnet.network.destinations:
                assert individual_matrix(lnet, asg, d.node).matrix == channel_matrix(lnet.network, asg, d.node).matrix
        info["detail"] = f"{len(cases)} instances exact"


def test_criterion_4_transpose_duality():
    with criterion(4, 30.0) as info:
        cases = layered_instances(200)
        for lnet in cases:
            asg = assign_random(lnet.network, 11)
            a = overall_matrix(lnet, asg).matrix
            for d in lnet.network.destinations:
                rev = reverse(lnet, asg, d.node)
                assert backward_matrix(rev).matrix == mat_transpose(a)
                assert backward_channel_by_simulation(rev).matrix == mat_transpose(
                    individual_matrix(lnet, asg, d.node).matrix)
        info["detail"] = f"{len(cases)} instances exact"


# 5 ------------------------------------------------------------------------------------

def test_criterion_5_validity_duality():
    with criterion(5, 60.0) as info:
        rng = np.random.default_rng(5)
        f = field_new(257)
        done = tried = 0
        while done < 500:
            tried += 1
            lnet = random_layered(rng, max_layers=6, max_width=6, field=f, max_n=4, min_taps=2)
            net = lnet.network
            asg = assign_random(net, int(rng.integers(2**31)))
            k = net.destinations[int(rng.integers(net.K))].node
            if mat_rank(individual_matrix(lnet, asg, k).matrix) < net.n:
                continue
            _, sq = square_reduce(lnet, asg, k)
            a_k = individual_matrix(sq, asg, k).matrix
            assert a_k.shape == (net.n, net.n)
            assert backward_valid(sq, asg, k)
            x = rng.integers(0, f.q, size=net.n)
            assert np.array_equal(decode(a_k, simulate(sq.network, asg, x)[k]), x)
            rev = reverse(sq, asg, k)
            xb = rng.integers(0, f.q, size=net.n)
            yb = simulate(rev.network, rev.assignment, xb)[net.source]
            assert np.array_equal(decode(backward_individual(rev).matrix, yb), xb)
            done += 1
        info["detail"] = f"{done} square valid instances of {tried} drawn"


# 6 ------------------------------------------------------------------------------------

def test_criterion_6_mincut_bracketing():
    with criterion(6, 120.0) as info:
        rng = np.random.default_rng(6)
        f = field_new(257)
        total = hits = 0
        for i in range(500):
            net = random_dag(rng, max_nodes=15, field=f, variants=(VARIANT2,))
            assert f.q > net.K
            for d in net.destinations:
                r = mincut_report(net, d.node, 32, 1000 + i)
                assert r.estimate <= r.upper_bound
                assert r.maxflow <= r.upper_bound
                total += 1
                hits += r.estimate == r.maxflow
        assert hits >= 0.99 * total
        info["detail"] = f"estimate == maxflow in {hits}/{total}"


# 7 ------------------------------------------------------------------------------------

def test_criterion_7_variant_equivalence():
    with criterion(7, 30.0) as info:
        rng = np.random.default_rng(7)
        count = 0
        for i in range(200):
            f = (field_new(7), field_new(2, 8), field_new(257))[i % 3]
            net = random_dag(rng, max_nodes=12, field=f, variants=(VARIANT2, "hybrid", "variant1"))
            asg = assign_random(net, i)
            v1, cmap = to_variant1(net)
            asg1 = transport(asg, net, v1, cmap)
            for d in net.destinations:
                assert channel_matrix(net, asg, d.node).matrix == channel_matrix(v1, asg1, d.node).matrix
            count += 1
        info["detail"] = f"{count} networks identical"


# 8 ------------------------------------------------------------------------------------

def test_criterion_8_synchronization(fig2):
    with criterion(8, 30.0) as info:
        rng = np.random.default_rng(8)
        for i in range(200):
            if i % 2:
                net = random_layered(rng, field=field_new(7)).network
            else:
                net = layer(random_dag(rng, field=field_new(7), variants=(VARIANT2, "variant1"))).network
            asg = assign_random(net, i)
            x = rng.integers(0, 7, size=net.n)
            y, trace = simulate_timed(net, asg, x)
            assert trace.synchronized()
            assert all(np.array_equal(y[k], v) for k, v in simulate(net, asg, x).items())
        _, trace = simulate_timed(fig2, assign_random(fig2, 0), np.zeros(fig2.n, dtype=np.int64))
        assert trace.buffer_depth("N2") == 1
        assert not trace.synchronized()
        info["detail"] = "200 layered instances synchronized; fig2 N2 buffer depth 1"


# 9 ------------------------------------------------------------------------------------

def test_criterion_9_field_axioms():
    with criterion(9, 5.0) as info:
        rng = np.random.default_rng(9)
        for f in (field_new(7), field_new(2), field_new(2, 8)):
            a, b, c = rng.integers(0, f.q, size=(3, 10_000))
            add, mul, sub = f.vadd, f.vmul, f.vsub
            assert np.array_equal(add(add(a, b), c), add(a, add(b, c)))
            assert np.array_equal(mul(mul(a, b), c), mul(a, mul(b, c)))
            assert np.array_equal(add(a, b), add(b, a))
            assert np.array_equal(mul(a, b), mul(b, a))
            assert np.array_equal(mul(a, add(b, c)), add(mul(a, b), mul(a, c)))
            assert np.array_equal(add(a, 0 * a), a) and np.array_equal(mul(a, np.ones_like(a)), a)
            assert not sub(a, a).any()
            nz = a[a != 0]
            assert (mul(nz, f.inverse_table()[nz]) == 1).all()
            # vectorised and scalar paths agree
            for i in range(0, 10_000, 97):
                assert f.mul(int(a[i]), int(b[i])) == mul(a[i:i + 1], b[i:i + 1])[0]
        g = field_new(2, 8)
        for x in range(1, 256):
            assert g.mul(x, g.inv(x)) == 1
        info["detail"] = "3 x 10^4 triples; GF(256) inverses exhaustive"
