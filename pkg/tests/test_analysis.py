import itertools

import numpy as np
import pytest

from helpers import build
from layernc.analysis import (
    layer_patterns,
    maxflow_mincut,
    mincut_report,
    mincut_upper_bound,
    rank_mincut_estimate,
    structural_rank,
)
from layernc.errors import FieldTooSmall
from layernc.gf import FieldMatrix, field_new, mat_rank
from layernc.netgraph import VARIANT2, reachable_from
from layernc.randnet import random_dag, random_layered
from layernc.transform import layer


def brute_structural_rank(mask):
    """Largest k with a k x k submatrix whose pattern admits a perfect matching."""
    r, c = mask.shape
    for k in range(min(r, c), 0, -1):
        for rows in itertools.combinations(range(r), k):
            for cols in itertools.combinations(range(c), k):
                if any(all(mask[rows[i], p[i]] for i in range(k)) for p in itertools.permutations(cols)):
                    return k
    return 0


def test_structural_rank_examples():
    assert structural_rank(np.eye(3, dtype=bool)) == 3
    assert structural_rank(np.zeros((2, 4), dtype=bool)) == 0
    assert structural_rank(np.array([[1, 1], [1, 0], [1, 0]], dtype=bool)) == 2
    assert structural_rank(np.zeros((0, 3), dtype=bool)) == 0


def test_structural_rank_brute_force(rng):
    for _ in range(150):
        r, c = rng.integers(1, 5, size=2)
        mask = rng.random((r, c)) < 0.4
        assert structural_rank(mask) == brute_structural_rank(mask)


def test_two_layer_pattern_generic_rank_attained_in_gf5():
    pattern = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1], [0, 0, 1]], dtype=bool)
    assert structural_rank(pattern) == 3
    f = field_new(5)
    slots = list(zip(*np.nonzero(pattern)))
    found = False
    for vals in itertools.product(range(1, 5), repeat=len(slots)):
        m = np.zeros((4, 3), dtype=np.int64)
        for (i, j), v in zip(slots, vals):
            m[i, j] = v
        if mat_rank(FieldMatrix(f, m)) == 3:
            found = True
            break
    assert found


def brute_mincut(net, target):
    """Smallest edge set whose removal disconnects source from target."""
    edges = [e.id for e in net.edges]
    for size in range(len(edges) + 1):
        for cut in itertools.combinations(edges, size):
            rest = net.replace(edges=[e for e in net.edges if e.id not in cut],
                               destinations=[d.node for d in net.destinations if d.node != target] + [target])
            if target not in reachable_from(rest, net.source):
                return size
    return len(edges)


def test_maxflow_brute_force(rng):
    for _ in range(40):
        net = random_dag(rng, max_nodes=8, field=field_new(7))
        for d in net.destinations:
            assert maxflow_mincut(net, d.node) == brute_mincut(net, d.node)


def test_maxflow_fig2(fig2):
    assert maxflow_mincut(fig2, "D1") == 2
    assert maxflow_mincut(fig2, "D2") == 2


def test_rank_le_maxflow_le_bound(rng):
    for i in range(40):
        net = random_dag(rng, max_nodes=12, field=field_new(257), variants=(VARIANT2,))
        for d in net.destinations:
            r = mincut_report(net, d.node, 8, i)
            assert r.estimate <= r.maxflow <= r.upper_bound
            assert r.consistent


def test_upper_bound_on_layered(rng):
    for _ in range(30):
        lnet = random_layered(rng, field=field_new(257))
        for d in lnet.network.destinations:
            pats = layer_patterns(lnet, d.node)
            assert len(pats) == lnet.L
            assert pats[-1].shape[0] == len(d.taps)
            assert mincut_upper_bound(lnet, d.node) == min(structural_rank(p) for p in pats)
            assert rank_mincut_estimate(lnet, d.node, 16, 0) <= mincut_upper_bound(lnet, d.node)


def test_estimate_monotone_in_trials(rng):
    lnet = random_layered(rng, field=field_new(3), max_width=4)
    d = lnet.network.destinations[0].node
    ests = [rank_mincut_estimate(lnet, d, t, 7) for t in (1, 2, 4, 8, 16)]
    assert ests == sorted(ests)


def test_field_too_small():
    net = build([("a", "S", "u"), ("b", "u", "D1"), ("c", "u", "D2")], field=field_new(2))
    with pytest.raises(FieldTooSmall):
        rank_mincut_estimate(layer(net), "D1", 4, 0)


def test_report_serialization(fig2):
    r = mincut_report(fig2, "D1", 8, 1)
    j = r.to_json()
    assert j["destination"] == "D1" and j["maxflow"] == 2
    lines = r.table().splitlines()
    assert lines[0].split("\t") == ["factor", "rows", "cols", "structural_rank"]
    assert lines[-1].split("\t")[0] == "D1"
