"""Seeded random network generators used by the tests and the CLI demos."""

from __future__ import annotations

import numpy as np

from .gf import FieldSpec, field_new
from .netgraph import (
    DESTINATION,
    INTERMEDIATE,
    SOURCE,
    VARIANT1,
    VARIANT2,
    Edge,
    Hybrid,
    Network,
    Node,
)
from .transform import LayeredNetwork


def _pick_variant(rng, variants, out_degree):
    v = variants[rng.integers(len(variants))]
    if v == "hybrid":
        if out_degree < 2:
            return VARIANT1
        return Hybrid(int(rng.integers(1, out_degree + 1)))
    return v


def random_dag(
    rng: np.random.Generator,
    max_nodes: int = 15,
    field: FieldSpec | None = None,
    variants=(VARIANT2,),
    max_destinations: int = 2,
    edge_prob: float = 0.35,
    min_nodes: int = 4,
) -> Network:
    """Random acyclic network with every node reachable from the source.

    Nodes are ``S, v1..vI, D1..DK`` and edges only point forward in that
    order, so the result is acyclic and free of parallel edges.
    """
    total = int(rng.integers(min_nodes, max_nodes + 1))
    K = int(rng.integers(1, min(max_destinations, total - 2) + 1))
    n_inter = total - 1 - K
    inter = [f"v{i}" for i in range(1, n_inter + 1)]
    dests = [f"D{k}" for k in range(1, K + 1)]
    order = ["S"] + inter
    edges: list[tuple[str, str]] = []
    for j, v in enumerate(inter, start=1):
        preds = [order[i] for i in range(j) if rng.random() < edge_prob]
        if not preds:
            preds = [order[int(rng.integers(j))]]
        edges.extend((u, v) for u in preds)
    for d in dests:
        preds = [u for u in order if rng.random() < edge_prob]
        if not preds:
            preds = [order[int(rng.integers(len(order)))]]
        edges.extend((u, d) for u in preds)
    edges.sort(key=lambda uv: (order.index(uv[0]), (order + dests).index(uv[1])))
    eobjs = [Edge(f"e{i}", u, v) for i, (u, v) in enumerate(edges, start=1)]
    outdeg = {}
    for u, _ in edges:
        outdeg[u] = outdeg.get(u, 0) + 1
    nodes = [Node("S", SOURCE)]
    nodes += [Node(v, INTERMEDIATE, _pick_variant(rng, variants, outdeg.get(v, 0))) for v in inter]
    nodes += [Node(d, DESTINATION) for d in dests]
    return Network(nodes, eobjs, "S", dests, field or field_new(257))


def random_layered(
    rng: np.random.Generator,
    max_layers: int = 8,
    max_width: int = 10,
    field: FieldSpec | None = None,
    max_destinations: int = 2,
    edge_prob: float = 0.4,
    min_width: int = 1,
    max_n: int | None = None,
    min_taps: int = 1,
) -> LayeredNetwork:
    """Random layered Variant-I network (``L <= max_layers``, widths ``<= max_width``)."""
    L = int(rng.integers(1, max_layers + 1))
    widths = [int(rng.integers(min_width, max_width + 1)) for _ in range(L)]
    if max_n is not None:
        widths[0] = min(widths[0], max_n)
    layers = [[f"n{l}_{i}" for i in range(w)] for l, w in enumerate(widths, start=1)]
    edges: list[tuple[str, str]] = [("S", v) for v in layers[0]]
    for below, above in zip(layers, layers[1:]):
        for v in above:
            preds = [u for u in below if rng.random() < edge_prob]
            if not preds:
                preds = [below[int(rng.integers(len(below)))]]
            edges.extend((u, v) for u in preds)
    K = int(rng.integers(1, max_destinations + 1))
    last = layers[-1]
    for k in range(1, K + 1):
        want = int(rng.integers(min(min_taps, len(last)), len(last) + 1))
        taps = sorted(rng.choice(len(last), size=max(want, 1), replace=False).tolist())
        edges.extend((last[i], f"D{k}") for i in taps)
    nodes = [Node("S", SOURCE)]
    nodes += [Node(v, INTERMEDIATE, VARIANT1) for layer in layers for v in layer]
    nodes += [Node(f"D{k}", DESTINATION) for k in range(1, K + 1)]
    eobjs = [Edge(f"e{i}", u, v) for i, (u, v) in enumerate(edges, start=1)]
    net = Network(nodes, eobjs, "S", [f"D{k}" for k in range(1, K + 1)], field or field_new(257))
    lay = {v: l for l, layer in enumerate(layers, start=1) for v in layer}
    return LayeredNetwork(net, lay)
