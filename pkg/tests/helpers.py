"""Small builders shared by the unit tests."""

from layernc.gf import field_new
from layernc.netgraph import DESTINATION, INTERMEDIATE, SISO, SOURCE, VARIANT1, Edge, Network, Node


def build(edges, variants=None, kinds=None, dests=None, field=None):
    """Network from ``[(id, tail, head), ...]``; S is the source, D* destinations."""
    variants = variants or {}
    kinds = kinds or {}
    names = []
    for _, u, v in edges:
        for x in (u, v):
            if x not in names:
                names.append(x)
    nodes = []
    for x in names:
        if x == "S":
            nodes.append(Node(x, SOURCE))
        elif x.startswith("D"):
            nodes.append(Node(x, DESTINATION))
        else:
            nodes.append(Node(x, kinds.get(x, INTERMEDIATE), variants.get(x, VARIANT1)))
    dests = dests or [x for x in names if x.startswith("D")]
    return Network(nodes, [Edge(*e) for e in edges], "S", dests, field or field_new(7))


def all_paths(net, target):
    """Every source-to-target path as an edge-id list, by plain DFS."""
    out = []

    def walk(v, path):
        if v == target:
            out.append(list(path))
            return
        for e in net.out_edges(v):
            path.append(e.id)
            walk(e.head, path)
            path.pop()

    walk(net.source, [])
    return out


__all__ = ["build", "all_paths", "SISO"]
