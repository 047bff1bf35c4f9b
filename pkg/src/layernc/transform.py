"""Graph rewrites: node splitting to Variant I and layering with SISO relays."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import InvalidNetwork, NotLayered, Unreachable
from .netgraph import (
    DESTINATION,
    INTERMEDIATE,
    SISO,
    SOURCE,
    VARIANT1,
    DestinationSpec,
    Edge,
    Network,
    Node,
    ancestral_order,
    coding_points,
    group_out_edges,
    reachable_from,
    validate,
)


class _Ids:
    """Hands out fresh ids that do not collide with existing ones."""

    def __init__(self, taken):
        self.taken = set(taken)

    def __call__(self, want: str) -> str:
        cand, i = want, 1
        while cand in self.taken:
            cand = f"{want}_{i}"
            i += 1
        self.taken.add(cand)
        return cand


# -- Variant-I conversion ---------------------------------------------------------

@dataclass
class ConversionMap:
    aux: dict[str, list[str]]
    edges: dict[str, list[str]]
    node_origin: dict[str, str | None]
    edge_origin: dict[str, str]
    # aux node -> original out-edge standing for the group it emits
    out_edge_of: dict[str, str] = dc_field(default_factory=dict)
    relays: list[str] = dc_field(default_factory=list)
    network: Network | None = None

    def to_json(self) -> dict:
        return {
            "aux": self.aux,
            "edges": self.edges,
            "relays": self.relays,
        }


def to_variant1(net: Network) -> tuple[Network, ConversionMap]:
    """Split every Variant-II / hybrid node into single-output auxiliaries.

    Node ``v`` emitting ``g`` distinct symbols becomes ``v.1 .. v.g``; each
    auxiliary gets a copy of every input edge of ``v`` and the out-edges of
    its symbol group.  Source edges that would have to fan out to several
    auxiliaries go through a unit-gain relay so the source keeps exactly
    ``n`` out-edges; a SISO relay in the same position becomes a unit-gain
    Variant-I node.
    """
    rep = validate(net)
    if not rep.ok:
        raise InvalidNetwork(rep)
    new_id = _Ids([n.id for n in net.nodes] + [e.id for e in net.edges])
    for n in net.nodes:
        new_id.taken.add(n.id)

    aux: dict[str, list[str]] = {}
    owner: dict[str, str] = {}  # original out-edge id -> emitting aux node
    node_origin: dict[str, str | None] = {}
    out_edge_of: dict[str, str] = {}
    new_nodes: list[Node] = []
    for node in net.nodes:
        split = node.kind == INTERMEDIATE and node.variant != VARIANT1
        groups = [g for g in group_out_edges(net, node.id) if g] if split else []
        if not split or len(groups) <= 1:
            keep = Node(node.id, node.kind, VARIANT1) if split else node
            new_nodes.append(keep)
            aux[node.id] = [node.id]
            node_origin[node.id] = node.id
            if split and groups:
                out_edge_of[node.id] = groups[0][0].id
            for e in net.out_edges(node.id):
                owner[e.id] = node.id
            continue
        ids = []
        for gi, group in enumerate(groups, start=1):
            a = new_id(f"{node.id}.{gi}")
            ids.append(a)
            new_nodes.append(Node(a, INTERMEDIATE, VARIANT1))
            node_origin[a] = node.id
            out_edge_of[a] = group[0].id
            for e in group:
                owner[e.id] = a
        aux[node.id] = ids

    new_edges: list[Edge] = []
    emap: dict[str, list[str]] = {}
    edge_origin: dict[str, str] = {}
    relays: list[str] = []
    relay_nodes: dict[str, Node] = {}
    for e in net.edges:
        heads = aux[e.head]
        tail = owner[e.id]
        if len(heads) == 1:
            new_edges.append(Edge(e.id, tail, heads[0]))
            emap[e.id] = [e.id]
            edge_origin[e.id] = e.id
            continue
        ids = []
        if e.tail == net.source:
            r = new_id(f"{e.id}.relay")
            relays.append(r)
            relay_nodes[r] = Node(r, INTERMEDIATE, VARIANT1)
            node_origin[r] = None
            new_edges.append(Edge(e.id, tail, r))
            edge_origin[e.id] = e.id
            ids.append(e.id)
            tail = r
        for j, h in enumerate(heads, start=1):
            eid = new_id(f"{e.id}.{j}")
            new_edges.append(Edge(eid, tail, h))
            edge_origin[eid] = e.id
            ids.append(eid)
        emap[e.id] = ids

    fanning = {e.tail for e in net.edges if len(aux[e.head]) > 1 and net.node(e.tail).kind == SISO}
    new_nodes = [Node(n.id, INTERMEDIATE, VARIANT1) if n.id in fanning else n for n in new_nodes]

    if relay_nodes:
        # relays sit right after the source in node order
        si = next(i for i, n in enumerate(new_nodes) if n.id == net.source)
        new_nodes[si + 1 : si + 1] = [relay_nodes[r] for r in relays]

    dests = [DestinationSpec(d.node, d.taps) for d in net.destinations]
    out = Network(new_nodes, new_edges, net.source, dests, net.field)
    return out, ConversionMap(aux, emap, node_origin, edge_origin, out_edge_of, relays, out)


# -- layering ---------------------------------------------------------------------

class LayeredNetwork:
    """A network whose intermediate and SISO nodes sit in layers ``1..L``.

    The source is an implicit layer 0 and destinations an implicit layer
    ``L+1``; every edge joins adjacent layers.
    """

    def __init__(
        self,
        network: Network,
        layers: dict[str, int],
        inserted: list[str] | None = None,
        node_origin: dict[str, str | None] | None = None,
        edge_origin: dict[str, str] | None = None,
        chains: dict[str, list[str]] | None = None,
    ):
        self.network = network
        self.layers = dict(layers)
        self.L = max(self.layers.values(), default=0)
        self.inserted = list(inserted or [])
        self.node_origin = node_origin if node_origin is not None else {n.id: n.id for n in network.nodes}
        self.edge_origin = edge_origin if edge_origin is not None else {e.id: e.id for e in network.edges}
        self.chains = chains if chains is not None else {e.id: [e.id] for e in network.edges}
        self.out_edge_of: dict[str, str] = {}
        self._by_layer = [[] for _ in range(self.L + 1)]
        for node in network.nodes:
            if node.id in self.layers:
                self._by_layer[self.layers[node.id]].append(node.id)
        self._check()

    @classmethod
    def from_network(cls, net: Network, layers: dict[str, int] | None = None, inserted=None) -> "LayeredNetwork":
        """Wrap a network that is already layered.

        Without explicit ``layers`` the assignment is computed and must not
        require any relay insertion.
        """
        if layers is None:
            layers = _longest_path_layers(net)
        return cls(net, layers, inserted)

    def _check(self):
        net = self.network
        lay = dict(self.layers)
        lay[net.source] = 0
        for d in net.destinations:
            lay[d.node] = self.L + 1
        for node in net.nodes:
            if node.id not in lay:
                raise NotLayered(f"node {node.id!r} has no layer")
        for e in net.edges:
            if lay[e.head] != lay[e.tail] + 1:
                raise NotLayered(
                    f"edge {e.id!r} joins layer {lay[e.tail]} to layer {lay[e.head]}"
                )
        if self.L and len(self._by_layer[1]) != net.n:
            raise NotLayered(f"layer 1 has {len(self._by_layer[1])} nodes but n = {net.n}")

    def layer_nodes(self, l: int) -> list[str]:
        return list(self._by_layer[l])

    @property
    def sizes(self) -> list[int]:
        """``[n_1, ..., n_L]``."""
        return [len(self._by_layer[l]) for l in range(1, self.L + 1)]

    def __repr__(self):
        return f"LayeredNetwork(L={self.L}, sizes={self.sizes}, inserted={len(self.inserted)})"


def _longest_path_layers(net: Network) -> dict[str, int]:
    order = ancestral_order(net)
    reach = reachable_from(net, net.source)
    for d in net.destinations:
        if d.node not in reach:
            raise Unreachable(f"destination {d.node!r} has no path from the source")
    lay: dict[str, int] = {net.source: 0}
    for v in order:
        node = net.node(v)
        if node.kind in (SOURCE, DESTINATION):
            continue
        if v not in reach:
            raise Unreachable(f"node {v!r} has no path from the source")
        lay[v] = max(lay[u] for u in net.predecessors(v)) + 1
    del lay[net.source]
    return lay


def layer(net: Network) -> LayeredNetwork:
    """Insert SISO relay chains so every source-destination path has L+1 edges.

    Each node's layer is its longest distance from the source; an edge
    spanning ``s`` layers (destinations count as layer ``L+1``) is replaced
    by a chain through ``s-1`` SISO relays.
    """
    rep = validate(net)
    if not rep.ok:
        if "CycleDetected" in rep.codes():
            ancestral_order(net)
        raise InvalidNetwork(rep)
    base = _longest_path_layers(net)
    L = max(base.values(), default=0) or 1
    lay = dict(base)
    lay[net.source] = 0
    for d in net.destinations:
        lay[d.node] = L + 1

    new_id = _Ids([n.id for n in net.nodes] + [e.id for e in net.edges])
    chains: dict[str, list[str]] = {}
    edge_origin: dict[str, str] = {}
    node_origin: dict[str, str | None] = {n.id: n.id for n in net.nodes}
    relays_after: dict[str, list[Node]] = {}
    layers = {v: l for v, l in base.items()}
    inserted: list[str] = []
    new_edges: list[Edge] = []
    for e in net.edges:
        span = lay[e.head] - lay[e.tail]
        if span == 1:
            new_edges.append(e)
            chains[e.id] = [e.id]
            edge_origin[e.id] = e.id
            continue
        prev = e.tail
        ids = []
        for s in range(1, span):
            r = new_id(f"{e.id}.d{s}")
            relays_after.setdefault(e.tail, []).append(Node(r, SISO, VARIANT1))
            node_origin[r] = None
            layers[r] = lay[e.tail] + s
            inserted.append(r)
            eid = new_id(f"{e.id}.{s}")
            new_edges.append(Edge(eid, prev, r))
            ids.append(eid)
            prev = r
        eid = new_id(f"{e.id}.{span}")
        new_edges.append(Edge(eid, prev, e.head))
        ids.append(eid)
        chains[e.id] = ids
        for x in ids:
            edge_origin[x] = e.id

    new_nodes: list[Node] = []
    for node in net.nodes:
        new_nodes.append(node)
        new_nodes.extend(relays_after.get(node.id, ()))
    dests = [DestinationSpec(d.node, tuple(chains[t][-1] for t in d.taps)) for d in net.destinations]
    out = Network(new_nodes, new_edges, net.source, dests, net.field)
    return LayeredNetwork(out, layers, inserted, node_origin, edge_origin, chains)


def layering_cost(net: Network) -> tuple[int, Fraction]:
    """Coding-point count and their mean in-degree (0 when there are none)."""
    cps = coding_points(net)
    if not cps:
        return 0, Fraction(0)
    return len(cps), Fraction(sum(net.in_degree(v) for v in cps), len(cps))


def layered_variant1(net: Network) -> tuple[LayeredNetwork, list]:
    """Layer, convert to Variant I, and re-layer if conversion added relays.

    Returns the final layered network and the list of rewrite steps
    (``LayeredNetwork`` or ``ConversionMap`` objects, in application order)
    needed to transport a coefficient assignment from ``net``.
    """
    steps: list = []
    lnet = layer(net)
    steps.append(lnet)
    cur = lnet.network
    if any(n.kind == INTERMEDIATE and n.variant != VARIANT1 for n in cur.nodes):
        cur, cmap = to_variant1(cur)
        steps.append(cmap)
        lnet = layer(cur)
        steps.append(lnet)
    return lnet, steps
