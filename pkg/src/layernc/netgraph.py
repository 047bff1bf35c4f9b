"""Directed acyclic network model.

A :class:`Network` is a plain container; structural checks live in
:func:`validate`, which reports every violated invariant instead of
stopping at the first one.
"""

from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Union

from .errors import CycleDetected, UnknownDestination, UnknownNode
from .gf import FieldSpec, field_new

SOURCE = "source"
INTERMEDIATE = "intermediate"
SISO = "siso"
DESTINATION = "destination"
KINDS = (SOURCE, INTERMEDIATE, SISO, DESTINATION)

VARIANT1 = "variant1"
VARIANT2 = "variant2"


@dataclass(frozen=True)
class Hybrid:
    """A node that emits ``h`` distinct symbols over its out-edges."""

    h: int


Variant = Union[str, Hybrid]


@dataclass(frozen=True)
class Node:
    id: str
    kind: str = INTERMEDIATE
    variant: Variant = VARIANT1


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class DestinationSpec:
    node: str
    taps: tuple[str, ...]

    @property
    def n_taps(self) -> int:
        return len(self.taps)


class Network:
    """One source, K destinations, intermediate and SISO relay nodes.

    Node and edge order is significant: it fixes the order of in/out edges
    at every node (and hence coefficient matrix rows/columns), the order of
    source symbols, and the default order of destination taps.
    """

    def __init__(
        self,
        nodes: Iterable[Node],
        edges: Iterable[Edge],
        source: str,
        destinations: Iterable[DestinationSpec | str],
        field: FieldSpec | None = None,
    ):
        self.nodes: tuple[Node, ...] = tuple(nodes)
        self.edges: tuple[Edge, ...] = tuple(edges)
        self.source = source
        self.field = field if field is not None else field_new(2)
        self._node = {n.id: n for n in self.nodes}
        self._edge = {e.id: e for e in self.edges}
        self._in: dict[str, list[Edge]] = defaultdict(list)
        self._out: dict[str, list[Edge]] = defaultdict(list)
        for e in self.edges:
            self._out[e.tail].append(e)
            self._in[e.head].append(e)
        dests = []
        for d in destinations:
            if isinstance(d, str):
                d = DestinationSpec(d, tuple(e.id for e in self._in.get(d, ())))
            dests.append(d)
        self.destinations: tuple[DestinationSpec, ...] = tuple(dests)

    # -- lookups ---------------------------------------------------------------

    def node(self, nid: str) -> Node:
        try:
            return self._node[nid]
        except KeyError:
            raise UnknownNode(f"unknown node {nid!r}") from None

    def edge(self, eid: str) -> Edge:
        return self._edge[eid]

    def has_node(self, nid: str) -> bool:
        return nid in self._node

    def in_edges(self, nid: str) -> list[Edge]:
        return list(self._in.get(nid, ()))

    def out_edges(self, nid: str) -> list[Edge]:
        return list(self._out.get(nid, ()))

    def in_degree(self, nid: str) -> int:
        return len(self._in.get(nid, ()))

    def out_degree(self, nid: str) -> int:
        return len(self._out.get(nid, ()))

    @property
    def n(self) -> int:
        """Number of source symbols (source out-degree)."""
        return self.out_degree(self.source)

    @property
    def K(self) -> int:
        return len(self.destinations)

    def source_edges(self) -> list[Edge]:
        return self.out_edges(self.source)

    def destination(self, k: int | str) -> DestinationSpec:
        """Destination ``D_k`` by 1-based index, or by node id."""
        if isinstance(k, str):
            for d in self.destinations:
                if d.node == k:
                    return d
            raise UnknownDestination(f"no destination {k!r}")
        if not 1 <= k <= len(self.destinations):
            raise UnknownDestination(f"destination index {k} outside 1..{len(self.destinations)}")
        return self.destinations[k - 1]

    def coding_nodes(self) -> list[Node]:
        """Nodes that apply coefficients: intermediate nodes (not SISO relays)."""
        return [n for n in self.nodes if n.kind == INTERMEDIATE]

    def successors(self, nid: str) -> list[str]:
        return [e.head for e in self._out.get(nid, ())]

    def predecessors(self, nid: str) -> list[str]:
        return [e.tail for e in self._in.get(nid, ())]

    def replace(self, **kw) -> "Network":
        args = dict(
            nodes=self.nodes, edges=self.edges, source=self.source,
            destinations=self.destinations, field=self.field,
        )
        args.update(kw)
        return Network(**args)

    def __repr__(self):
        return (
            f"Network({len(self.nodes)} nodes, {len(self.edges)} edges, "
            f"n={self.n}, K={self.K}, {self.field!r})"
        )


def group_out_edges(net: Network, nid: str) -> list[list[Edge]]:
    """Out-edges partitioned into the node's distinct output symbols.

    Variant-I and SISO nodes have one group; Variant-II nodes one group per
    edge; hybrid(h) nodes ``h`` contiguous groups of near-equal size in
    out-edge order (the first ``d mod h`` groups take one extra edge).
    """
    node = net.node(nid)
    out = net.out_edges(nid)
    v = node.variant
    if node.kind != INTERMEDIATE or v == VARIANT1 or not out:
        return [out]
    if v == VARIANT2:
        return [[e] for e in out]
    h = v.h
    base, extra = divmod(len(out), h)
    groups, i = [], 0
    for g in range(h):
        size = base + (1 if g < extra else 0)
        groups.append(out[i : i + size])
        i += size
    return groups


# -- validation ------------------------------------------------------------------

@dataclass(frozen=True)
class Issue:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass
class ValidationReport:
    issues: list[Issue] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def codes(self) -> set[str]:
        return {i.code for i in self.issues}

    def add(self, code: str, message: str):
        self.issues.append(Issue(code, message))

    def to_json(self) -> dict:
        return {"ok": self.ok, "issues": [{"code": i.code, "message": i.message} for i in self.issues]}


def validate(net: Network) -> ValidationReport:
    rep = ValidationReport()
    seen: set[str] = set()
    for n in net.nodes:
        if n.id in seen:
            rep.add("DuplicateNode", f"node id {n.id!r} repeated")
        seen.add(n.id)
        if n.kind not in KINDS:
            rep.add("BadKind", f"node {n.id!r} has kind {n.kind!r}")
    eids: set[str] = set()
    pairs: set[tuple[str, str]] = set()
    for e in net.edges:
        if e.id in eids:
            rep.add("DuplicateEdge", f"edge id {e.id!r} repeated")
        eids.add(e.id)
        for end in (e.tail, e.head):
            if end not in seen:
                rep.add("UnknownEndpoint", f"edge {e.id!r} references unknown node {end!r}")
        if (e.tail, e.head) in pairs:
            rep.add("ParallelEdge", f"more than one edge {e.tail!r} -> {e.head!r}")
        pairs.add((e.tail, e.head))
        if e.tail == e.head:
            rep.add("CycleDetected", f"self-loop on {e.tail!r}")

    sources = [n for n in net.nodes if n.kind == SOURCE]
    if len(sources) != 1:
        rep.add("SourceCount", f"expected exactly one source node, found {len(sources)}")
    if not net.has_node(net.source) or net.node(net.source).kind != SOURCE:
        rep.add("SourceCount", f"declared source {net.source!r} is not a source node")
    for s in sources:
        if net.in_degree(s.id):
            rep.add("SourceInDegree", f"source {s.id!r} has incoming edges")

    dest_ids = {d.node for d in net.destinations}
    for n in net.nodes:
        if n.kind == DESTINATION:
            if n.id not in dest_ids:
                rep.add("UndeclaredDestination", f"destination node {n.id!r} missing from destination list")
            if net.out_degree(n.id):
                rep.add("DestinationOutDegree", f"destination {n.id!r} has outgoing edges")
        if n.kind == SISO and (net.in_degree(n.id) != 1 or net.out_degree(n.id) != 1):
            rep.add("SisoDegree", f"SISO node {n.id!r} must have in- and out-degree 1")
        if isinstance(n.variant, Hybrid):
            d = net.out_degree(n.id)
            if not 1 <= n.variant.h <= max(d, 1):
                rep.add("HybridRange", f"node {n.id!r}: hybrid h={n.variant.h} outside 1..{d}")
        elif n.variant not in (VARIANT1, VARIANT2):
            rep.add("BadVariant", f"node {n.id!r} has variant {n.variant!r}")

    if not net.destinations:
        rep.add("NoDestination", "network declares no destinations")
    for d in net.destinations:
        if not net.has_node(d.node) or net.node(d.node).kind != DESTINATION:
            rep.add("BadDestination", f"{d.node!r} is not a destination node")
            continue
        incoming = [e.id for e in net.in_edges(d.node)]
        if not d.taps:
            rep.add("NoTaps", f"destination {d.node!r} has no incoming edges")
        elif sorted(d.taps) != sorted(incoming):
            rep.add("TapMismatch", f"taps of {d.node!r} differ from its incoming edges")

    if "CycleDetected" not in rep.codes() and "UnknownEndpoint" not in rep.codes():
        try:
            ancestral_order(net)
        except CycleDetected as exc:
            rep.add("CycleDetected", str(exc))
    return rep


# -- orderings and queries -------------------------------------------------------

def ancestral_order(net: Network) -> list[str]:
    """Topological order; ties go to the node listed first.

    Kahn's algorithm with a heap keyed on list position, so the output is
    deterministic and every edge points forward.
    """
    pos = {n.id: i for i, n in enumerate(net.nodes)}
    indeg = {n.id: 0 for n in net.nodes}
    for e in net.edges:
        indeg[e.head] += 1
    heap = [pos[v] for v, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = net.nodes[heapq.heappop(heap)].id
        order.append(v)
        for w in net.successors(v):
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, pos[w])
    if len(order) != len(net.nodes):
        stuck = sorted(v for v, d in indeg.items() if d > 0)
        raise CycleDetected(f"cycle among nodes {stuck}")
    return order


def coding_points(net: Network) -> set[str]:
    return {n.id for n in net.nodes if n.kind != DESTINATION and net.in_degree(n.id) >= 2}


def path_length_spectrum(net: Network, target: str) -> set[int]:
    """Distinct edge counts over all source-to-``target`` paths.

    Dynamic programming over the ancestral order; an unreachable target
    yields the empty set.
    """
    net.node(target)
    lengths: dict[str, set[int]] = {v: set() for v in ancestral_order(net)}
    lengths[net.source] = {0}
    for v in lengths:
        here = lengths[v]
        if not here:
            continue
        for w in net.successors(v):
            lengths[w].update(x + 1 for x in here)
    return lengths[target]


def reachable_from(net: Network, start: str) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in net.successors(v):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen
