"""Forward-backward duality for linear network codes.

Reversing every edge and letting each node apply the transpose of its
coefficient matrix turns a forward channel ``A`` into a backward channel
``A^T``.  For a Variant-I node (weights on inputs, one shared output) the
reversed node sums what it receives and scales each outgoing copy by the
weight the forward node used on that edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotLayered, RankDeficient
from .gf import FieldMatrix, independent_rows, mat_mul, mat_rank, mat_solve, random_matrix
from .lnc import (
    ChannelMatrix,
    CodingAssignment,
    _require_variant1,
    channel_matrix,
    individual_matrix,
)
from .netgraph import (
    DESTINATION,
    INTERMEDIATE,
    SISO,
    SOURCE,
    VARIANT2,
    DestinationSpec,
    Edge,
    Network,
    Node,
)
from .transform import LayeredNetwork


def transpose_network(net: Network, asg: CodingAssignment, k) -> tuple[Network, CodingAssignment]:
    """Reverse ``net`` towards destination ``k`` and transpose every node.

    Works for any variant: the backward coefficient for (reversed out-edge
    rho in, reversed in-edge delta out) is the forward ``c[delta, rho]``.
    Destinations other than ``k`` become idle nodes with no input, so every
    edge survives and emits zero backwards.  Edge ids are kept, so a
    coefficient stays attached to the same edge.
    """
    dest = net.destination(k)
    tap_rank = {t: i for i, t in enumerate(dest.taps)}
    taps = sorted((e for e in net.edges if e.head == dest.node), key=lambda e: tap_rank[e.id])
    rest = [e for e in net.edges if e.head != dest.node]
    rev_edges = [Edge(e.id, e.head, e.tail) for e in taps + rest]

    in_deg = {}
    for e in rev_edges:
        in_deg[e.head] = in_deg.get(e.head, 0) + 1
    nodes = []
    for n in net.nodes:
        if n.id == dest.node:
            nodes.append(Node(n.id, SOURCE))
        elif n.id == net.source:
            nodes.append(Node(n.id, DESTINATION))
        elif n.kind == SISO and in_deg.get(n.id, 0) == 1:
            nodes.append(n)
        else:
            # coding nodes, other destinations, and relays that only served them
            nodes.append(Node(n.id, INTERMEDIATE, VARIANT2))
    src_taps = tuple(e.id for e in net.source_edges())
    rnet = Network(nodes, rev_edges, dest.node, [DestinationSpec(net.source, src_taps)], net.field)

    coeffs = {}
    for n in rnet.nodes:
        if n.kind != INTERMEDIATE:
            continue
        for rho in rnet.in_edges(n.id):
            for delta in rnet.out_edges(n.id):
                # forward: delta was an in-edge, rho an out-edge of n
                coeffs[(n.id, rho.id, delta.id)] = asg.coefficient(net, n.id, delta.id, rho.id)
    return rnet, CodingAssignment(asg.field, coeffs, asg.seed)


@dataclass
class ReversedNetwork:
    network: Network
    assignment: CodingAssignment
    forward: LayeredNetwork
    destination: str
    # backward layer index per node: forward layer l becomes L+1-l
    layers: dict[str, int]
    # retained coefficient per edge id
    edge_gain: dict[str, int]

    @property
    def L(self) -> int:
        return self.forward.L

    def layer_nodes(self, b: int) -> list[str]:
        return self.forward.layer_nodes(self.L + 1 - b)


def reverse(lnet: LayeredNetwork, asg: CodingAssignment, k) -> ReversedNetwork:
    """Backward network for destination ``k`` of a layered Variant-I network."""
    if not isinstance(lnet, LayeredNetwork):
        raise NotLayered("reverse() needs a LayeredNetwork")
    net = lnet.network
    _require_variant1(net)
    dest = net.destination(k)
    rnet, rasg = transpose_network(net, asg, dest.node)
    gains = {}
    for e in net.edges:
        if net.node(e.head).kind == DESTINATION:
            continue
        gains[e.id] = asg.coefficient(net, e.head, e.id)
    layers = {v: lnet.L + 1 - l for v, l in lnet.layers.items()}
    return ReversedNetwork(rnet, rasg, lnet, dest.node, layers, gains)


def backward_interlayer_matrix(rev: ReversedNetwork, b: int) -> FieldMatrix:
    """``A_{l,l+1}`` seen from the backward side.

    ``b`` counts backward layers: rows are backward layer ``b+1``, columns
    backward layer ``b``; entry = gain kept on the reversed edge.  ``b = L``
    is the final map into the reverse destination (one row per source edge).
    """
    net = rev.network
    f = rev.assignment.field
    cols = rev.layer_nodes(b)
    col_of = {v: j for j, v in enumerate(cols)}
    if b == rev.L:
        into = net.destination(rev.forward.network.source).taps
        m = np.zeros((len(into), len(cols)), dtype=np.int64)
        for i, eid in enumerate(into):
            m[i, col_of[net.edge(eid).tail]] = rev.edge_gain[eid]
        return FieldMatrix(f, m)
    rows = rev.layer_nodes(b + 1)
    m = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for i, v in enumerate(rows):
        for e in net.in_edges(v):
            m[i, col_of[e.tail]] = rev.edge_gain[e.id]
    return FieldMatrix(f, m)


def backward_matrix(rev: ReversedNetwork) -> ChannelMatrix:
    """``A_b = A_{1,2} A_{2,3} ... A_{L-1,L}``, from all last-layer nodes to the source."""
    acc = None
    for b in range(1, rev.L + 1):
        m = backward_interlayer_matrix(rev, b)
        acc = m if acc is None else mat_mul(m, acc)
    fwd = rev.forward.network
    return ChannelMatrix(acc, tuple(e.id for e in fwd.source_edges()), tuple(rev.layer_nodes(1)))


def backward_individual(rev: ReversedNetwork) -> ChannelMatrix:
    """Backward map restricted to the reverse source's taps (``A_k^T``)."""
    a = backward_matrix(rev)
    col_of = {v: j for j, v in enumerate(a.col_labels)}
    taps = rev.network.source_edges()
    cols = [col_of[e.head] for e in taps]
    return ChannelMatrix(a.matrix.take_cols(cols), a.row_labels, tuple(e.id for e in taps))


def backward_valid(lnet: LayeredNetwork, asg: CodingAssignment, k) -> bool:
    rev = reverse(lnet, asg, k)
    return mat_rank(backward_individual(rev).matrix) == lnet.network.n


def backward_channel_by_simulation(rev: ReversedNetwork) -> ChannelMatrix:
    """Backward ``A_k^T`` assembled by simulating the reversed network."""
    return channel_matrix(rev.network, rev.assignment, 1)


def square_reduce(lnet: LayeredNetwork, asg: CodingAssignment, k) -> tuple[list[int], LayeredNetwork]:
    """Keep the first ``n`` independent rows of ``A_k`` and drop the other taps."""
    net = lnet.network
    dest = net.destination(k)
    a = individual_matrix(lnet, asg, dest.node)
    n = net.n
    rows = independent_rows(a.matrix)
    if len(rows) < n:
        raise RankDeficient(f"A_k has rank {len(rows)} < n = {n}")
    rows = rows[:n]
    kept = {dest.taps[i] for i in rows}
    drop = set(dest.taps) - kept
    edges = [e for e in net.edges if e.id not in drop]
    dests = [
        DestinationSpec(d.node, tuple(t for t in d.taps if t in kept)) if d.node == dest.node else d
        for d in net.destinations
    ]
    reduced = Network(net.nodes, edges, net.source, dests, net.field)
    out = LayeredNetwork(reduced, lnet.layers, lnet.inserted, lnet.node_origin,
                         {e: o for e, o in lnet.edge_origin.items() if e not in drop}, lnet.chains)
    return rows, out


def precode(rev: ReversedNetwork, P: FieldMatrix) -> ChannelMatrix:
    """End-to-end backward map ``A_k^T P`` when the reverse source sends ``P x_b``."""
    a_bk = backward_individual(rev)
    m = mat_mul(a_bk.matrix, P)
    n = rev.forward.network.n
    if mat_rank(m) < n:
        raise RankDeficient(f"A^T P has rank {mat_rank(m)} < n = {n}")
    return ChannelMatrix(m, a_bk.row_labels, tuple(f"x_b{j + 1}" for j in range(P.cols)))


def random_precoder(rev: ReversedNetwork, seed: int, retries: int = 32) -> FieldMatrix:
    """Random ``N_k x n`` precoder that keeps ``A_k^T P`` invertible."""
    n = rev.forward.network.n
    nk = len(rev.network.source_edges())
    a_bk = backward_individual(rev).matrix
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(retries):
        P = random_matrix(a_bk.field, nk, n, rng)
        if mat_rank(mat_mul(a_bk, P)) == n:
            return P
    raise RankDeficient(f"no full-rank precoder found in {retries} draws")


def selection_precoder(field, nk: int, rows: list[int]) -> FieldMatrix:
    """``N_k x n`` matrix whose columns pick the kept taps."""
    m = np.zeros((nk, len(rows)), dtype=np.int64)
    for j, r in enumerate(rows):
        m[r, j] = 1
    return FieldMatrix(field, m)


def decode(channel: FieldMatrix, y) -> np.ndarray:
    """Solve ``channel @ x = y`` for the transmitted symbols."""
    ycol = FieldMatrix(channel.field, np.asarray(y, dtype=np.int64).reshape(channel.rows, -1))
    return mat_solve(channel, ycol).data[:, 0] if ycol.cols == 1 else mat_solve(channel, ycol).data
