"""Linear network coding engine.

Coefficients are keyed by ``(node, in_edge, out_edge)``.  ``out_edge`` is
``None`` for Variant-I nodes (one coefficient per in-edge) and the first
out-edge of the emitted symbol group otherwise.  SISO relays carry no
coefficients; they forward with unit gain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import NotLayered, NotVariant1, UnknownNode
from .gf import FieldMatrix, FieldSpec, mat_mul, mat_rank
from .netgraph import (
    DESTINATION,
    INTERMEDIATE,
    SISO,
    SOURCE,
    VARIANT1,
    Network,
    ancestral_order,
    group_out_edges,
)
from .transform import LayeredNetwork

PRNG_NAME = "pcg64"

Key = tuple[str, str, Union[str, None]]


def required_keys(net: Network) -> list[Key]:
    """Every coefficient key the network needs, in node/edge order."""
    keys: list[Key] = []
    for node in net.nodes:
        if node.kind != INTERMEDIATE:
            continue
        ins = net.in_edges(node.id)
        if node.variant == VARIANT1:
            keys.extend((node.id, e.id, None) for e in ins)
            continue
        for group in group_out_edges(net, node.id):
            if group:
                keys.extend((node.id, e.id, group[0].id) for e in ins)
    return keys


class CodingAssignment:
    """Immutable map from coefficient keys to field values."""

    def __init__(self, field: FieldSpec, coeffs: Mapping[Key, int], seed: int | None = None):
        self.field = field
        self._c = {k: int(v) % field.q for k, v in coeffs.items()}
        self.seed = seed

    def __getitem__(self, key: Key) -> int:
        return self._c[key]

    def get(self, key: Key, default=None):
        return self._c.get(key, default)

    def items(self):
        return self._c.items()

    def __len__(self):
        return len(self._c)

    def __eq__(self, other):
        return isinstance(other, CodingAssignment) and self.field == other.field and self._c == other._c

    def covers(self, net: Network) -> bool:
        return all(k in self._c for k in required_keys(net))

    def coefficient(self, net: Network, node: str, in_edge: str, out_edge: str | None = None) -> int:
        """Gain applied at ``node`` to ``in_edge`` when producing ``out_edge``.

        For Variant-I nodes ``out_edge`` is ignored; for split nodes it is
        mapped to its group representative.
        """
        n = net.node(node)
        if n.kind != INTERMEDIATE:
            return 1
        if n.variant == VARIANT1:
            return self._c[(node, in_edge, None)]
        for group in group_out_edges(net, node):
            if any(e.id == out_edge for e in group):
                return self._c[(node, in_edge, group[0].id)]
        raise KeyError(f"{out_edge!r} is not an out-edge of {node!r}")

    def __repr__(self):
        return f"CodingAssignment({self.field!r}, {len(self._c)} coefficients)"


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(int(seed)))


def assign_random(net: Network, seed, field: FieldSpec | None = None) -> CodingAssignment:
    """Draw every coefficient uniformly from F_q with a seeded PCG64 stream.

    Values are drawn in :func:`required_keys` order, so the assignment is a
    function of (network, seed) alone.
    """
    f = field or net.field
    keys = required_keys(net)
    vals = _rng(seed).integers(0, f.q, size=len(keys), dtype=np.int64)
    return CodingAssignment(f, dict(zip(keys, vals.tolist())), seed if isinstance(seed, int) else None)


def trial_seed(seed: int, i: int) -> np.random.SeedSequence:
    """Independent per-trial seed; trial ``i`` does not depend on the trial count."""
    return np.random.SeedSequence(int(seed), spawn_key=(i,))


def assign_constant(net: Network, value: int = 1) -> CodingAssignment:
    return CodingAssignment(net.field, {k: value for k in required_keys(net)})


def transport(asg: CodingAssignment, src: Network, dst: Network, mapping) -> CodingAssignment:
    """Carry coefficients across a rewrite (layering or Variant-I conversion).

    ``mapping`` is a :class:`LayeredNetwork` or :class:`ConversionMap`; both
    expose ``node_origin``, ``edge_origin`` and ``out_edge_of``.  Nodes with
    no origin (unit relays) get gain 1.
    """
    out: dict[Key, int] = {}
    for node, ein, eout in required_keys(dst):
        orig = mapping.node_origin.get(node)
        if orig is None:
            out[(node, ein, eout)] = 1
            continue
        rho = mapping.out_edge_of.get(node)
        if eout is not None:
            rho = mapping.edge_origin[eout]
        elif rho is None and src.node(orig).kind == INTERMEDIATE and src.node(orig).variant != VARIANT1:
            # dead-end split node: its output reaches nobody
            out[(node, ein, eout)] = 1
            continue
        out[(node, ein, eout)] = asg.coefficient(src, orig, mapping.edge_origin[ein], rho)
    return CodingAssignment(asg.field, out, asg.seed)


def transport_steps(asg: CodingAssignment, net: Network, steps: Sequence) -> CodingAssignment:
    """Apply :func:`transport` through the steps from ``layered_variant1``."""
    for step in steps:
        asg = transport(asg, net, step.network, step)
        net = step.network
    return asg


# -- local and interlayer matrices ----------------------------------------------------

def node_matrix(net: Network, asg: CodingAssignment, node: str) -> FieldMatrix:
    """The out-degree x in-degree coefficient matrix ``C_i``."""
    n = net.node(node)
    if n.kind == SISO:
        return FieldMatrix.identity(asg.field, 1)
    if n.kind != INTERMEDIATE:
        raise UnknownNode(f"{node!r} is a {n.kind} node, not a coding node")
    ins, outs = net.in_edges(node), net.out_edges(node)
    data = [[asg.coefficient(net, node, ei.id, eo.id) for ei in ins] for eo in outs]
    return FieldMatrix(asg.field, np.array(data, dtype=np.int64).reshape(len(outs), len(ins)))


def _require_variant1(net: Network):
    bad = [n.id for n in net.nodes if n.kind == INTERMEDIATE and n.variant != VARIANT1]
    if bad:
        raise NotVariant1(f"nodes {bad} are not Variant I; convert with to_variant1 first")


def interlayer_matrix(lnet: LayeredNetwork, asg: CodingAssignment, l: int) -> FieldMatrix:
    """``A_{l+1,l}``: entry (i, j) is the gain node i of layer l+1 applies to node j of layer l.

    ``l = 0`` gives the ``n_1 x n`` injection matrix from the source edges
    into layer 1 (diagonal up to node order).
    """
    if not isinstance(lnet, LayeredNetwork):
        raise NotLayered("interlayer matrices need a LayeredNetwork")
    if not 0 <= l <= lnet.L - 1:
        raise ValueError(f"layer index {l} outside 0..{lnet.L - 1}")
    net = lnet.network
    _require_variant1(net)
    rows = lnet.layer_nodes(l + 1)
    if l == 0:
        cols_edges = net.source_edges()
        col_of = {e.id: j for j, e in enumerate(cols_edges)}
        ncols = len(cols_edges)
    else:
        cols = lnet.layer_nodes(l)
        col_of_node = {v: j for j, v in enumerate(cols)}
        ncols = len(cols)
    m = np.zeros((len(rows), ncols), dtype=np.int64)
    for i, v in enumerate(rows):
        for e in net.in_edges(v):
            j = col_of[e.id] if l == 0 else col_of_node[e.tail]
            m[i, j] = asg.coefficient(net, v, e.id)
    return FieldMatrix(asg.field, m)


@dataclass(frozen=True)
class ChannelMatrix:
    matrix: FieldMatrix
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]

    @property
    def shape(self):
        return self.matrix.shape

    def to_json(self) -> dict:
        return {
            "rows": self.matrix.rows,
            "cols": self.matrix.cols,
            "row_labels": list(self.row_labels),
            "col_labels": list(self.col_labels),
            "data": self.matrix.tolist(),
        }


def overall_matrix(lnet: LayeredNetwork, asg: CodingAssignment) -> ChannelMatrix:
    """``A = A_{L,L-1} ... A_{2,1} A_{1,0}``; rows are layer-L nodes, columns source edges."""
    acc = interlayer_matrix(lnet, asg, 0)
    for l in range(1, lnet.L):
        acc = mat_mul(interlayer_matrix(lnet, asg, l), acc)
    net = lnet.network
    return ChannelMatrix(acc, tuple(lnet.layer_nodes(lnet.L)), tuple(e.id for e in net.source_edges()))


def individual_matrix(lnet: LayeredNetwork, asg: CodingAssignment, k: int | str) -> ChannelMatrix:
    """``A_k``: the rows of ``A`` that feed destination k's taps, in tap order."""
    dest = lnet.network.destination(k)
    a = overall_matrix(lnet, asg)
    row_of = {v: i for i, v in enumerate(a.row_labels)}
    rows = [row_of[lnet.network.edge(t).tail] for t in dest.taps]
    return ChannelMatrix(a.matrix.take_rows(rows), dest.taps, a.col_labels)


# -- simulation -------------------------------------------------------------------------

def _propagate(net: Network, asg: CodingAssignment, x: np.ndarray) -> dict[str, np.ndarray]:
    """Edge values for a batch of source vectors (x has shape n x t)."""
    f = asg.field
    vals: dict[str, np.ndarray] = {}
    for j, e in enumerate(net.source_edges()):
        vals[e.id] = x[j]
    zero = np.zeros(x.shape[1], dtype=np.int64)
    for v in ancestral_order(net):
        node = net.node(v)
        if node.kind in (SOURCE, DESTINATION):
            continue
        ins = net.in_edges(v)
        if node.kind == SISO:
            for e in net.out_edges(v):
                vals[e.id] = vals[ins[0].id] if ins else zero
            continue
        for group in group_out_edges(net, v):
            if not group:
                continue
            acc = zero
            for e in ins:
                c = asg.coefficient(net, v, e.id, group[0].id)
                acc = f.vadd(acc, f.vmul(c, vals[e.id]))
            for e in group:
                vals[e.id] = acc
    return vals


def _as_batch(net: Network, x) -> tuple[np.ndarray, bool]:
    arr = np.array(x, dtype=np.int64)
    single = arr.ndim == 1
    arr = arr.reshape(-1, 1) if single else arr
    if arr.shape[0] != net.n:
        raise ValueError(f"expected {net.n} source symbols, got {arr.shape[0]}")
    return arr, single


def simulate(net: Network, asg: CodingAssignment, x) -> dict[str, np.ndarray]:
    """Receive vectors ``y_k`` keyed by destination node id.

    ``x`` may be a length-n vector or an n x t batch; the result mirrors it.
    """
    batch, single = _as_batch(net, x)
    batch %= asg.field.q
    vals = _propagate(net, asg, batch)
    out = {}
    for d in net.destinations:
        y = np.array([vals[t] for t in d.taps], dtype=np.int64).reshape(len(d.taps), batch.shape[1])
        out[d.node] = y[:, 0] if single else y
    return out


def channel_matrix(net: Network, asg: CodingAssignment, k: int | str) -> ChannelMatrix:
    """``A_k`` of any network, assembled by simulating unit vectors."""
    dest = net.destination(k)
    eye = np.eye(net.n, dtype=np.int64)
    y = simulate(net, asg, eye)[dest.node]
    return ChannelMatrix(FieldMatrix(asg.field, y), dest.taps, tuple(e.id for e in net.source_edges()))


@dataclass
class TimedTrace:
    arrivals: dict[str, list[int]]
    fired: dict[str, int]

    def buffer_depth(self, node: str) -> int:
        ticks = self.arrivals.get(node) or [0]
        return max(ticks) - min(ticks)

    def synchronized(self) -> bool:
        return all(len(set(t)) <= 1 for t in self.arrivals.values())

    def to_json(self) -> dict:
        return {
            "arrivals": {v: t for v, t in self.arrivals.items()},
            "fired": self.fired,
            "buffer_depth": {v: self.buffer_depth(v) for v in self.arrivals},
        }


def simulate_timed(net: Network, asg: CodingAssignment, x) -> tuple[dict[str, np.ndarray], TimedTrace]:
    """Tick-by-tick propagation with one tick per edge traversal.

    The source emits at tick 0.  A node fires in the tick its last input
    arrives; earlier inputs wait in its buffer, so the spread of a node's
    arrival ticks is the buffer depth it needs.
    """
    f = asg.field
    batch, single = _as_batch(net, x)
    batch %= f.q
    zero = np.zeros(batch.shape[1], dtype=np.int64)
    arrivals: dict[str, list[int]] = {n.id: [] for n in net.nodes if n.kind != SOURCE}
    fired: dict[str, int] = {net.source: 0}
    have: dict[str, np.ndarray] = {}
    pending = {n.id: net.in_degree(n.id) for n in net.nodes}
    in_flight: list[tuple[str, np.ndarray]] = [(e.id, batch[j]) for j, e in enumerate(net.source_edges())]
    for v in (n.id for n in net.nodes if n.kind != SOURCE and pending[n.id] == 0):
        in_flight.extend((e.id, zero) for e in net.out_edges(v))
        fired[v] = 0
    tick = 0
    while in_flight:
        tick += 1
        landed, in_flight = in_flight, []
        ready = []
        for eid, val in landed:
            have[eid] = val
            head = net.edge(eid).head
            arrivals[head].append(tick)
            pending[head] -= 1
            if pending[head] == 0:
                ready.append(head)
        for v in ready:
            node = net.node(v)
            fired[v] = tick
            if node.kind == DESTINATION:
                continue
            ins = net.in_edges(v)
            if node.kind == SISO:
                in_flight.extend((e.id, have[ins[0].id]) for e in net.out_edges(v))
                continue
            for group in group_out_edges(net, v):
                if not group:
                    continue
                acc = zero
                for e in ins:
                    acc = f.vadd(acc, f.vmul(asg.coefficient(net, v, e.id, group[0].id), have[e.id]))
                in_flight.extend((e.id, acc) for e in group)
    out = {}
    for d in net.destinations:
        y = np.array([have.get(t, zero) for t in d.taps], dtype=np.int64).reshape(len(d.taps), batch.shape[1])
        out[d.node] = y[:, 0] if single else y
    return out, TimedTrace({v: sorted(t) for v, t in arrivals.items()}, fired)


def is_valid(net_or_lnet, asg: CodingAssignment, k: int | str) -> bool:
    """True iff ``A_k`` has full column rank n."""
    if isinstance(net_or_lnet, LayeredNetwork):
        net = net_or_lnet.network
        try:
            a = individual_matrix(net_or_lnet, asg, k)
        except NotVariant1:
            a = channel_matrix(net, asg, k)
    else:
        net = net_or_lnet
        a = channel_matrix(net, asg, k)
    return mat_rank(a.matrix) == net.n


def individual_channel(lnet: LayeredNetwork, asg: CodingAssignment, k: int | str) -> ChannelMatrix:
    """``A_k`` via the interlayer product when possible, else by simulation."""
    try:
        return individual_matrix(lnet, asg, k)
    except NotVariant1:
        return channel_matrix(lnet.network, asg, k)
