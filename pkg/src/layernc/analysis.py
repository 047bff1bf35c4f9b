"""Mincut analysis on layered networks.

Three views of the same quantity:

* the largest rank of ``A_k`` seen over random coefficient draws,
* the smallest generic rank among the interlayer matrices (an upper bound),
* edge-disjoint path count by augmenting paths on the original graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from .errors import FieldTooSmall, NotLayered
from .gf import mat_rank
from .lnc import assign_constant, assign_random, individual_channel, interlayer_matrix, trial_seed
from .netgraph import Network
from .transform import LayeredNetwork, layered_variant1


def rank_mincut_estimate(lnet: LayeredNetwork, k, trials: int, seed: int) -> int:
    """Largest ``rank(A_k)`` over ``trials`` independent random assignments.

    Trial ``i`` draws from ``trial_seed(seed, i)``, so the estimate never
    decreases as ``trials`` grows.
    """
    net = lnet.network
    if net.field.q <= net.K:
        raise FieldTooSmall(f"q = {net.field.q} must exceed the number of destinations K = {net.K}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    best = 0
    for i in range(trials):
        asg = assign_random(net, trial_seed(seed, i))
        best = max(best, mat_rank(individual_channel(lnet, asg, k).matrix))
        if best == net.n:
            break
    return best


def structural_rank(mask) -> int:
    """Generic rank of a zero/nonzero pattern: maximum bipartite matching.

    Kuhn's augmenting-path algorithm, rows matched to columns.
    """
    m = np.asarray(mask, dtype=bool)
    if m.ndim != 2 or m.size == 0:
        return 0
    if m.shape[0] > m.shape[1]:
        m = m.T
    adj = [np.flatnonzero(row).tolist() for row in m]
    match_col = [-1] * m.shape[1]

    def augment(r, seen):
        for c in adj[r]:
            if seen[c]:
                continue
            seen[c] = True
            if match_col[c] < 0 or augment(match_col[c], seen):
                match_col[c] = r
                return True
        return False

    size = 0
    for r in range(m.shape[0]):
        if augment(r, [False] * m.shape[1]):
            size += 1
    return size


def layer_patterns(lnet: LayeredNetwork, k) -> list[np.ndarray]:
    """Nonzero patterns of ``A_{1,0}, A_{2,1}, ..., A_{L,L-1}``.

    The last factor keeps only the rows that feed destination k's taps.
    """
    if not isinstance(lnet, LayeredNetwork):
        raise NotLayered("mincut bound needs a LayeredNetwork")
    net = lnet.network
    dest = net.destination(k)
    ones = assign_constant(net, 1)
    pats = [interlayer_matrix(lnet, ones, l).data != 0 for l in range(lnet.L)]
    last = lnet.layer_nodes(lnet.L)
    tapped = {net.edge(t).tail for t in dest.taps}
    keep = [i for i, v in enumerate(last) if v in tapped]
    pats[-1] = pats[-1][keep, :]
    return pats


def mincut_upper_bound(lnet: LayeredNetwork, k) -> int:
    """Smallest generic rank over the interlayer factors of ``A_k``."""
    return min(structural_rank(p) for p in layer_patterns(lnet, k))


def maxflow_mincut(net: Network, k) -> int:
    """Edge-disjoint source-to-D_k paths (unit capacities, Edmonds-Karp)."""
    target = net.destination(k).node
    cap: dict[str, dict[str, int]] = {n.id: {} for n in net.nodes}
    for e in net.edges:
        cap[e.tail][e.head] = cap[e.tail].get(e.head, 0) + 1
        cap[e.head].setdefault(e.tail, 0)
    flow = 0
    while True:
        parent = {net.source: None}
        queue = deque([net.source])
        while queue and target not in parent:
            u = queue.popleft()
            for w, c in cap[u].items():
                if c > 0 and w not in parent:
                    parent[w] = u
                    queue.append(w)
        if target not in parent:
            return flow
        w = target
        while parent[w] is not None:
            u = parent[w]
            cap[u][w] -= 1
            cap[w][u] += 1
            w = u
        flow += 1


@dataclass
class MincutReport:
    destination: str
    estimate: int
    trials: int
    q: int
    layer_ranks: list[int]
    upper_bound: int
    maxflow: int
    L: int = 0
    # (rows, cols) of each pattern behind layer_ranks
    layer_shapes: list[tuple[int, int]] = dc_field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.estimate <= self.upper_bound and self.estimate <= self.maxflow

    def to_json(self) -> dict:
        d = asdict(self)
        d["layer_shapes"] = [list(s) for s in self.layer_shapes]
        d["consistent"] = self.consistent
        return d

    def table(self) -> str:
        """Tab-separated report: per-layer generic ranks, then the summary."""
        lines = ["factor\trows\tcols\tstructural_rank"]
        for l, (r, (nr, nc)) in enumerate(zip(self.layer_ranks, self.layer_shapes)):
            lines.append(f"A_{l + 1},{l}\t{nr}\t{nc}\t{r}")
        lines.append("")
        lines.append("destination\tq\ttrials\testimate\tupper_bound\tmaxflow")
        lines.append(
            f"{self.destination}\t{self.q}\t{self.trials}\t{self.estimate}\t{self.upper_bound}\t{self.maxflow}"
        )
        return "\n".join(lines)


def mincut_report(net: Network, k, trials: int, seed: int) -> MincutReport:
    """Layer, convert to Variant I if needed, then bracket the mincut."""
    lnet, _ = layered_variant1(net)
    dest = net.destination(k)
    pats = layer_patterns(lnet, dest.node)
    ranks = [structural_rank(p) for p in pats]
    return MincutReport(
        destination=dest.node,
        estimate=rank_mincut_estimate(lnet, dest.node, trials, seed),
        trials=trials,
        q=net.field.q,
        layer_ranks=ranks,
        upper_bound=min(ranks),
        maxflow=maxflow_mincut(net, dest.node),
        L=lnet.L,
        layer_shapes=[p.shape for p in pats],
    )
