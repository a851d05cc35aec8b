"""Spillover networks: construction, max-outgoing subgraphs, PageRank.

Edges follow the direction risk flows: a positive net pairwise entry for
(receiver i, source j) becomes the edge j -> i. Under that orientation the
PageRank mass accumulates on net risk absorbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connect import ConnectednessTable, NetPairwiseMatrix
from .errors import ConvergenceError, SchemaError


@dataclass(frozen=True)
class NetworkNode:
    id: str
    net_pct: float
    role: str  # "transmitter" (net > 0) or "receiver"


@dataclass(frozen=True)
class NetworkEdge:
    source: str
    target: str
    weight_pct: float


@dataclass(frozen=True)
class SpilloverNetwork:
    """Directed weighted graph of net pairwise spillovers."""

    nodes: tuple[NetworkNode, ...]
    edges: tuple[NetworkEdge, ...]

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    def outgoing(self, node_id: str) -> list[NetworkEdge]:
        return [e for e in self.edges if e.source == node_id]


@dataclass(frozen=True)
class PageRankScores:
    """Stationary scores of the damped walk; they sum to 1."""

    scores: dict[str, float]
    damping: float
    iterations_used: int

    def ranking(self) -> list[tuple[str, float]]:
        return sorted(self.scores.items(), key=lambda kv: (-kv[1], kv[0]))


def build_network(npm: NetPairwiseMatrix, table: ConnectednessTable) -> SpilloverNetwork:
    """Turn a net pairwise matrix into a graph with node roles from the table.

    npm.values[i, j] > 0 means i receives from j on net, giving edge j -> i.
    """
    if npm.series_ids != table.series_ids:
        raise SchemaError(
            f"net pairwise ids {npm.series_ids} do not match table ids {table.series_ids}")
    ids = npm.series_ids
    nodes = tuple(
        NetworkNode(sid, float(table.net_pct[i]),
                    "transmitter" if table.net_pct[i] > 0.0 else "receiver")
        for i, sid in enumerate(ids))
    edges = []
    for i in range(len(ids)):
        for j in range(len(ids)):
            w = npm.values[i, j]
            if w > 0.0:
                edges.append(NetworkEdge(source=ids[j], target=ids[i], weight_pct=float(w)))
    edges.sort(key=lambda e: (e.source, e.target))
    return SpilloverNetwork(nodes, tuple(edges))


def max_out_subgraph(net: SpilloverNetwork) -> SpilloverNetwork:
    """Keep only each node's largest outgoing edge (ties: smallest target id)."""
    best: dict[str, NetworkEdge] = {}
    for e in net.edges:
        cur = best.get(e.source)
        if cur is None or e.weight_pct > cur.weight_pct or (
                e.weight_pct == cur.weight_pct and e.target < cur.target):
            best[e.source] = e
    kept = sorted(best.values(), key=lambda e: (e.source, e.target))
    return SpilloverNetwork(net.nodes, tuple(kept))


def pagerank(net: SpilloverNetwork, damping: float = 0.85, tol: float = 1e-12,
             max_iter: int = 1000) -> PageRankScores:
    """Weighted PageRank by power iteration.

    Mass moves along edge direction in proportion to edge weights; nodes with
    no outgoing edges spread uniformly. Converged when the L1 change drops
    below ``tol``.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError(f"damping must be in (0, 1), got {damping}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    ids = net.node_ids
    n = len(ids)
    index = {sid: k for k, sid in enumerate(ids)}
    transition = np.zeros((n, n))  # transition[u, v]: share of u's mass sent to v
    for e in net.edges:
        transition[index[e.source], index[e.target]] = e.weight_pct
    out_sum = transition.sum(axis=1)
    dangling = out_sum == 0.0
    transition[~dangling] /= out_sum[~dangling, None]

    r = np.full(n, 1.0 / n)
    for iteration in range(1, max_iter + 1):
        flow = transition.T @ r
        flow += r[dangling].sum() / n
        r_next = damping * flow + (1.0 - damping) / n
        residual = float(np.abs(r_next - r).sum())
        r = r_next
        if residual < tol:
            return PageRankScores({sid: float(r[k]) for k, sid in enumerate(ids)},
                                  damping, iteration)
    raise ConvergenceError(
        f"PageRank did not converge in {max_iter} iterations (last residual {residual:.3e})")
