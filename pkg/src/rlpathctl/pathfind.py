"""Path extraction from a trained model, plus exact graph-search oracles."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .policynet import PolicyNet, forward
from .rlenv import one_hot
from .topo import AdjacencyModel


class ExtractionError(Exception):
    """Rollout got trapped before reaching the end node."""

    def __init__(self, message: str, partial: list[int]):
        super().__init__(message)
        self.partial = partial


class NoPathError(Exception):
    """Destination unreachable from source."""


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]
    dpids: tuple[str, ...]

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class Verdict:
    valid: bool
    hop_count: int
    oracle_hops: int
    is_shortest: bool

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "hops": self.hop_count,
            "oracle_hops": self.oracle_hops,
            "is_shortest": self.is_shortest,
        }


def _as_path(adj: AdjacencyModel, nodes: list[int]) -> Path:
    return Path(tuple(nodes), tuple(adj.dpid_of[i] for i in nodes))


def greedy_rollout(
    model: PolicyNet,
    adj: AdjacencyModel,
    sample: bool = False,
    rng: np.random.Generator | None = None,
) -> Path:
    """Extract a path by repeatedly taking the best unvisited neighbor.

    Default is argmax of the model's probabilities restricted to
    unvisited neighbors (ties to the lowest index); `sample=True` draws
    from the renormalized restriction instead, for diagnostics.
    """
    if sample and rng is None:
        rng = np.random.default_rng()
    n = adj.num_nodes
    nodes = [adj.start_node]
    visited = {adj.start_node}
    current = adj.start_node
    while current != adj.end_node:
        probs = forward(model, one_hot(n, current))
        candidates = [j for j in np.flatnonzero(adj.net[current]) if int(j) not in visited]
        if not candidates:
            raise ExtractionError(
                f"all neighbors of node {current} already visited", partial=nodes
            )
        weights = probs[candidates]
        if sample:
            total = float(weights.sum())
            if total <= 0.0:
                raise ExtractionError(f"zero mass on neighbors of {current}", partial=nodes)
            current = int(rng.choice(candidates, p=weights / total))
        else:
            current = int(candidates[int(np.argmax(weights))])
        visited.add(current)
        nodes.append(current)
        if len(nodes) > n:  # unreachable given the visited set, kept as a guard
            raise ExtractionError("rollout exceeded node count", partial=nodes)
    return _as_path(adj, nodes)


def bfs_shortest(adj: AdjacencyModel, src: int, dst: int) -> Path:
    """Minimum-hop path; ties broken lexicographically by node index.

    Runs BFS from the destination and then greedily walks downhill from
    the source taking the smallest-index neighbor one hop closer, which
    yields the lexicographically smallest shortest node sequence.
    """
    n = adj.num_nodes
    if src == dst:
        return _as_path(adj, [src])
    dist = np.full(n, -1, dtype=int)
    dist[dst] = 0
    queue = [dst]
    while queue:
        nxt = []
        for i in queue:
            for j in np.flatnonzero(adj.net[i]):
                if dist[j] < 0:
                    dist[j] = dist[i] + 1
                    nxt.append(int(j))
        queue = nxt
    if dist[src] < 0:
        raise NoPathError(f"no path from node {src} to node {dst}")
    nodes = [src]
    current = src
    while current != dst:
        for j in np.flatnonzero(adj.net[current]):
            if dist[j] == dist[current] - 1:
                current = int(j)
                break
        nodes.append(current)
    return _as_path(adj, nodes)


def dijkstra_shortest(adj: AdjacencyModel, src: int, dst: int) -> Path:
    """Minimum total edge weight over cells 1/w; used for weighted matrices."""
    n = adj.num_nodes
    if src == dst:
        return _as_path(adj, [src])
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=int)
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d, i = heapq.heappop(heap)
        if d > dist[i]:
            continue
        for j in np.flatnonzero(adj.net[i]):
            nd = d + float(adj.net[i, j])
            if nd < dist[j] or (nd == dist[j] and parent[j] > i):
                dist[j] = nd
                parent[j] = i
                heapq.heappush(heap, (nd, int(j)))
    if not np.isfinite(dist[dst]):
        raise NoPathError(f"no path from node {src} to node {dst}")
    nodes = [dst]
    while nodes[-1] != src:
        nodes.append(int(parent[nodes[-1]]))
    nodes.reverse()
    return _as_path(adj, nodes)


def is_valid_path(adj: AdjacencyModel, path: Path) -> bool:
    nodes = path.nodes
    if len(nodes) < 2 or len(set(nodes)) != len(nodes):
        return False
    if nodes[0] != adj.start_node or nodes[-1] != adj.end_node:
        return False
    return all(adj.net[a, b] > 0.0 for a, b in zip(nodes, nodes[1:]))


def compare_paths(learned: Path, oracle: Path, adj: AdjacencyModel) -> Verdict:
    """Defensively re-check the learned path and compare hop counts."""
    valid = is_valid_path(adj, learned)
    return Verdict(
        valid=valid,
        hop_count=learned.hops,
        oracle_hops=oracle.hops,
        is_shortest=valid and learned.hops == oracle.hops,
    )
