"""Thresholded bipartite graphs and the similarity adjustments built on them.

The two vertex sides are the set differences Vi \\ Vj and Vj \\ Vi; an edge
connects features whose similarity reaches the threshold. Four adjustments
are provided: maximum bipartite matching size, a greedy most-similar-pairs
count, the minimum directional count of matchable features, and the minimum
directional sum of mean similarities.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .core import FeatureSet, FeatureUniverse, SimilarityMatrix
from .errors import GraphTooLargeForOracle, ValueOutOfRange

#: brute_force_matching refuses graphs with more edges than this.
ORACLE_EDGE_LIMIT = 25


class AdjustmentKind(enum.Enum):
    """Which adjustment to add to the raw intersection size."""

    MBM = "mbm"
    GREEDY = "greedy"
    COUNT = "count"
    MEAN = "mean"
    NONE = "none"


@dataclass(frozen=True)
class ThresholdedBipartiteGraph:
    """Bipartite graph between two disjoint id lists, edges at similarity >= theta.

    ``left`` and ``right`` are lexicographically sorted, so edge indices order
    the same way as feature ids.
    """

    left: tuple[str, ...]
    right: tuple[str, ...]
    edges: tuple[tuple[int, int, float], ...]

    @cached_property
    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.left]
        for li, ri, _ in self.edges:
            adj[li].append(ri)
        return adj


def _check_theta(theta: float) -> None:
    if not 0.0 <= theta <= 1.0:
        raise ValueOutOfRange(f"theta = {theta} is outside [0, 1]")


def build_graph(
    vi: FeatureSet, vj: FeatureSet, sim: SimilarityMatrix, theta: float
) -> ThresholdedBipartiteGraph:
    """Graph on Vi \\ Vj versus Vj \\ Vi with edges where similarity >= theta."""
    _check_theta(theta)
    vi.validate(sim.universe)
    vj.validate(sim.universe)
    left = tuple(sorted(vi.members - vj.members))
    right = tuple(sorted(vj.members - vi.members))
    index_of = sim.universe.index_of
    values = sim.values
    edges = []
    for a, x in enumerate(left):
        row = values[index_of(x)]
        for b, y in enumerate(right):
            s = float(row[index_of(y)])
            if s >= theta:
                edges.append((a, b, s))
    return ThresholdedBipartiteGraph(left, right, tuple(edges))


def hopcroft_karp(adjacency: Sequence[Sequence[int]], n_right: int) -> int:
    """Maximum-matching size of a bipartite graph given as left adjacency lists.

    Layered BFS plus shortest-augmenting-path DFS, O((V + E) * sqrt(V)).
    The DFS is iterative so deep alternating paths cannot hit the recursion
    limit.
    """
    n_left = len(adjacency)
    if n_left == 0 or n_right == 0:
        return 0
    infinity = n_left + n_right + 1
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0] * n_left

    def bfs() -> int:
        queue: deque[int] = deque()
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = infinity
        shortest = infinity
        while queue:
            u = queue.popleft()
            if dist[u] >= shortest:
                continue
            for v in adjacency[u]:
                w = match_r[v]
                if w == -1:
                    if shortest == infinity:
                        shortest = dist[u] + 1
                elif dist[w] == infinity:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return shortest

    def augment(root: int, shortest: int) -> bool:
        # iterative DFS along strictly increasing BFS layers
        stack: list[tuple[int, int]] = [(root, 0)]
        path: list[tuple[int, int]] = []
        while stack:
            u, k = stack[-1]
            adj = adjacency[u]
            moved = False
            while k < len(adj):
                v = adj[k]
                k += 1
                w = match_r[v]
                if w == -1:
                    if dist[u] + 1 == shortest:
                        path.append((u, v))
                        for uu, vv in path:
                            match_l[uu] = vv
                            match_r[vv] = uu
                        return True
                elif dist[w] == dist[u] + 1:
                    stack[-1] = (u, k)
                    path.append((u, v))
                    stack.append((w, 0))
                    moved = True
                    break
            if not moved:
                dist[u] = infinity
                stack.pop()
                if path:
                    path.pop()
        return False

    size = 0
    while True:
        shortest = bfs()
        if shortest == infinity:
            break
        for u in range(n_left):
            if match_l[u] == -1 and augment(u, shortest):
                size += 1
    return size


def maximum_bipartite_matching(g: ThresholdedBipartiteGraph) -> int:
    """Size of a maximum matching of the thresholded graph."""
    return hopcroft_karp(g.adjacency, len(g.right))


def greedy_matching(g: ThresholdedBipartiteGraph) -> int:
    """Greedy most-similar-pairs count.

    Edges are sorted decreasingly by similarity, ties broken lexicographically
    by (left id, right id); each taken edge removes every edge sharing one of
    its endpoints.
    """
    order = sorted(g.edges, key=lambda e: (-e[2], e[0], e[1]))
    used_left: set[int] = set()
    used_right: set[int] = set()
    size = 0
    for li, ri, _ in order:
        if li in used_left or ri in used_right:
            continue
        used_left.add(li)
        used_right.add(ri)
        size += 1
    return size


def brute_force_matching(g: ThresholdedBipartiteGraph) -> int:
    """Exhaustive matching-size oracle for graphs with few edges.

    Enumerates edge subsets (with a sound size bound to cut hopeless
    branches) and returns the largest valid matching found. Kept independent
    of the Hopcroft-Karp path on purpose.
    """
    edges = g.edges
    if len(edges) > ORACLE_EDGE_LIMIT:
        raise GraphTooLargeForOracle(
            f"{len(edges)} edges exceeds the oracle limit of {ORACLE_EDGE_LIMIT}"
        )
    best = 0

    def explore(k: int, used_l: frozenset, used_r: frozenset, size: int) -> None:
        nonlocal best
        if size > best:
            best = size
        if k == len(edges) or size + (len(edges) - k) <= best:
            return
        li, ri, _ = edges[k]
        if li not in used_l and ri not in used_r:
            explore(k + 1, used_l | {li}, used_r | {ri}, size + 1)
        explore(k + 1, used_l, used_r, size)

    explore(0, frozenset(), frozenset(), 0)
    return best


# ---------------------------------------------------------------------------
# Index-based kernels. These operate on universe index arrays so the
# Monte-Carlo and enumeration loops can skip FeatureSet construction.
# ---------------------------------------------------------------------------


def directional_counts(
    values: np.ndarray, theta: float, left: Sequence[int], right: Sequence[int]
) -> tuple[int, int]:
    """(|left features with a similar right feature|, same for right)."""
    if len(left) == 0 or len(right) == 0:
        return 0, 0
    block = values[np.ix_(left, right)] >= theta
    return int(block.any(axis=1).sum()), int(block.any(axis=0).sum())


def count_kernel(
    values: np.ndarray, theta: float, left: Sequence[int], right: Sequence[int]
) -> int:
    a_ij, a_ji = directional_counts(values, theta, left, right)
    return min(a_ij, a_ji)


def mean_kernel(
    values: np.ndarray, theta: float, left: Sequence[int], right: Sequence[int]
) -> float:
    if len(left) == 0 or len(right) == 0:
        return 0.0
    block = values[np.ix_(left, right)]
    qualifies = block >= theta
    qualified = np.where(qualifies, block, 0.0)
    row_counts = qualifies.sum(axis=1)
    row_sums = qualified.sum(axis=1)
    rows = row_counts > 0
    m_ij = float((row_sums[rows] / row_counts[rows]).sum())
    col_counts = qualifies.sum(axis=0)
    col_sums = qualified.sum(axis=0)
    cols = col_counts > 0
    m_ji = float((col_sums[cols] / col_counts[cols]).sum())
    return min(m_ij, m_ji)


def greedy_kernel(
    values: np.ndarray,
    theta: float,
    left: Sequence[int],
    right: Sequence[int],
    lexrank: np.ndarray,
) -> int:
    """Greedy count on index arrays; ``lexrank`` maps universe index to the
    lexicographic rank of its feature id so tie-breaking matches
    :func:`greedy_matching`."""
    if len(left) == 0 or len(right) == 0:
        return 0
    left = np.asarray(left, dtype=np.intp)
    right = np.asarray(right, dtype=np.intp)
    block = values[np.ix_(left, right)]
    li, ri = np.nonzero(block >= theta)
    if li.size == 0:
        return 0
    sims = block[li, ri]
    order = np.lexsort((lexrank[right[ri]], lexrank[left[li]], -sims))
    used_left = np.zeros(left.size, dtype=bool)
    used_right = np.zeros(right.size, dtype=bool)
    size = 0
    for k in order:
        l, r = li[k], ri[k]
        if used_left[l] or used_right[r]:
            continue
        used_left[l] = True
        used_right[r] = True
        size += 1
    return size


def mbm_kernel(
    values: np.ndarray, theta: float, left: Sequence[int], right: Sequence[int]
) -> int:
    if len(left) == 0 or len(right) == 0:
        return 0
    block = values[np.ix_(left, right)] >= theta
    adjacency = [np.nonzero(row)[0].tolist() for row in block]
    return hopcroft_karp(adjacency, len(right))


def lexical_ranks(universe: FeatureUniverse) -> np.ndarray:
    """Rank of each universe position when ids are sorted lexicographically."""
    order = sorted(range(universe.p), key=lambda k: universe.ids[k])
    ranks = np.empty(universe.p, dtype=np.intp)
    for rank, k in enumerate(order):
        ranks[k] = rank
    return ranks


# ---------------------------------------------------------------------------
# Public adjustment operations on feature sets.
# ---------------------------------------------------------------------------


def _difference_indices(
    vi: FeatureSet, vj: FeatureSet, sim: SimilarityMatrix
) -> tuple[list[int], list[int]]:
    vi.validate(sim.universe)
    vj.validate(sim.universe)
    left = sim.universe.indices(vi.members - vj.members)
    right = sim.universe.indices(vj.members - vi.members)
    return left, right


def adj_count(vi: FeatureSet, vj: FeatureSet, sim: SimilarityMatrix, theta: float) -> int:
    """min over both directions of the matchable-feature count."""
    _check_theta(theta)
    left, right = _difference_indices(vi, vj, sim)
    return count_kernel(sim.values, theta, left, right)


def adj_mean(vi: FeatureSet, vj: FeatureSet, sim: SimilarityMatrix, theta: float) -> float:
    """min over both directions of the summed mean similarity to matchable features."""
    _check_theta(theta)
    left, right = _difference_indices(vi, vj, sim)
    return mean_kernel(sim.values, theta, left, right)


def adjustment(
    kind: AdjustmentKind,
    vi: FeatureSet,
    vj: FeatureSet,
    sim: SimilarityMatrix,
    theta: float,
) -> float:
    """Dispatch to the requested adjustment; kind NONE always returns 0."""
    if kind is AdjustmentKind.NONE:
        return 0.0
    _check_theta(theta)
    left, right = _difference_indices(vi, vj, sim)
    if kind is AdjustmentKind.COUNT:
        return float(count_kernel(sim.values, theta, left, right))
    if kind is AdjustmentKind.MEAN:
        return mean_kernel(sim.values, theta, left, right)
    if kind is AdjustmentKind.GREEDY:
        return float(
            greedy_kernel(sim.values, theta, left, right, lexical_ranks(sim.universe))
        )
    return float(mbm_kernel(sim.values, theta, left, right))
