"""Local Outlier Factor and Isolation Forest baselines.

Both follow their textbook definitions; only the hyperparameters used for
comparison (20 neighbors, 100 trees) are fixed by the experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidContamination, TooFewPoints
from .graph import as_points

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class LofConfig:
    k_neighbors: int = 20

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError(f"k_neighbors must be >= 1, got {self.k_neighbors}")


@dataclass(frozen=True)
class IForestConfig:
    n_trees: int = 100
    subsample: int = 256
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.subsample < 2:
            raise ValueError(f"subsample must be >= 2, got {self.subsample}")


def knn(X: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact k nearest neighbors of every point, excluding the point itself.

    Equal distances are ordered by neighbor index, so the neighbor set is
    well defined even with duplicate points.
    """
    n = X.shape[0]
    tree = cKDTree(X)
    m = min(n, k + 2)
    dist, ind = tree.query(X, k=m)
    dist, ind = dist.reshape(n, m), ind.reshape(n, m)
    rows = np.arange(n)[:, None]
    is_self = ind == rows
    # Self sorts first so dropping column 0 removes it.
    key = np.where(is_self, -1.0, dist)
    order = np.lexsort((ind, key), axis=-1)
    dist = np.take_along_axis(dist, order, axis=-1)[:, 1:k + 1]
    ind = np.take_along_axis(ind, order, axis=-1)[:, 1:k + 1]

    # The query may have cut through a run of equal distances at the k-th
    # slot (or dropped self among duplicates); redo those rows exactly.
    truncated = m < n
    redo = ~is_self.any(axis=1)
    if truncated:
        last = np.take_along_axis(key, order, axis=-1)[:, -1]
        redo |= last == dist[:, -1]
    for row in np.flatnonzero(redo):
        radius = dist[row, -1] * (1 + 1e-9) + 1e-300
        shell = np.array(tree.query_ball_point(X[row], radius), dtype=np.int64)
        shell = shell[shell != row]
        d = np.sqrt(((X[shell] - X[row]) ** 2).sum(axis=1))
        pick = np.lexsort((shell, d))[:k]
        dist[row], ind[row] = d[pick], shell[pick]
    return dist, ind


def lof_scores(points, config: LofConfig = LofConfig()) -> np.ndarray:
    """Local Outlier Factor of every point; values above 1 are locally sparse."""
    X = as_points(points)
    n = X.shape[0]
    k = config.k_neighbors
    if n <= k:
        raise TooFewPoints(f"LOF with k={k} needs more than {k} points, got {n}")
    dist, ind = knn(X, k)
    k_distance = dist[:, -1]
    reach = np.maximum(k_distance[ind], dist)
    with np.errstate(divide="ignore"):
        lrd = 1.0 / reach.mean(axis=1)
    with np.errstate(invalid="ignore"):
        ratio = lrd[ind] / lrd[:, None]
    # Duplicate-heavy neighborhoods give inf/inf; treat them as ordinary.
    ratio = np.where(np.isnan(ratio), 1.0, ratio)
    return ratio.mean(axis=1)


def average_path_length(m) -> np.ndarray:
    """Expected unsuccessful-search path length in a BST of ``m`` keys."""
    m = np.asarray(m, dtype=np.float64)
    out = np.zeros_like(m)
    big = m > 2
    harmonic = np.log(m[big] - 1) + EULER_GAMMA
    out[big] = 2 * harmonic - 2 * (m[big] - 1) / m[big]
    out[m == 2] = 1.0
    return out


class _IsolationTree:
    """Array-backed random partition tree."""

    def __init__(self, X: np.ndarray, height_limit: int, rng: np.random.Generator):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.size: list[int] = []
        self.depth: list[int] = []
        self._grow(X, 0, height_limit, rng)

    def _node(self, size: int, depth: int) -> int:
        for arr, val in (
            (self.feature, -1), (self.threshold, 0.0), (self.left, -1),
            (self.right, -1), (self.size, size), (self.depth, depth),
        ):
            arr.append(val)
        return len(self.size) - 1

    def _grow(self, X: np.ndarray, depth: int, height_limit: int, rng) -> int:
        node = self._node(len(X), depth)
        if depth >= height_limit or len(X) <= 1:
            return node
        lo, hi = X.min(axis=0), X.max(axis=0)
        splittable = np.flatnonzero(hi > lo)
        if splittable.size == 0:
            return node
        q = int(splittable[rng.integers(splittable.size)])
        p = float(rng.uniform(lo[q], hi[q]))
        goes_left = X[:, q] < p
        self.feature[node] = q
        self.threshold[node] = p
        self.left[node] = self._grow(X[goes_left], depth + 1, height_limit, rng)
        self.right[node] = self._grow(X[~goes_left], depth + 1, height_limit, rng)
        return node

    def path_lengths(self, X: np.ndarray) -> np.ndarray:
        feature = np.array(self.feature)
        threshold = np.array(self.threshold)
        left, right = np.array(self.left), np.array(self.right)
        node = np.zeros(len(X), dtype=np.int64)
        active = feature[node] >= 0
        while active.any():
            rows = np.flatnonzero(active)
            cur = node[rows]
            go_left = X[rows, feature[cur]] < threshold[cur]
            node[rows] = np.where(go_left, left[cur], right[cur])
            active = feature[node] >= 0
        size = np.array(self.size)[node]
        return np.array(self.depth)[node] + average_path_length(size)


def iforest_scores(points, config: IForestConfig = IForestConfig()) -> np.ndarray:
    """Isolation Forest anomaly scores in (0, 1); higher is more anomalous."""
    X = as_points(points)
    n = X.shape[0]
    if n < 2:
        raise TooFewPoints(f"isolation forest needs at least 2 points, got {n}")
    psi = min(config.subsample, n)
    height_limit = math.ceil(math.log2(psi))
    rng = np.random.default_rng(config.seed)
    total = np.zeros(n)
    for _ in range(config.n_trees):
        sample = rng.choice(n, size=psi, replace=False)
        tree = _IsolationTree(X[sample], height_limit, rng)
        total += tree.path_lengths(X)
    mean_path = total / config.n_trees
    return 2.0 ** (-mean_path / average_path_length(psi))


def flag_top_fraction(scores, contamination: float) -> np.ndarray:
    """Indices of the ``ceil(n * contamination)`` highest scores, sorted.

    Equal scores are taken in index order.
    """
    if not 0 < contamination < 1:
        raise InvalidContamination(f"contamination must lie in (0, 1), got {contamination}")
    s = np.asarray(scores, dtype=np.float64)
    n = s.size
    # round() strips float noise such as 100 * 0.07 == 7.000000000000001
    count = min(n, max(1, math.ceil(round(n * contamination, 9))))
    order = np.lexsort((np.arange(n), -s))
    return np.sort(order[:count])
