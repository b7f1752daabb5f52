"""Exact two-cluster k-means for one-dimensional data.

In one dimension an optimal 2-means partition is always a threshold split of
the sorted values, so scanning the ``n - 1`` contiguous splits with prefix
sums finds the global optimum without Lloyd iterations or random starts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateValues

# Value ranges narrower than this give numerically indistinguishable centroids.
DEGENERATE_RANGE = 1e-15


@dataclass(frozen=True, eq=False)
class Split2:
    """A two-cluster partition; cluster 1 is the one with the larger centroid."""

    assignments: np.ndarray
    sizes: tuple[int, int]
    centroids: tuple[float, float]
    sse: float


def two_means_1d(values) -> Split2:
    """Globally optimal 2-means of ``values``.

    SSE ties go to the split whose high cluster is smallest.
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    n = x.size
    if n < 2:
        raise ValueError(f"need at least 2 values, got {n}")
    if not np.isfinite(x).all():
        raise ValueError("values must be finite")
    if x.max() - x.min() < DEGENERATE_RANGE:
        raise DegenerateValues(f"value range {x.max() - x.min():.3g} is too small to split")

    order = np.argsort(x, kind="stable")
    s = x[order]
    # Centering keeps the prefix-sum SSE formula well conditioned.
    s_c = s - s.mean()
    csum = np.cumsum(s_c)
    csq = np.cumsum(s_c * s_c)
    left = np.arange(1, n, dtype=np.float64)
    right = n - left
    sse_left = csq[:-1] - csum[:-1] ** 2 / left
    tail_sum = csum[-1] - csum[:-1]
    sse_right = (csq[-1] - csq[:-1]) - tail_sum**2 / right
    sse = sse_left + sse_right

    # Only cut between distinct values; equal values must share a cluster.
    valid = s[1:] > s[:-1]
    sse = np.where(valid, sse, np.inf)
    best = sse.min()
    # Exact prefix-sum ties are rare; treat near-equal SSEs as ties.
    ties = np.flatnonzero(sse <= best + 1e-12 * max(abs(best), csq[-1]))
    cut = int(ties[-1])  # largest low cluster == smallest high cluster

    assignments = np.zeros(n, dtype=np.int8)
    assignments[order[cut + 1:]] = 1
    n0 = cut + 1
    low, high = s[:n0], s[n0:]
    exact_sse = float(((low - low.mean()) ** 2).sum() + ((high - high.mean()) ** 2).sum())
    return Split2(
        assignments=assignments,
        sizes=(n0, n - n0),
        centroids=(float(low.mean()), float(high.mean())),
        sse=exact_sse,
    )
