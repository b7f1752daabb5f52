"""Boosted spectral outlier detection.

Each round standardizes the points still in play, builds their eps-graph,
takes the magnitudes of the Laplacian's top eigenvector and splits them into
two clusters with exact 1-D 2-means. The larger cluster is passed on to the
next round and the smaller one is dropped. Top Laplacian eigenvectors
concentrate on high-degree vertices, so the dropped cluster is typically a
dense patch of inliers. Rounds continue until at most ``n * contamination``
points remain, and those survivors are the reported outliers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .cluster1d import two_means_1d
from .errors import DegenerateValues, InvalidContamination, InvalidEpsilon, TooFewPoints
from .graph import as_points, build_epsilon_graph
from .spectral import DEFAULT_MAX_ITER, DEFAULT_TOL, EigenPair, abs_components, dominant_eigenpair

logger = logging.getLogger(__name__)

# Features whose sample sd falls below this are centered but not scaled.
MIN_SCALE = 1e-12


@dataclass(frozen=True)
class BsodConfig:
    contamination: float
    eps: float = 0.5
    eigen_tol: float = DEFAULT_TOL
    eigen_max_iter: int = DEFAULT_MAX_ITER
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.contamination < 1:
            raise InvalidContamination(
                f"contamination must lie in (0, 1), got {self.contamination}"
            )
        if not (np.isfinite(self.eps) and self.eps > 0):
            raise InvalidEpsilon(f"eps must be positive, got {self.eps}")
        if self.eigen_max_iter < 1:
            raise ValueError("eigen_max_iter must be >= 1")


@dataclass(frozen=True)
class RoundTrace:
    """Bookkeeping for one boosting round.

    ``removed_indices`` index the original dataset. On a degenerate exit
    nothing is removed, ``kept_size == input_size`` and ``degenerate_exit``
    names the reason (``"no_edges"`` or ``"degenerate_eigenvector"``).
    """

    round_index: int
    input_size: int
    removed_indices: tuple[int, ...]
    kept_size: int
    eigenvalue: float | None = None
    eigen_iterations: int | None = None
    eigen_converged: bool | None = None
    cluster_sizes: tuple[int, int] | None = None
    degenerate_exit: str | None = None

    def to_dict(self) -> dict:
        return {
            "round_index": self.round_index,
            "input_size": self.input_size,
            "removed_indices": list(self.removed_indices),
            "kept_size": self.kept_size,
            "eigenvalue": self.eigenvalue,
            "eigen_iterations": self.eigen_iterations,
            "eigen_converged": self.eigen_converged,
            "cluster_sizes": list(self.cluster_sizes) if self.cluster_sizes else None,
            "degenerate_exit": self.degenerate_exit,
        }


@dataclass(frozen=True, eq=False)
class DetectionResult:
    outlier_indices: np.ndarray
    rounds: list[RoundTrace] = field(default_factory=list)
    scores: np.ndarray | None = None

    @property
    def degenerate_exit(self) -> bool:
        return bool(self.rounds) and self.rounds[-1].degenerate_exit is not None


def standardize(points) -> np.ndarray:
    """Center each feature and divide by its sample sd (``ddof=1``)."""
    X = as_points(points)
    if X.shape[0] < 2:
        raise TooFewPoints(f"standardization needs at least 2 points, got {X.shape[0]}")
    centered = X - X.mean(axis=0)
    sd = X.std(axis=0, ddof=1)
    scale = np.where(sd < MIN_SCALE, 1.0, sd)
    out = centered / scale
    out[:, sd < MIN_SCALE] = 0.0
    return out


def bsod_round(
    points,
    original_indices,
    config: BsodConfig,
    round_index: int = 0,
    eigensolver=dominant_eigenpair,
) -> tuple[RoundTrace, np.ndarray]:
    """Run one weak learner on ``points``.

    Returns the trace and the original indices of the retained points. A
    degenerate exit retains every input point and is flagged in the trace;
    the caller is expected to stop there.
    """
    X = as_points(points)
    idx = np.asarray(original_indices, dtype=np.int64)
    if X.shape[0] != idx.shape[0]:
        raise ValueError("points and original_indices differ in length")
    if X.shape[0] < 2:
        raise TooFewPoints("a round needs at least 2 points")
    n = X.shape[0]

    graph = build_epsilon_graph(standardize(X), config.eps)
    if graph.edge_count == 0:
        return RoundTrace(round_index, n, (), n, degenerate_exit="no_edges"), idx

    pair: EigenPair = eigensolver(
        graph, tol=config.eigen_tol, max_iter=config.eigen_max_iter, seed=config.seed
    )
    magnitudes = abs_components(pair)
    try:
        split = two_means_1d(magnitudes)
    except DegenerateValues:
        trace = RoundTrace(
            round_index, n, (), n,
            eigenvalue=pair.value,
            eigen_iterations=pair.iterations,
            eigen_converged=pair.converged,
            degenerate_exit="degenerate_eigenvector",
        )
        return trace, idx

    n_low, n_high = split.sizes
    # The larger cluster survives; on a size tie the low-magnitude one does.
    keep_label = 0 if n_low >= n_high else 1
    keep = split.assignments == keep_label
    removed = idx[~keep]
    trace = RoundTrace(
        round_index=round_index,
        input_size=n,
        removed_indices=tuple(int(i) for i in removed),
        kept_size=int(keep.sum()),
        eigenvalue=pair.value,
        eigen_iterations=pair.iterations,
        eigen_converged=pair.converged,
        cluster_sizes=(min(split.sizes), max(split.sizes)),
    )
    return trace, idx[keep]


def bsod_detect(points, config: BsodConfig, eigensolver=dominant_eigenpair) -> DetectionResult:
    """Peel rounds off ``points`` until at most ``n * contamination`` remain.

    Scores encode removal order: a point dropped in round ``r`` of ``R``
    rounds scores ``r / R`` and survivors score 1.0, so higher means more
    outlying.
    """
    X = as_points(points)
    n = X.shape[0]
    if n < 2:
        raise TooFewPoints(f"detection needs at least 2 points, got {n}")
    bound = n * config.contamination

    retained = np.arange(n)
    rounds: list[RoundTrace] = []
    removed_in = np.full(n, -1, dtype=np.int64)
    while retained.size > bound:
        if retained.size == 1:
            # A one-point graph has no edges.
            trace = RoundTrace(len(rounds), 1, (), 1, degenerate_exit="no_edges")
        else:
            trace, retained = bsod_round(
                X[retained], retained, config, round_index=len(rounds), eigensolver=eigensolver
            )
        rounds.append(trace)
        if trace.degenerate_exit:
            logger.info(
                "round %d: %s, declaring %d remaining points outliers",
                trace.round_index, trace.degenerate_exit, retained.size,
            )
            break
        removed_in[list(trace.removed_indices)] = trace.round_index

    scores = np.ones(n)
    peeled = removed_in >= 0
    if rounds:
        scores[peeled] = removed_in[peeled] / len(rounds)
    return DetectionResult(outlier_indices=np.sort(retained), rounds=rounds, scores=scores)
