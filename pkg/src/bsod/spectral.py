"""Dominant eigenpair of a graph Laplacian by power iteration.

The Laplacian is positive semidefinite, so its largest-magnitude eigenvalue
is also its largest one and plain (unshifted) power iteration finds it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidTolerance, NoEdges
from .graph import SparseGraph, laplacian_apply

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 5000


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Largest Laplacian eigenvalue and a unit eigenvector for it.

    ``converged`` is False when ``max_iter`` was exhausted; the vector is
    then the best iterate available and ``iterations == max_iter``.
    """

    value: float
    vector: np.ndarray
    iterations: int
    residual: float
    converged: bool = True


def dominant_eigenpair(
    graph: SparseGraph,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
) -> EigenPair:
    """Power iteration ``v <- L v / ||L v||`` from a seeded random start.

    The eigenvalue estimate is the Rayleigh quotient ``v.T L v``. Iteration
    stops once ``||L v - lam v|| <= tol * max(lam, 1)``. Running out of
    iterations is logged, not raised.
    """
    if graph.edge_count == 0:
        raise NoEdges("Laplacian of an edgeless graph has no dominant direction")
    if not tol > 0:
        raise InvalidTolerance(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")

    v = np.random.default_rng(seed).standard_normal(graph.n)
    v /= np.linalg.norm(v)
    for it in range(1, max_iter + 1):
        w = laplacian_apply(graph, v)
        lam = float(v @ w)
        residual = float(np.linalg.norm(w - lam * v))
        if residual <= tol * max(lam, 1.0):
            return EigenPair(lam, v, it, residual)
        norm = np.linalg.norm(w)
        if it == max_iter or norm == 0.0:
            break
        v = w / norm

    logger.debug("power iteration stopped unconverged after %d steps (residual %.3g)", it, residual)
    return EigenPair(lam, v, it, residual, converged=False)


def abs_components(pair: EigenPair) -> np.ndarray:
    """Elementwise magnitude of the eigenvector, free of its sign ambiguity."""
    return np.abs(pair.vector)
