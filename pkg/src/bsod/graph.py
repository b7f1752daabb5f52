"""Epsilon-neighborhood graphs and their combinatorial Laplacian.

Two points are adjacent when their Euclidean distance is at most ``eps``.
Edges are unweighted, so the Laplacian is ``L = D - W`` with ``W`` binary and
``D`` the diagonal of vertex degrees. Graphs are stored in compressed sparse
row form with every neighbor list sorted ascending, which makes two graphs
built from the same data comparable with ``==``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse

from .errors import DimensionMismatch, InvalidEpsilon, NonFiniteInput

# Above this dimensionality the 3**d neighbor-cell scan stops paying off.
MAX_GRID_DIM = 4

# Upper bound on candidate pairs materialized at once by either builder.
_PAIR_CHUNK = 1 << 22


def as_points(points) -> np.ndarray:
    """Validate ``points`` as an ``(n, d)`` float array of finite values."""
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"points must be a 2-D (n, d) array, got shape {X.shape}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise DimensionMismatch(f"points must have n >= 1 and d >= 1, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise NonFiniteInput("points contain NaN or infinite coordinates")
    return X


def _check_eps(eps) -> float:
    eps = float(eps)
    if not np.isfinite(eps) or eps <= 0:
        raise InvalidEpsilon(f"eps must be a positive finite number, got {eps}")
    return eps


@dataclass(frozen=True, eq=False)
class SparseGraph:
    """Undirected binary graph in canonical CSR form.

    Attributes:
        row_offsets: Offsets into ``neighbors``, length ``n + 1``.
        neighbors: Concatenated adjacency lists, each sorted ascending.
        degrees: Number of neighbors of each vertex.
        n: Vertex count.
        edge_count: Number of undirected edges.
    """

    row_offsets: np.ndarray
    neighbors: np.ndarray
    degrees: np.ndarray
    n: int
    edge_count: int

    def neighbors_of(self, i: int) -> np.ndarray:
        return self.neighbors[self.row_offsets[i]:self.row_offsets[i + 1]]

    @cached_property
    def adjacency(self) -> scipy.sparse.csr_array:
        """The adjacency matrix ``W`` sharing this graph's index arrays."""
        data = np.ones(len(self.neighbors), dtype=np.float64)
        return scipy.sparse.csr_array(
            (data, self.neighbors, self.row_offsets), shape=(self.n, self.n)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.edge_count == other.edge_count
            and np.array_equal(self.row_offsets, other.row_offsets)
            and np.array_equal(self.neighbors, other.neighbors)
        )

    __hash__ = None


def _from_pairs(n: int, i: np.ndarray, j: np.ndarray) -> SparseGraph:
    """Assemble a canonical graph from the undirected pairs ``i < j``."""
    index_dtype = np.int32 if n < 2**31 else np.int64
    rows = np.concatenate([i, j]).astype(index_dtype, copy=False)
    cols = np.concatenate([j, i]).astype(index_dtype, copy=False)
    data = np.ones(len(rows), dtype=np.float64)
    W = scipy.sparse.coo_array((data, (rows, cols)), shape=(n, n)).tocsr()
    W.sort_indices()
    row_offsets = W.indptr.astype(np.int64)
    return SparseGraph(
        row_offsets=row_offsets,
        neighbors=W.indices.astype(index_dtype, copy=False),
        degrees=np.diff(row_offsets),
        n=n,
        edge_count=len(i),
    )


def _distance(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # Column-by-column accumulation: both builders must round identically
    # so that boundary cases (distance == eps) agree bit for bit.
    acc = (A[..., 0] - B[..., 0]) ** 2
    for k in range(1, A.shape[-1]):
        acc += (A[..., k] - B[..., k]) ** 2
    return np.sqrt(acc)


def brute_force_graph(points, eps: float) -> SparseGraph:
    """Build the eps-graph by checking every pair of points.

    Quadratic in ``n``; kept as the reference the indexed builder is tested
    against, and as the fallback for high-dimensional data.
    """
    X = as_points(points)
    eps = _check_eps(eps)
    n = X.shape[0]
    block = max(1, _PAIR_CHUNK // max(n, 1))
    src, dst = [], []
    for start in range(0, n, block):
        stop = min(n, start + block)
        dist = _distance(X[start:stop, None, :], X[None, :, :])
        a, b = np.nonzero(dist <= eps)
        a += start
        keep = a < b
        src.append(a[keep])
        dst.append(b[keep])
    i = np.concatenate(src) if src else np.empty(0, np.int64)
    j = np.concatenate(dst) if dst else np.empty(0, np.int64)
    return _from_pairs(n, i, j)


def _grid_coordinates(X: np.ndarray, eps: float) -> np.ndarray | None:
    """Integer cell coordinates of side about ``eps``, compressed per axis.

    Empty runs of cells along an axis collapse to a single empty cell, which
    keeps the "differs by at most one" neighbor relation intact while bounding
    the linearized key. Returns None if the key would still overflow int64.
    """
    # Slightly oversized cells: a pair at distance exactly eps must never
    # land two cells apart through rounding in the division.
    side = eps * (1 + 1e-9)
    cells = np.floor((X - X.min(axis=0)) / side).astype(np.int64)
    out = np.empty_like(cells)
    for k in range(cells.shape[1]):
        values, inverse = np.unique(cells[:, k], return_inverse=True)
        steps = np.minimum(np.diff(values), 2)
        compact = np.concatenate([[0], np.cumsum(steps)])
        out[:, k] = compact[inverse]
    extent = out.max(axis=0).astype(object) + 3
    if np.prod(extent) >= 2**62:
        return None
    return out


def build_epsilon_graph(points, eps: float) -> SparseGraph:
    """Build the eps-neighborhood graph using a uniform grid index.

    Points are bucketed into cells of side ``eps``; candidate pairs come only
    from each cell and its neighbors in half of the ``3**d`` surrounding
    offsets, so expected cost is near linear when local density is bounded.
    Falls back to :func:`brute_force_graph` for ``d > MAX_GRID_DIM``.
    """
    X = as_points(points)
    eps = _check_eps(eps)
    n, d = X.shape
    if d > MAX_GRID_DIM or n < 2:
        return brute_force_graph(X, eps)
    cells = _grid_coordinates(X, eps)
    if cells is None:
        return brute_force_graph(X, eps)

    extent = cells.max(axis=0) + 3
    strides = np.ones(d, dtype=np.int64)
    for k in range(d - 2, -1, -1):
        strides[k] = strides[k + 1] * extent[k + 1]
    keys = (cells + 1) @ strides

    order = np.argsort(keys, kind="stable")
    cell_keys, starts, counts = np.unique(keys[order], return_index=True, return_counts=True)

    src, dst = [], []
    for offset in itertools.product((-1, 0, 1), repeat=d):
        nonzero = [o for o in offset if o != 0]
        if nonzero and nonzero[0] < 0:
            continue  # the mirrored offset visits this cell pair
        same_cell = not nonzero
        target = cell_keys + np.dot(offset, strides)
        pos = np.searchsorted(cell_keys, target)
        pos[pos == len(cell_keys)] = 0
        hit = np.flatnonzero(cell_keys[pos] == target)
        a_cells, b_cells = hit, pos[hit]
        sizes = counts[a_cells] * counts[b_cells]
        for lo, hi in _chunks(sizes, _PAIR_CHUNK):
            i, j = _cell_pairs(
                order, starts, counts, a_cells[lo:hi], b_cells[lo:hi], sizes[lo:hi], same_cell
            )
            keep = _distance(X[i], X[j]) <= eps
            i, j = i[keep], j[keep]
            flip = i > j
            i[flip], j[flip] = j[flip], i[flip]
            src.append(i)
            dst.append(j)

    i = np.concatenate(src) if src else np.empty(0, np.int64)
    j = np.concatenate(dst) if dst else np.empty(0, np.int64)
    return _from_pairs(n, i, j)


def _chunks(sizes: np.ndarray, budget: int):
    """Yield ``(lo, hi)`` slices whose summed ``sizes`` stay near ``budget``."""
    total = np.cumsum(sizes)
    lo = 0
    while lo < len(sizes):
        base = total[lo - 1] if lo else 0
        hi = int(np.searchsorted(total, base + budget, side="right"))
        hi = max(hi, lo + 1)
        yield lo, hi
        lo = hi


def _cell_pairs(order, starts, counts, a_cells, b_cells, sizes, same_cell):
    """Every point pair between cells ``a_cells[k]`` and ``b_cells[k]``."""
    total = int(sizes.sum())
    pair_of = np.repeat(np.arange(len(sizes)), sizes)
    first = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    local = np.arange(total) - first[pair_of]
    width = counts[b_cells][pair_of]
    ia = local // width
    ib = local % width
    if same_cell:
        keep = ia < ib
        ia, ib, pair_of = ia[keep], ib[keep], pair_of[keep]
    i = order[starts[a_cells][pair_of] + ia]
    j = order[starts[b_cells][pair_of] + ib]
    return i, j


def laplacian_apply(graph: SparseGraph, x) -> np.ndarray:
    """Return ``L @ x`` for ``L = D - W`` without forming ``L``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (graph.n,):
        raise DimensionMismatch(f"vector of shape {x.shape} does not match graph with n={graph.n}")
    return graph.degrees * x - graph.adjacency @ x
