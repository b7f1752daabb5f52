"""Synthetic benchmark data with ground-truth labels, and CSV I/O.

Both generators place ``n_inliers`` points on a curve and add uniformly
distributed noise points as outliers, with enough of them that outliers make
up the requested fraction of the whole dataset.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidContamination, MissingColumn, ParseError
from .graph import as_points

INLIER, OUTLIER = 0, 1

CIRCLE_RADIAL_NOISE = 0.05
CIRCLE_NOISE_BOX = 1.4
MOONS_NOISE = 0.05
MOONS_BOX_MARGIN = 0.5


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Points with optional per-point labels (0 inlier, 1 outlier)."""

    points: np.ndarray
    labels: np.ndarray | None = None
    seed: int | None = None
    name: str = ""

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def contamination(self) -> float | None:
        if self.labels is None:
            return None
        return float(np.mean(self.labels == OUTLIER))

    @property
    def outlier_indices(self) -> np.ndarray:
        if self.labels is None:
            raise ValueError("dataset is unlabeled")
        return np.flatnonzero(self.labels == OUTLIER)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        if (self.labels is None) != (other.labels is None):
            return False
        return np.array_equal(self.points, other.points) and (
            self.labels is None or np.array_equal(self.labels, other.labels)
        )

    __hash__ = None


def outlier_count(n_inliers: int, contamination: float) -> int:
    """Outliers to add so they form ``contamination`` of the total (half-up rounding)."""
    return int(math.floor(n_inliers * contamination / (1 - contamination) + 0.5))


def _check(n_inliers: int, contamination: float) -> None:
    if not 0 < contamination < 1:
        raise InvalidContamination(f"contamination must lie in (0, 1), got {contamination}")
    if n_inliers < 1:
        raise ValueError(f"n_inliers must be positive, got {n_inliers}")


def _assemble(inliers, outliers, rng, seed, name) -> LabeledDataset:
    points = np.concatenate([inliers, outliers])
    labels = np.concatenate([
        np.full(len(inliers), INLIER, dtype=np.int8),
        np.full(len(outliers), OUTLIER, dtype=np.int8),
    ])
    # Shuffle so position carries no label information.
    perm = rng.permutation(len(points))
    return LabeledDataset(points[perm], labels[perm], seed=seed, name=name)


def gen_circle(
    n_inliers: int,
    contamination: float,
    seed: int = 0,
    radial_noise: float = CIRCLE_RADIAL_NOISE,
    box: float = CIRCLE_NOISE_BOX,
) -> LabeledDataset:
    """Noisy unit circle of inliers plus uniform noise over ``[-box, box]**2``."""
    _check(n_inliers, contamination)
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2 * np.pi, n_inliers)
    radius = 1.0 + rng.normal(0.0, radial_noise, n_inliers)
    inliers = np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])
    outliers = rng.uniform(-box, box, size=(outlier_count(n_inliers, contamination), 2))
    return _assemble(inliers, outliers, rng, seed, "circle")


def gen_moons(
    n_inliers: int,
    contamination: float,
    seed: int = 0,
    noise: float = MOONS_NOISE,
    margin: float = MOONS_BOX_MARGIN,
) -> LabeledDataset:
    """Two interleaving half circles plus uniform noise around them.

    The upper moon gets the extra point when ``n_inliers`` is odd. Noise
    covers the noiseless moons' bounding box, ``[-1, 2] x [-0.5, 1]``, grown
    by ``margin`` on every side.
    """
    _check(n_inliers, contamination)
    rng = np.random.default_rng(seed)
    n_upper = n_inliers - n_inliers // 2
    t_upper = rng.uniform(0.0, np.pi, n_upper)
    t_lower = rng.uniform(0.0, np.pi, n_inliers - n_upper)
    upper = np.column_stack([np.cos(t_upper), np.sin(t_upper)])
    lower = np.column_stack([1 - np.cos(t_lower), 0.5 - np.sin(t_lower)])
    inliers = np.concatenate([upper, lower])
    inliers = inliers + rng.normal(0.0, noise, size=inliers.shape)
    lo = np.array([-1.0, -0.5]) - margin
    hi = np.array([2.0, 1.0]) + margin
    outliers = rng.uniform(lo, hi, size=(outlier_count(n_inliers, contamination), 2))
    return _assemble(inliers, outliers, rng, seed, "moons")


GENERATORS = {"circle": gen_circle, "moons": gen_moons}


def generate(name: str, n_inliers: int, contamination: float, seed: int = 0) -> LabeledDataset:
    try:
        gen = GENERATORS[name]
    except KeyError:
        raise ValueError(f"unknown dataset {name!r}; choose from {sorted(GENERATORS)}") from None
    return gen(n_inliers, contamination, seed)


def save_csv(dataset: LabeledDataset, path) -> None:
    """Write ``x0,x1,...[,label]`` with 17 significant digits (lossless)."""
    d = dataset.points.shape[1]
    header = [f"x{k}" for k in range(d)]
    if dataset.labels is not None:
        header.append("label")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in range(dataset.n):
            fields = [f"{v:.17g}" for v in dataset.points[row]]
            if dataset.labels is not None:
                fields.append(str(int(dataset.labels[row])))
            fh.write(",".join(fields) + "\n")


def load_csv(path) -> LabeledDataset:
    """Read a dataset written by :func:`save_csv`; the label column is optional."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("empty file", line=1) from None
        coord_cols = [i for i, h in enumerate(header) if h.startswith("x") and h[1:].isdigit()]
        if "x0" not in header:
            raise MissingColumn("missing coordinate column 'x0'", line=1)
        label_col = header.index("label") if "label" in header else None
        coord_cols.sort(key=lambda i: int(header[i][1:]))

        coords, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", line=lineno)
            try:
                coords.append([float(row[i]) for i in coord_cols])
            except ValueError:
                raise ParseError(f"non-numeric coordinate in {row!r}", line=lineno) from None
            if label_col is not None:
                label = row[label_col].strip()
                if label not in ("0", "1"):
                    raise ParseError(f"label must be 0 or 1, got {label!r}", line=lineno)
                labels.append(int(label))
    if not coords:
        raise ParseError("no data rows")
    try:
        points = as_points(coords)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    label_arr = np.array(labels, dtype=np.int8) if label_col is not None else None
    return LabeledDataset(points, label_arr, name=path.stem)
