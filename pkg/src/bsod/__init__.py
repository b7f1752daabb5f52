"""Boosted spectral outlier detection on sparse eps-neighborhood graphs."""

from .baselines import IForestConfig, LofConfig, flag_top_fraction, iforest_scores, lof_scores
from .cluster1d import Split2, two_means_1d
from .datasets import LabeledDataset, gen_circle, gen_moons, load_csv, save_csv
from .detector import BsodConfig, DetectionResult, RoundTrace, bsod_detect, bsod_round, standardize
from .graph import SparseGraph, brute_force_graph, build_epsilon_graph, laplacian_apply
from .spectral import EigenPair, abs_components, dominant_eigenpair

__all__ = [
    "BsodConfig", "DetectionResult", "EigenPair", "IForestConfig", "LabeledDataset",
    "LofConfig", "RoundTrace", "SparseGraph", "Split2", "abs_components", "brute_force_graph",
    "bsod_detect", "bsod_round", "build_epsilon_graph", "dominant_eigenpair",
    "flag_top_fraction", "gen_circle", "gen_moons", "iforest_scores", "laplacian_apply",
    "load_csv", "lof_scores", "save_csv", "standardize", "two_means_1d",
]
