"""Mirror-activation-pattern selection: energy (MI) and max-min distance (ED).

MAP indices are 0-based throughout. Selection sees the full channel matrix
with N_all = 2^M_rf columns per TU and picks N_m = 2^m_rf of them per TU.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import SearchTooLarge, ShapeMismatch
from .signalset import SignalSet, SystemConfig

ED_PAIR_CAP = 10**9


@dataclass(frozen=True)
class MapIndexSet:
    """Per-TU selected MAP indices, each tuple sorted ascending (canonical form)."""

    per_tu: tuple[tuple[int, ...], ...]


def _check_full_shape(H_full: np.ndarray, config: SystemConfig):
    if H_full.shape != (config.n_r, config.dim_full):
        raise ShapeMismatch(
            f"expected full channel of shape {(config.n_r, config.dim_full)}, got {H_full.shape}"
        )


def mi_select(H_full: np.ndarray, config: SystemConfig) -> MapIndexSet:
    """Keep the N_m highest-energy constellation points per TU; ties to lowest index."""
    _check_full_shape(H_full, config)
    n_all, n_m = config.N_all, config.N_m
    per_tu = []
    for j in range(config.n_tu):
        norms = np.sum(np.abs(H_full[:, j * n_all : (j + 1) * n_all]) ** 2, axis=0)
        # stable sort on -norms keeps the lowest index first among ties
        order = np.argsort(-norms, kind="stable")[:n_m]
        per_tu.append(tuple(sorted(int(i) for i in order)))
    return MapIndexSet(tuple(per_tu))


def candidate_subsets(config: SystemConfig):
    """Canonical (lexicographic) enumeration of joint per-TU MAP subsets."""
    per_tu = list(itertools.combinations(range(config.N_all), config.N_m))
    return [MapIndexSet(joint) for joint in itertools.product(per_tu, repeat=config.n_tu)]


def selection_columns(L: MapIndexSet, config: SystemConfig) -> np.ndarray:
    """Column indices into the full matrix such that H_L = H_full[:, cols]."""
    cols = []
    for j, sub in enumerate(L.per_tu):
        cols.extend(j * config.N_all + l for l in sub)
    return np.asarray(cols)


def selection_matrix(L: MapIndexSet, config: SystemConfig) -> np.ndarray:
    """Block-diagonal 0/1 matrix A_L with H_L = H_full @ A_L exactly."""
    A = np.zeros((config.dim_full, config.dim))
    for k, c in enumerate(selection_columns(L, config)):
        A[c, k] = 1.0
    return A


def difference_vectors(sset: SignalSet) -> np.ndarray:
    """Unique nonzero pairwise differences of the signal set, dim x n_pairs."""
    X = sset.matrix
    k = X.shape[1]
    iu, ju = np.triu_indices(k, 1)
    return X[:, iu] - X[:, ju]


def min_distance_sq(H_full: np.ndarray, L: MapIndexSet, config: SystemConfig,
                    sset: SignalSet, diffs: np.ndarray | None = None) -> float:
    """min over x != x~ of ||H_L (x - x~)||^2 for the restricted signal set."""
    if diffs is None:
        diffs = difference_vectors(sset)
    h_sub = H_full[:, selection_columns(L, config)]
    return float(np.min(np.sum(np.abs(h_sub @ diffs) ** 2, axis=0)))


def ed_select(H_full: np.ndarray, config: SystemConfig, sset: SignalSet) -> MapIndexSet:
    """Subset maximizing the min pairwise distance of the restricted set.

    sset is the restricted GSM-MBM signal set built for (n_tu, n_rf, m_rf);
    the same set shape applies to every candidate, only the channel columns
    change. Ties go to the first maximizer in canonical order.
    """
    _check_full_shape(H_full, config)
    cands = candidate_subsets(config)
    k = len(sset)
    if len(cands) * k * (k - 1) // 2 > ED_PAIR_CAP:
        raise SearchTooLarge("ED MAP search exceeds the pair-evaluation cap")
    diffs = difference_vectors(sset)
    best, best_obj = None, -1.0
    for L in cands:
        obj = min_distance_sq(H_full, L, config, sset, diffs)
        if obj > best_obj:
            best, best_obj = L, obj
    return best


def feedback_bits_mapsel(config: SystemConfig) -> int:
    """ceil(log2 C(N_all, N_m)^n_tu), exact integer arithmetic."""
    n_cand = comb(config.N_all, config.N_m) ** config.n_tu
    return (n_cand - 1).bit_length()


def predicted_diversity_ed(config: SystemConfig) -> int:
    return config.n_r * (config.N_all - config.N_m + 1)


def predicted_diversity_mi(config: SystemConfig) -> int:
    return config.n_r
