"""Exhaustive ML detection, closed-form pairwise error probability, union bound."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DegeneratePair, SetTooLarge, ShapeMismatch
from .signalset import SignalSet, TransmitVector

PAIR_CAP = 4096  # largest set for full pair enumeration in the union bound


@dataclass(frozen=True)
class DetectionResult:
    index: int
    bits: str
    metric: float


def precompute_rx_points(H: np.ndarray, sset: SignalSet) -> np.ndarray:
    """H x for every set member (n_r x |set|), amortized across noise draws."""
    if H.shape[1] != sset.matrix.shape[0]:
        raise ShapeMismatch(f"H has {H.shape[1]} columns, set dimension is {sset.matrix.shape[0]}")
    return H @ sset.matrix


def ml_detect(y: np.ndarray, H: np.ndarray, sset: SignalSet, rx_points=None) -> DetectionResult:
    """argmin over the set of ||y - Hx||^2; ties broken by lowest index."""
    y = np.asarray(y).reshape(-1)
    if y.shape[0] != H.shape[0]:
        raise ShapeMismatch(f"y has length {y.shape[0]}, H has {H.shape[0]} rows")
    hx = precompute_rx_points(H, sset) if rx_points is None else rx_points
    d = np.sum(np.abs(y[:, None] - hx) ** 2, axis=0)
    idx = int(np.argmin(d))
    return DetectionResult(idx, sset.vectors[idx].label, float(d[idx]))


def _f_beta(beta):
    # 0.5 * (1 - sqrt(beta / (1 + beta))) rearranged to avoid cancellation
    # at large beta.
    beta = np.asarray(beta, dtype=float)
    return 1.0 / (2.0 * (1.0 + beta + np.sqrt(beta * (1.0 + beta))))


def _pep_from_dist2(d2, sigma2: float, n_r: int):
    beta = np.asarray(d2, dtype=float) / (4.0 * sigma2)
    f = _f_beta(beta)
    acc = np.zeros_like(f)
    for i in range(n_r):
        acc += comb(n_r - 1 + i, i) * (1.0 - f) ** i
    return f**n_r * acc


def pep_closed_form(x, x_tilde, sigma2: float, n_r: int) -> float:
    """Unconditional pairwise error probability under i.i.d. Rayleigh fading."""
    xe = x.entries if isinstance(x, TransmitVector) else np.asarray(x)
    xte = x_tilde.entries if isinstance(x_tilde, TransmitVector) else np.asarray(x_tilde)
    d2 = float(np.sum(np.abs(xe - xte) ** 2))
    if d2 == 0.0:
        raise DegeneratePair("pairwise error probability needs distinct vectors")
    return float(_pep_from_dist2(d2, sigma2, n_r))


def _hamming_table(n: int) -> np.ndarray:
    labels = np.arange(n)
    x = np.bitwise_xor.outer(labels, labels)
    return np.unpackbits(x.astype(">u4").view(np.uint8).reshape(n, n, 4), axis=-1).sum(axis=-1)


def union_bound_bep(sset: SignalSet, sigma2: float, n_r: int) -> float:
    """Union-bound average bit error probability over all ordered pairs."""
    k = len(sset)
    if k < 2:
        raise DegeneratePair("union bound needs at least two set members")
    if k > PAIR_CAP:
        raise SetTooLarge(f"set of {k} exceeds the pair-enumeration cap {PAIR_CAP}")
    X = sset.matrix
    g = X.conj().T @ X
    e = np.real(np.diag(g))
    d2 = np.clip(e[:, None] + e[None, :] - 2.0 * np.real(g), 0.0, None)
    delta = _hamming_table(k)
    off = ~np.eye(k, dtype=bool)
    pep = _pep_from_dist2(d2[off], sigma2, n_r)
    return float(np.sum(pep * delta[off]) / (k * sset.eta))


def union_bound_curve(sset: SignalSet, snr_db_points, n_r: int) -> list[float]:
    from .channel import snr_to_sigma2

    return [union_bound_bep(sset, snr_to_sigma2(s), n_r) for s in snr_db_points]
