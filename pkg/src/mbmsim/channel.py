"""Seeded Rayleigh channel and noise sampling, with Kronecker correlation.

CN(0,1) convention: independent real/imag parts, each N(0, 1/2). All
sampling is a pure function of an RngStream value, so trials can be
farmed out to workers without changing results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPSD, MbmSimError
from .signalset import SystemConfig

PSD_TOL = -1e-9


@dataclass(frozen=True)
class RngStream:
    """Counter-style substream: (master_seed, labels) -> one Generator."""

    master_seed: int
    labels: tuple[int, ...] = ()

    def child(self, *labels: int) -> "RngStream":
        return RngStream(self.master_seed, self.labels + tuple(labels))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=self.labels)
        return np.random.default_rng(ss)


@dataclass(frozen=True)
class CorrelationSpec:
    rho_a: float  # exponential inter-TU / receive coefficient
    rho_m: float  # equi-correlation across MAPs within a TU

    def __post_init__(self):
        if not (0 <= self.rho_a < 1 and 0 <= self.rho_m < 1):
            raise MbmSimError("correlation coefficients must lie in [0, 1)")

    @property
    def is_identity(self) -> bool:
        return self.rho_a == 0 and self.rho_m == 0


@dataclass(frozen=True)
class NoiseSpec:
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise MbmSimError("sigma2 must be > 0")


def complex_normal(gen: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    """i.i.d. CN(0, var) samples; real then imag drawn in one call."""
    z = gen.standard_normal(shape + (2,))
    return np.sqrt(var / 2.0) * (z[..., 0] + 1j * z[..., 1])


def sample_iid_channel(config: SystemConfig, n_cols_mode: str, rng: RngStream) -> np.ndarray:
    """n_r x (N_cols * n_tu) i.i.d. CN(0,1) fade matrix.

    n_cols_mode 'operational' uses N_m columns per TU, 'full' uses
    N_all = 2^M_rf (the pre-selection matrix).
    """
    if n_cols_mode not in ("operational", "full"):
        raise MbmSimError(f"unknown n_cols_mode {n_cols_mode!r}")
    d = config.dim if n_cols_mode == "operational" else config.dim_full
    return complex_normal(rng.generator(), (config.n_r, d))


def build_rtx(config: SystemConfig, spec: CorrelationSpec) -> np.ndarray:
    """Transmit correlation: equi-correlated within a TU block, rho_a^|i-j| across TUs."""
    n_tu, N_m = config.n_tu, config.N_m
    ones = np.ones((N_m, N_m))
    blocks = []
    for i in range(n_tu):
        row = []
        for j in range(n_tu):
            if i == j:
                row.append((1 - spec.rho_m) * np.eye(N_m) + spec.rho_m * ones)
            else:
                row.append(spec.rho_a ** abs(i - j) * ones)
        blocks.append(row)
    rtx = np.block(blocks)
    if np.linalg.eigvalsh(rtx).min() < PSD_TOL:
        raise NotPSD("R_Tx is not positive semidefinite")
    return rtx


def build_rrx(n_r: int, rho_a: float) -> np.ndarray:
    """Exponential Toeplitz receive correlation, entries rho_a^|i-j|."""
    idx = np.arange(n_r)
    return rho_a ** np.abs(idx[:, None] - idx[None, :]) * 1.0


def matrix_sqrt_psd(R: np.ndarray) -> np.ndarray:
    """Symmetric square root via eigendecomposition; clamps tiny negative modes."""
    w, U = np.linalg.eigh(R)
    if w.min() < PSD_TOL:
        raise NotPSD(f"smallest eigenvalue {w.min():g} below tolerance")
    w = np.clip(w, 0.0, None)
    return (U * np.sqrt(w)) @ U.T


def sample_correlated_channel(
    config: SystemConfig, spec: CorrelationSpec, rng: RngStream
) -> np.ndarray:
    """Kronecker-model channel H = R_Rx^{1/2} H_iid R_Tx^{1/2} (operational columns)."""
    h = sample_iid_channel(config, "operational", rng)
    if spec.is_identity:
        return h
    s_rx = matrix_sqrt_psd(build_rrx(config.n_r, spec.rho_a))
    s_tx = matrix_sqrt_psd(build_rtx(config, spec))
    return s_rx @ h @ s_tx


def sample_noise(n_r: int, noise: NoiseSpec, rng: RngStream) -> np.ndarray:
    return complex_normal(rng.generator(), (n_r,), var=noise.sigma2)


def snr_to_sigma2(snr_db: float) -> float:
    """Noise variance for unit average transmit energy."""
    return 10.0 ** (-snr_db / 10.0)
