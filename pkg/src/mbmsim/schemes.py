"""Vectorized Monte Carlo trial kernels, one per transmission scheme.

Each kernel simulates n independent frames with a caller-supplied
Generator and returns (bit_errors, bits_simulated, trials). Kernels chunk
internally with fixed chunk sizes so results depend only on the generator
state, never on scheduling.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erfc

from .channel import CorrelationSpec, build_rrx, build_rtx, complex_normal, matrix_sqrt_psd
from .detect import _hamming_table
from .mapsel import candidate_subsets, difference_vectors, selection_columns
from .signalset import SignalSet, SystemConfig, build_signal_set
from .tcm import ConvCode, tcm_encode, tcm_viterbi_decode

CHUNK = 256
TCM_INFO_BLOCKS = 18  # info channel uses per 20-use frame; 2 uses are tail


def _popcount_table(K: int) -> np.ndarray:
    return np.array([bin(i).count("1") for i in range(K)], dtype=np.int64)


class GsmKernel:
    """Uncoded ML-detected GSM-MBM (covers SIMO/MIMO/SM variants too)."""

    def __init__(self, config: SystemConfig, sigma2: float,
                 corr: CorrelationSpec | None = None):
        self.config = config
        self.sigma2 = sigma2
        self.sset = build_signal_set(config)
        self.K = len(self.sset)
        self.popcnt = _popcount_table(self.K)
        self.bits_per_trial = self.sset.eta
        if corr is not None and not corr.is_identity:
            self.rtx_half = matrix_sqrt_psd(build_rtx(config, corr))
            self.rrx_half = matrix_sqrt_psd(build_rrx(config.n_r, corr.rho_a))
        else:
            self.rtx_half = self.rrx_half = None

    def _sample_h(self, gen, n):
        H = complex_normal(gen, (n, self.config.n_r, self.config.dim))
        if self.rtx_half is not None:
            H = np.matmul(self.rrx_half, H) @ self.rtx_half
        return H

    def run(self, gen, n):
        cfg, sset = self.config, self.sset
        errors = 0
        for start in range(0, n, CHUNK):
            b = min(CHUNK, n - start)
            tx = gen.integers(0, self.K, size=b)
            H = self._sample_h(gen, b)
            hx = H @ sset.matrix  # (b, n_r, K)
            noise = complex_normal(gen, (b, cfg.n_r), self.sigma2)
            y = np.take_along_axis(hx, tx[:, None, None], axis=2)[:, :, 0] + noise
            d2 = np.sum(np.abs(y[:, :, None] - hx) ** 2, axis=1)
            det = np.argmin(d2, axis=1)
            errors += int(np.sum(self.popcnt[np.bitwise_xor(tx, det)]))
        return errors, n * self.bits_per_trial, n


class MapSelKernel:
    """GSM-MBM with per-frame MAP selection (energy or max-min distance)."""

    def __init__(self, config: SystemConfig, sigma2: float, mode: str):
        if mode not in ("mi", "ed"):
            raise ValueError(f"unknown selection mode {mode!r}")
        self.config = config
        self.sigma2 = sigma2
        self.mode = mode
        self.sset = build_signal_set(config)
        self.K = len(self.sset)
        self.popcnt = _popcount_table(self.K)
        self.bits_per_trial = self.sset.eta
        if mode == "ed":
            cands = candidate_subsets(config)
            self.cand_cols = np.array([selection_columns(L, config) for L in cands])
            self.diffs = difference_vectors(self.sset)  # (dim, P)

    def _select(self, Hf: np.ndarray) -> np.ndarray:
        """Per-trial gathered column indices of the chosen subset, (b, dim)."""
        cfg = self.config
        b = Hf.shape[0]
        if self.mode == "mi":
            energy = np.abs(Hf) ** 2
            per_tu = energy.sum(axis=1).reshape(b, cfg.n_tu, cfg.N_all)
            order = np.argsort(-per_tu, axis=2, kind="stable")[:, :, : cfg.N_m]
            order.sort(axis=2)
            offsets = (np.arange(cfg.n_tu) * cfg.N_all)[None, :, None]
            return (order + offsets).reshape(b, cfg.dim)
        Z = Hf[:, :, self.cand_cols]  # (b, n_r, C, dim)
        proj = Z.reshape(-1, cfg.dim) @ self.diffs
        proj = proj.reshape(b, cfg.n_r, len(self.cand_cols), -1)
        obj = np.min(np.sum(np.abs(proj) ** 2, axis=1), axis=2)  # (b, C)
        best = np.argmax(obj, axis=1)
        return self.cand_cols[best]

    def run(self, gen, n):
        cfg, sset = self.config, self.sset
        errors = 0
        for start in range(0, n, CHUNK):
            b = min(CHUNK, n - start)
            tx = gen.integers(0, self.K, size=b)
            Hf = complex_normal(gen, (b, cfg.n_r, cfg.dim_full))
            cols = self._select(Hf)
            Hs = np.take_along_axis(Hf, cols[:, None, :], axis=2)
            hx = Hs @ sset.matrix
            noise = complex_normal(gen, (b, cfg.n_r), self.sigma2)
            y = np.take_along_axis(hx, tx[:, None, None], axis=2)[:, :, 0] + noise
            d2 = np.sum(np.abs(y[:, :, None] - hx) ** 2, axis=1)
            det = np.argmin(d2, axis=1)
            errors += int(np.sum(self.popcnt[np.bitwise_xor(tx, det)]))
        return errors, n * self.bits_per_trial, n


def _q_func(x):
    return 0.5 * erfc(x / np.sqrt(2.0))


class PcCrKernel:
    """Phase-compensated, rotated tone MIMO-MBM with feedback.

    mode "nr1" is the single-antenna scheme; "rx1" selects one antenna by
    the conditional union bound and listens on it alone; "rx2" selects the
    same antenna for feedback but combines all antennas at the detector.
    """

    def __init__(self, config: SystemConfig, sigma2: float, mode: str,
                 B: int | None = None):
        if mode not in ("nr1", "rx1", "rx2"):
            raise ValueError(f"unknown receiver mode {mode!r}")
        if mode == "nr1" and config.n_r != 1:
            raise ValueError("single-antenna mode requires n_r = 1")
        self.config = config
        self.sigma2 = sigma2
        self.mode = mode
        self.B = B
        self.sset = build_signal_set(config)
        if config.alphabet.kind != "tone":
            raise ValueError("phase compensation requires a tone alphabet")
        self.K = len(self.sset)
        self.popcnt = _popcount_table(self.K)
        self.bits_per_trial = self.sset.eta
        self.suppmat = np.real(self.sset.matrix / self.sset.scale)  # (dim, K) 0/1
        self.rot = np.exp(1j * np.arange(self.K) * (2 * np.pi / self.K))
        self.amp = self.sset.scale
        self.delta = _hamming_table(self.K)
        if B is not None:
            self.levels = -np.pi + 2 * np.pi * np.arange(1, 2**B + 1) / 2**B

    def _quantize(self, phases: np.ndarray) -> np.ndarray:
        d = np.abs(np.angle(np.exp(1j * (phases[..., None] - self.levels))))
        return self.levels[np.argmin(d, axis=-1)]

    def run(self, gen, n):
        cfg = self.config
        errors = 0
        for start in range(0, n, CHUNK):
            b = min(CHUNK, n - start)
            tx = gen.integers(0, self.K, size=b)
            H = complex_normal(gen, (b, cfg.n_r, cfg.dim))
            if cfg.n_r == 1:
                k_hat = np.zeros(b, dtype=np.int64)
            else:
                # per-antenna conditional union bound with that antenna's
                # own codebook; co-phasing makes its points a*e^{i theta}*S
                S = np.abs(H) @ self.suppmat  # (b, n_r, K)
                pts = self.amp * S * self.rot
                dist = np.abs(pts[..., :, None] - pts[..., None, :])
                peps = _q_func(dist / np.sqrt(2.0 * self.sigma2))
                bound = np.sum(peps * self.delta, axis=(-2, -1))
                k_hat = np.argmin(bound, axis=1)
            h_fb = np.take_along_axis(H, k_hat[:, None, None], axis=1)[:, 0, :]
            phases = np.angle(h_fb)
            if self.B is not None:
                phases = self._quantize(phases)
            w = np.exp(-1j * phases)  # (b, dim)
            R = self.amp * ((H * w[:, None, :]) @ self.suppmat) * self.rot  # (b, n_r, K)
            noise = complex_normal(gen, (b, cfg.n_r), self.sigma2)
            y = np.take_along_axis(R, tx[:, None, None], axis=2)[:, :, 0] + noise
            if self.mode == "rx2":
                d2 = np.sum(np.abs(y[:, :, None] - R) ** 2, axis=1)
            else:
                r_fb = np.take_along_axis(R, k_hat[:, None, None], axis=1)[:, 0, :]
                y_fb = np.take_along_axis(y, k_hat[:, None], axis=1)
                d2 = np.abs(y_fb - r_fb) ** 2
            det = np.argmin(d2, axis=1)
            errors += int(np.sum(self.popcnt[np.bitwise_xor(tx, det)]))
        return errors, n * self.bits_per_trial, n


class TcmKernel:
    """TCM-coded GSM-MBM over a quasi-static 20-use frame."""

    def __init__(self, config: SystemConfig, sigma2: float, code: ConvCode,
                 corr: CorrelationSpec | None = None, frame_uses: int = None):
        self.config = config
        self.sigma2 = sigma2
        self.code = code
        self.sset = build_signal_set(config)
        if self.sset.eta != code.n:
            raise ValueError("coded bits per use must match the signal-set rate")
        self.info_blocks = TCM_INFO_BLOCKS if frame_uses is None else frame_uses - code.tail_blocks
        self.bits_per_trial = self.info_blocks * code.k
        if corr is not None and not corr.is_identity:
            self.rtx_half = matrix_sqrt_psd(build_rtx(config, corr))
            self.rrx_half = matrix_sqrt_psd(build_rrx(config.n_r, corr.rho_a))
        else:
            self.rtx_half = self.rrx_half = None

    def run(self, gen, n):
        cfg, code, sset = self.config, self.code, self.sset
        T = self.info_blocks + code.tail_blocks
        errors = 0
        for _ in range(n):
            info = "".join("1" if bit else "0"
                           for bit in gen.integers(0, 2, size=self.bits_per_trial))
            coded = tcm_encode(info, code)
            labels = [int(coded[t * code.n : (t + 1) * code.n], 2) for t in range(T)]
            H = complex_normal(gen, (cfg.n_r, cfg.dim))
            if self.rtx_half is not None:
                H = self.rrx_half @ H @ self.rtx_half
            noise = complex_normal(gen, (T, cfg.n_r), self.sigma2)
            ys = sset.matrix[:, labels].T @ H.T + noise
            decoded = tcm_viterbi_decode(ys, H, sset, self.sigma2, code)
            errors += sum(a != b for a, b in zip(info, decoded))
        return errors, n * self.bits_per_trial, n


def build_kernel(scheme: str, config: SystemConfig, sigma2: float,
                 corr: CorrelationSpec | None = None, B: int | None = None,
                 code: ConvCode | None = None):
    if scheme in ("simo-mbm", "mimo-mbm", "sm-mbm", "gsm-mbm", "mimo", "sm", "gsm"):
        return GsmKernel(config, sigma2, corr)
    if scheme == "mapsel-mi":
        return MapSelKernel(config, sigma2, "mi")
    if scheme == "mapsel-ed":
        return MapSelKernel(config, sigma2, "ed")
    if scheme in ("pccr-nr1", "pccr-rx1", "pccr-rx2"):
        return PcCrKernel(config, sigma2, scheme.split("-")[1], B)
    if scheme == "tcm-gsm-mbm":
        from .tcm import build_code

        return TcmKernel(config, sigma2, code or build_code(), corr)
    raise ValueError(f"unknown scheme {scheme!r}")
