"""Phase compensation and constellation rotation (PC-CR) for tone MBM.

The receiver feeds back the channel phases of one antenna. The transmitter
co-phases each signal vector's active entries and then rotates vector k by
(k-1)*2*pi/K, which spreads the K co-phased points evenly on a circle at
that antenna. Codebook vectors keep unit-magnitude entries so that the
pattern recovery identity conj(v) * v = x holds exactly; the common power
scale of the underlying signal set is carried separately as ``amplitude``
and applied wherever a received signal is modeled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .errors import NonToneAlphabet, ShapeMismatch
from .signalset import SignalSet

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PhaseBook:
    """Channel phases per receive antenna, each angle in (-pi, pi]."""

    phases: np.ndarray  # n_r x (N_m * n_tu)
    quantized: bool = False
    B: int = None

    def __post_init__(self):
        self.phases.setflags(write=False)


def phasebook_from_channel(H: np.ndarray) -> PhaseBook:
    return PhaseBook(np.angle(np.asarray(H)))


def build_phase_compensation(phases_k: np.ndarray) -> np.ndarray:
    """Diagonal matrix W with entries e^{-i*phi}, one per transmit position."""
    return np.diag(np.exp(-1j * np.asarray(phases_k)))


@dataclass(frozen=True)
class PcCrCodebook:
    """Co-phased, rotated signal vectors in canonical signal-set order.

    ``vectors[:, k]`` has unit-magnitude entries on its activation support;
    ``amplitude`` is the power scale to apply when modeling transmission.
    """

    vectors: np.ndarray  # dim x K
    angles: np.ndarray  # K rotation angles, (k)*2*pi/K for k = 0..K-1
    selected_antenna: int
    amplitude: float
    sset: SignalSet

    def __post_init__(self):
        self.vectors.setflags(write=False)
        self.angles.setflags(write=False)

    def __len__(self) -> int:
        return self.vectors.shape[1]


def build_codebook(phasebook: PhaseBook, antenna: int, sset: SignalSet) -> PcCrCodebook:
    """PC-CR codebook for the given feedback antenna (0-based index)."""
    if sset.config.alphabet.kind != "tone":
        raise NonToneAlphabet("phase compensation requires a tone alphabet")
    patterns = sset.matrix / sset.scale  # exact 0/1 entries for tone sets
    w = np.exp(-1j * phasebook.phases[antenna])
    K = patterns.shape[1]
    angles = np.arange(K) * (TWO_PI / K)
    vectors = (w[:, None] * patterns) * np.exp(1j * angles)[None, :]
    return PcCrCodebook(vectors, angles, antenna, sset.scale, sset)


def recover_pattern(v: np.ndarray, codebook: PcCrCodebook) -> np.ndarray:
    """Apply conj(v) * v and rescale to an exact signal-set member."""
    return np.round(np.real(np.conj(v) * v)) * codebook.amplitude


def _q_func(x: np.ndarray) -> np.ndarray:
    return 0.5 * erfc(np.asarray(x) / np.sqrt(2.0))


def conditional_union_bound(h_k: np.ndarray, codebook: PcCrCodebook, sigma2: float) -> float:
    """Union bound on the conditional BEP for single-antenna ML detection."""
    sset = codebook.sset
    r = codebook.amplitude * (h_k @ codebook.vectors)
    d = np.abs(r[:, None] - r[None, :])
    from .detect import _hamming_table

    delta = _hamming_table(len(codebook))
    peps = _q_func(d / np.sqrt(2.0 * sigma2))
    np.fill_diagonal(peps, 0.0)
    K = len(codebook)
    return float(np.sum(peps * delta) / (K * sset.eta))


def select_antenna_scheme1(H: np.ndarray, sigma2: float, sset: SignalSet) -> int:
    """Antenna whose own codebook gives the lowest conditional union bound."""
    phasebook = phasebook_from_channel(H)
    bounds = [
        conditional_union_bound(H[k], build_codebook(phasebook, k, sset), sigma2)
        for k in range(H.shape[0])
    ]
    return int(np.argmin(bounds))


def _demap(index: int, codebook: PcCrCodebook):
    v_hat = codebook.vectors[:, index]
    x_hat = recover_pattern(v_hat, codebook)
    return v_hat, x_hat, codebook.sset.vectors[index].label


def detect_pccr_scheme1(y_scalar: complex, h_k: np.ndarray, codebook: PcCrCodebook):
    """Single-antenna ML detection over the codebook; returns (v, x, bits)."""
    r = codebook.amplitude * (h_k @ codebook.vectors)
    return _demap(int(np.argmin(np.abs(y_scalar - r) ** 2)), codebook)


def detect_pccr_scheme2(y: np.ndarray, H: np.ndarray, codebook: PcCrCodebook, k_hat: int):
    """Combined ML detection using all receive antennas; returns (v, x, bits).

    Minimizes ||y - a*H*v||^2, which splits into the feedback antenna's
    co-phased term plus the remaining antennas' contributions.
    """
    y = np.asarray(y)
    if y.shape != (H.shape[0],):
        raise ShapeMismatch(f"expected y of shape {(H.shape[0],)}, got {y.shape}")
    R = codebook.amplitude * (H @ codebook.vectors)
    metrics = np.sum(np.abs(y[:, None] - R) ** 2, axis=0)
    return _demap(int(np.argmin(metrics)), codebook)


def scheme2_metric_matrix_form(y: np.ndarray, H: np.ndarray, codebook: PcCrCodebook,
                               k_hat: int, index: int) -> float:
    """Metric ||y - a*H^(v)*v||^2 where the non-feedback rows of H are
    de-rotated entrywise by conj(v) before applying v."""
    v = codebook.vectors[:, index]
    Hv = H * np.conj(v)[None, :]
    Hv[k_hat] = H[k_hat]
    return float(np.sum(np.abs(y - codebook.amplitude * (Hv @ v)) ** 2))


def scheme2_metric_decomposed(y: np.ndarray, H: np.ndarray, codebook: PcCrCodebook,
                              k_hat: int, index: int) -> float:
    """Same metric written per antenna: the feedback antenna is matched to
    the rotated vector, the others to the recovered unrotated pattern."""
    v = codebook.vectors[:, index]
    x = recover_pattern(v, codebook) / codebook.amplitude
    total = np.abs(y[k_hat] - codebook.amplitude * (H[k_hat] @ v)) ** 2
    for i in range(H.shape[0]):
        if i != k_hat:
            total += np.abs(y[i] - codebook.amplitude * (H[i] @ x)) ** 2
    return float(total)


def quantize_phases(phasebook: PhaseBook, B: int) -> PhaseBook:
    """Snap each phase to the nearest of the 2^B levels -pi + 2*pi*k/2^B."""
    levels = -np.pi + TWO_PI * np.arange(1, 2**B + 1) / 2**B
    diff = phasebook.phases[..., None] - levels
    circ = np.abs(np.angle(np.exp(1j * diff)))
    # argmin takes the first minimum, i.e. the lower k on a circular tie
    return PhaseBook(levels[np.argmin(circ, axis=-1)], quantized=True, B=B)


def predicted_diversity_pccr(n_tu: int, n_r: int) -> int:
    return n_r * (n_tu + 1)


def feedback_bits_pccr(config, B: int) -> int:
    return config.n_tu * config.N_m * B
