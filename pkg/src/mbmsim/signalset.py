"""GSM-MBM transmit-vector sets with a bijective bits <-> vector mapping.

A transmit vector has one block of length N_m = 2^m_rf per MBM-TU; an
active TU places its (power-scaled) modulation symbol at the position of
the selected mirror activation pattern (MAP), inactive TUs are zero.
Label layout, most significant bits first:

    [TU-index bits | MAP bits per active TU (ascending TU) | symbol bits
     per active TU (ascending TU)]
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .alphabet import ModulationAlphabet
from .errors import LengthMismatch, MbmSimError, NotInSet, SetTooLarge

ENUMERATION_CAP = 2**20


@dataclass(frozen=True)
class SystemConfig:
    """System dimensions: TUs, RF chains, mirrors, receive antennas, alphabet.

    m_rf = 0 models a conventional (no-mirror) antenna system, which lets
    plain MIMO/SM/GSM reuse the same signal-set machinery with N_m = 1.
    """

    n_tu: int
    n_rf: int
    m_rf: int
    n_r: int
    alphabet: ModulationAlphabet
    M_rf: int = None

    def __post_init__(self):
        if self.M_rf is None:
            object.__setattr__(self, "M_rf", self.m_rf)
        if not (1 <= self.n_rf <= self.n_tu):
            raise MbmSimError(f"need 1 <= n_rf <= n_tu, got {self.n_rf}, {self.n_tu}")
        if not (0 <= self.m_rf <= self.M_rf):
            raise MbmSimError(f"need 0 <= m_rf <= M_rf, got {self.m_rf}, {self.M_rf}")
        if self.n_r < 1:
            raise MbmSimError("n_r must be >= 1")

    @property
    def N_m(self) -> int:
        return 2**self.m_rf

    @property
    def N_all(self) -> int:
        return 2**self.M_rf

    @property
    def dim(self) -> int:
        """Length of a transmit vector (operational mirror count)."""
        return self.N_m * self.n_tu

    @property
    def dim_full(self) -> int:
        """Columns per receive antenna before MAP selection."""
        return self.N_all * self.n_tu


def rate(config: SystemConfig) -> int:
    """Spectral efficiency in bits per channel use."""
    tu_bits = comb(config.n_tu, config.n_rf).bit_length() - 1
    return tu_bits + config.n_rf * config.m_rf + config.n_rf * config.alphabet.bits_per_symbol


@dataclass(frozen=True)
class ActivationPatternSet:
    """The 2^floor(log2 C(n_tu, n_rf)) TU activation patterns used for signaling."""

    patterns: tuple[tuple[int, ...], ...]
    n_tu: int
    n_rf: int

    def __len__(self) -> int:
        return len(self.patterns)


def build_activation_patterns(n_tu: int, n_rf: int) -> ActivationPatternSet:
    """Lexicographic combinations of active TUs, truncated to a power of two."""
    if not (1 <= n_rf <= n_tu):
        raise MbmSimError("need 1 <= n_rf <= n_tu")
    n_keep = 2 ** (comb(n_tu, n_rf).bit_length() - 1)
    patterns = []
    for combo in itertools.combinations(range(n_tu), n_rf):
        pat = [0] * n_tu
        for j in combo:
            pat[j] = 1
        patterns.append(tuple(pat))
        if len(patterns) == n_keep:
            break
    return ActivationPatternSet(tuple(patterns), n_tu, n_rf)


@dataclass(frozen=True)
class TransmitVector:
    entries: np.ndarray
    label: str

    def __post_init__(self):
        self.entries.setflags(write=False)


@dataclass(frozen=True)
class SignalSet:
    """Ordered GSM-MBM signal set; vectors[i] has label format(i, '0{eta}b')."""

    vectors: tuple[TransmitVector, ...]
    eta: int
    config: SystemConfig
    scale: float  # per-symbol power scaling, 1/sqrt(n_rf)
    matrix: np.ndarray = field(repr=False)  # dim x 2^eta, column i = vectors[i]
    _lookup: dict[bytes, int] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.matrix.setflags(write=False)
        object.__setattr__(
            self, "_lookup", {v.entries.tobytes(): i for i, v in enumerate(self.vectors)}
        )

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def label_ints(self) -> np.ndarray:
        return np.arange(len(self.vectors))

    def index_of(self, entries: np.ndarray) -> int:
        key = np.ascontiguousarray(entries, dtype=complex).tobytes()
        try:
            return self._lookup[key]
        except KeyError:
            raise NotInSet("vector is not an exact member of the signal set") from None


def build_signal_set(config: SystemConfig) -> SignalSet:
    """Enumerate all 2^eta transmit vectors in canonical label order."""
    eta = rate(config)
    size = 2**eta
    if size > ENUMERATION_CAP:
        raise SetTooLarge(f"2^{eta} vectors exceed the enumeration cap {ENUMERATION_CAP}")
    aps = build_activation_patterns(config.n_tu, config.n_rf)
    tu_bits = len(aps).bit_length() - 1
    m_rf, n_rf = config.m_rf, config.n_rf
    sym_bits = config.alphabet.bits_per_symbol
    scale = 1.0 / np.sqrt(n_rf)
    N_m, dim = config.N_m, config.dim

    matrix = np.zeros((dim, size), dtype=complex)
    vectors = []
    for i in range(size):
        bits = format(i, f"0{eta}b") if eta else ""
        pos = 0
        pat_idx = int(bits[:tu_bits], 2) if tu_bits else 0
        pos += tu_bits
        active = [j for j, on in enumerate(aps.patterns[pat_idx]) if on]
        maps = []
        for _ in active:
            maps.append(int(bits[pos : pos + m_rf], 2) if m_rf else 0)
            pos += m_rf
        col = np.zeros(dim, dtype=complex)
        for rank, j in enumerate(active):
            sym_lab = bits[pos : pos + sym_bits]
            pos += sym_bits
            col[j * N_m + maps[rank]] = config.alphabet.point_for_bits(sym_lab) * scale
        matrix[:, i] = col
        vectors.append(TransmitVector(col, bits))
    return SignalSet(tuple(vectors), eta, config, scale, matrix)


def bits_to_vector(bits: str, sset: SignalSet) -> TransmitVector:
    if len(bits) != sset.eta:
        raise LengthMismatch(f"expected {sset.eta} bits, got {len(bits)}")
    return sset.vectors[int(bits, 2) if bits else 0]


def vector_to_bits(x, sset: SignalSet) -> str:
    entries = x.entries if isinstance(x, TransmitVector) else np.asarray(x)
    return sset.vectors[sset.index_of(entries)].label
