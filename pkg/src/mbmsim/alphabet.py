"""Gray-labeled modulation alphabets (tone, PSK, QAM) with unit average energy."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedCardinality

KINDS = ("tone", "psk", "qam")

# Rectangular I x Q layouts for non-square QAM sizes.
_QAM_SHAPES = {4: (2, 2), 8: (4, 2), 16: (4, 4), 32: (8, 4), 64: (8, 8), 256: (16, 16)}


def _gray(k: int) -> int:
    return k ^ (k >> 1)


def _is_pow2(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class ModulationAlphabet:
    """An M-ary complex symbol set with Gray bit labels.

    ``points[i]`` carries the bit string ``labels[i]``. Average symbol
    energy is 1 for M >= 2; the tone alphabet is the single point 1.
    """

    points: np.ndarray
    labels: tuple[str, ...]
    kind: str
    M: int
    _index_of: dict[str, int] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index_of", {lab: i for i, lab in enumerate(self.labels)})
        self.points.setflags(write=False)

    @property
    def bits_per_symbol(self) -> int:
        return self.M.bit_length() - 1

    def point_for_bits(self, bits: str) -> complex:
        return complex(self.points[self._index_of[bits]])


def _pam_levels(n_levels: int) -> np.ndarray:
    # Gray-ordered amplitudes: position p along the axis has amplitude
    # 2p - (L-1) and label gray(p).
    return 2.0 * np.arange(n_levels) - (n_levels - 1)


def _build_qam(M: int) -> tuple[np.ndarray, list[str]]:
    if M not in _QAM_SHAPES:
        raise UnsupportedCardinality(f"unsupported QAM size {M}")
    n_i, n_q = _QAM_SHAPES[M]
    bi, bq = n_i.bit_length() - 1, n_q.bit_length() - 1
    lev_i, lev_q = _pam_levels(n_i), _pam_levels(n_q)
    points, labels = [], []
    for pi in range(n_i):
        for pq in range(n_q):
            points.append(lev_i[pi] + 1j * lev_q[pq])
            lab = format(_gray(pi), f"0{bi}b") + (format(_gray(pq), f"0{bq}b") if bq else "")
            labels.append(lab)
    return np.asarray(points, dtype=complex), labels


def build_alphabet(M: int, kind: str) -> ModulationAlphabet:
    """Build a normalized, Gray-labeled alphabet of cardinality M.

    Raises UnsupportedCardinality if M is not 1 (tone) or a power of two
    compatible with the kind.
    """
    if kind not in KINDS:
        raise UnsupportedCardinality(f"unknown alphabet kind {kind!r}")
    if kind == "tone":
        if M != 1:
            raise UnsupportedCardinality("tone alphabet has exactly one point")
        return ModulationAlphabet(np.array([1.0 + 0.0j]), ("",), "tone", 1)
    if M < 2 or not _is_pow2(M):
        raise UnsupportedCardinality(f"M={M} must be a power of two >= 2 for {kind}")
    if kind == "psk":
        m = M.bit_length() - 1
        points = np.exp(2j * np.pi * np.arange(M) / M)
        if M == 2:
            points = np.array([1.0 + 0.0j, -1.0 + 0.0j])
        labels = tuple(format(_gray(k), f"0{m}b") for k in range(M))
    else:
        points, labs = _build_qam(M)
        labels = tuple(labs)
    points = points / np.sqrt(np.mean(np.abs(points) ** 2))
    return ModulationAlphabet(points, labels, kind, M)
