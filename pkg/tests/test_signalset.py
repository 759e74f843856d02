import numpy as np
import pytest

from mbmsim.alphabet import build_alphabet
from mbmsim.errors import LengthMismatch, MbmSimError, NotInSet
from mbmsim.signalset import (
    SystemConfig,
    bits_to_vector,
    build_activation_patterns,
    build_signal_set,
    rate,
    vector_to_bits,
)


def cfg(n_tu, n_rf, m_rf, M=2, kind="psk", n_r=1, M_rf=None):
    return SystemConfig(n_tu, n_rf, m_rf, n_r, build_alphabet(M, kind), M_rf=M_rf)


def test_rate_examples():
    # floor(log2 C(4,2)) + 2*2 + 2*log2(4) = 2 + 4 + 4
    assert rate(cfg(4, 2, 2, 4, "qam")) == 10
    # MIMO-MBM with every TU active: 0 + 2*2 + 2*3
    assert rate(cfg(2, 2, 2, 8, "qam")) == 10
    assert rate(cfg(1, 1, 4, 64, "qam")) == 10
    # tone carries no symbol bits
    assert rate(cfg(2, 2, 1, 1, "tone")) == 2
    assert rate(cfg(4, 2, 1, 4, "qam")) == 8


def test_activation_patterns_truncated_to_power_of_two():
    aps = build_activation_patterns(4, 2)
    assert len(aps) == 4  # C(4,2) = 6 truncated
    assert all(sum(p) == 2 for p in aps.patterns)
    assert len(set(aps.patterns)) == len(aps)
    # lexicographic combinations come first
    assert aps.patterns[0] == (1, 1, 0, 0)


def test_config_validation():
    with pytest.raises(MbmSimError):
        cfg(2, 3, 1)
    with pytest.raises(MbmSimError):
        cfg(2, 1, 3, M_rf=2)
    with pytest.raises(MbmSimError):
        SystemConfig(1, 1, 1, 0, build_alphabet(2, "psk"))


@pytest.mark.parametrize("n_tu,n_rf,m_rf,M,kind", [
    (1, 1, 2, 2, "psk"), (2, 1, 1, 4, "qam"), (2, 2, 1, 1, "tone"),
    (3, 2, 1, 2, "psk"), (4, 2, 2, 4, "qam"),
])
def test_set_size_structure_and_energy(n_tu, n_rf, m_rf, M, kind):
    config = cfg(n_tu, n_rf, m_rf, M, kind)
    sset = build_signal_set(config)
    assert len(sset) == 2 ** rate(config)
    N_m = config.N_m
    for v in sset.vectors:
        blocks = v.entries.reshape(n_tu, N_m)
        nonzero_blocks = np.sum(np.any(blocks != 0, axis=1))
        assert nonzero_blocks == n_rf
        assert np.all(np.count_nonzero(blocks, axis=1) <= 1)
    energies = np.sum(np.abs(sset.matrix) ** 2, axis=0)
    assert abs(np.mean(energies) - 1.0) < 1e-12


def test_label_round_trip():
    config = cfg(2, 1, 2, 4, "qam")
    sset = build_signal_set(config)
    for i, v in enumerate(sset.vectors):
        assert v.label == format(i, f"0{sset.eta}b")
        assert bits_to_vector(v.label, sset) is v
        assert vector_to_bits(v, sset) == v.label
        assert vector_to_bits(v.entries.copy(), sset) == v.label


def test_bits_to_vector_length_check():
    sset = build_signal_set(cfg(1, 1, 1))
    with pytest.raises(LengthMismatch):
        bits_to_vector("0", sset)


def test_vector_not_in_set():
    sset = build_signal_set(cfg(1, 1, 1))
    with pytest.raises(NotInSet):
        vector_to_bits(np.array([0.5 + 0j, 0.5 + 0j]), sset)


def test_no_mirror_config_reduces_to_plain_modulation():
    config = cfg(2, 2, 0, 4, "qam")
    sset = build_signal_set(config)
    assert sset.eta == 4
    assert config.dim == 2
