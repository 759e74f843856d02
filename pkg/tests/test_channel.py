import numpy as np
import pytest

from mbmsim.alphabet import build_alphabet
from mbmsim.channel import (
    CorrelationSpec,
    NoiseSpec,
    RngStream,
    build_rrx,
    build_rtx,
    complex_normal,
    matrix_sqrt_psd,
    sample_correlated_channel,
    sample_iid_channel,
    sample_noise,
    snr_to_sigma2,
)
from mbmsim.errors import MbmSimError, NotPSD
from mbmsim.signalset import SystemConfig


def cfg(n_tu=2, n_rf=1, m_rf=1, n_r=2, M_rf=None):
    return SystemConfig(n_tu, n_rf, m_rf, n_r, build_alphabet(2, "psk"), M_rf=M_rf)


def test_rng_stream_reproducible_and_distinct():
    a = RngStream(7, (1, 2)).generator().standard_normal(4)
    b = RngStream(7, (1, 2)).generator().standard_normal(4)
    c = RngStream(7, (1, 3)).generator().standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert RngStream(7).child(1, 2) == RngStream(7, (1, 2))


def test_complex_normal_moments():
    gen = np.random.default_rng(0)
    z = complex_normal(gen, (200000,), var=2.0)
    assert abs(np.mean(z)) < 0.02
    assert abs(np.var(z) - 2.0) < 0.05
    assert abs(np.var(z.real) - 1.0) < 0.05  # half the variance per part


def test_iid_channel_shapes():
    config = cfg(n_tu=2, m_rf=1, M_rf=2)
    assert sample_iid_channel(config, "operational", RngStream(0)).shape == (2, 4)
    assert sample_iid_channel(config, "full", RngStream(0)).shape == (2, 8)
    with pytest.raises(MbmSimError):
        sample_iid_channel(config, "sideways", RngStream(0))


def test_rtx_structure():
    config = cfg(n_tu=2, m_rf=1)
    r = build_rtx(config, CorrelationSpec(0.5, 0.3))
    assert np.allclose(np.diag(r), 1.0)
    assert r[0, 1] == pytest.approx(0.3)  # same TU, different MAP
    assert r[0, 2] == pytest.approx(0.5)  # adjacent TU
    assert np.allclose(r, r.T)


def test_rrx_exponential_toeplitz():
    r = build_rrx(3, 0.8)
    expect = np.array([[1, 0.8, 0.64], [0.8, 1, 0.8], [0.64, 0.8, 1]])
    assert np.allclose(r, expect)


def test_matrix_sqrt_psd_round_trip():
    r = build_rrx(4, 0.6)
    s = matrix_sqrt_psd(r)
    assert np.allclose(s @ s, r)
    with pytest.raises(NotPSD):
        matrix_sqrt_psd(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_correlation_spec_validation():
    with pytest.raises(MbmSimError):
        CorrelationSpec(1.0, 0.0)
    with pytest.raises(MbmSimError):
        CorrelationSpec(0.0, -0.1)
    assert CorrelationSpec(0.0, 0.0).is_identity


def test_identity_correlation_matches_iid_bitwise():
    config = cfg()
    spec = CorrelationSpec(0.0, 0.0)
    h1 = sample_correlated_channel(config, spec, RngStream(3))
    h2 = sample_iid_channel(config, "operational", RngStream(3))
    assert np.array_equal(h1, h2)


def test_correlated_channel_second_moments():
    config = cfg(n_tu=2, m_rf=1, n_r=1)
    spec = CorrelationSpec(0.6, 0.4)
    rows = np.stack([
        sample_correlated_channel(config, spec, RngStream(0, (i,)))[0]
        for i in range(40000)
    ])
    emp = (rows.conj().T @ rows) / rows.shape[0]
    assert np.allclose(emp, build_rtx(config, spec), atol=0.03)


def test_noise_variance_and_snr():
    assert snr_to_sigma2(0.0) == pytest.approx(1.0)
    assert snr_to_sigma2(10.0) == pytest.approx(0.1)
    z = np.array([sample_noise(2, NoiseSpec(0.5), RngStream(0, (i,)))
                  for i in range(20000)])
    assert abs(np.var(z) - 0.5) < 0.02
    with pytest.raises(MbmSimError):
        NoiseSpec(0.0)
