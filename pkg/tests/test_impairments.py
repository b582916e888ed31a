"""EEVM impairments, IRS phase noise and seeded phase sampling."""

import math

import mpmath
import numpy as np
import pytest

from src.errors import DomainError
from src.impairments import (
    ImpairmentConfig,
    PhaseRealization,
    coherence_factor,
    rf_distortion_matrix,
    sample_phases,
    sinc,
    trial_seed,
)


def test_sinc_values():
    assert sinc(0.0) == 1.0
    assert abs(sinc(math.pi)) < 1e-16
    expected = float(mpmath.sin(mpmath.pi / 18) / (mpmath.pi / 18))
    assert sinc(math.pi / 18) == pytest.approx(expected, rel=1e-15)
    assert sinc(math.pi / 18) == pytest.approx(0.99493077, abs=1e-8)


def test_sinc_array_input():
    out = sinc(np.array([0.0, 0.5, -0.5]))
    assert isinstance(out, np.ndarray)
    assert out[0] == 1.0 and out[1] == out[2]
    np.testing.assert_allclose(out, np.sinc(np.array([0.0, 0.5, -0.5]) / np.pi))


@pytest.mark.parametrize("kwargs", [
    dict(eta=0.0), dict(eta=1.1), dict(delta_psi=-0.1), dict(delta_psi=math.pi),
    dict(sigma2=-1e-3), dict(delta_theta_hat=4.0),
])
def test_impairment_config_rejects(kwargs):
    with pytest.raises(DomainError):
        ImpairmentConfig(**kwargs)


def test_ideal_config():
    imp = ImpairmentConfig.ideal()
    assert imp.is_ideal and imp.is_deterministic
    assert not ImpairmentConfig(eta=0.9).is_ideal


def test_zero_bounds_draw_zeros():
    real = sample_phases(ImpairmentConfig(eta=0.9, sigma2=0.1), 16, 64, seed=1)
    assert real.M == 16 and real.N == 64
    assert not real.psi.any() and not real.theta_hat.any()


def test_same_seed_same_draw(impairments):
    a = sample_phases(impairments, 16, 64, seed=42)
    b = sample_phases(impairments, 16, 64, seed=42)
    np.testing.assert_array_equal(a.psi, b.psi)
    np.testing.assert_array_equal(a.theta_hat, b.theta_hat)
    c = sample_phases(impairments, 16, 64, seed=43)
    assert not np.array_equal(a.psi, c.psi)


def test_draws_stay_in_bounds(impairments):
    real = sample_phases(impairments, 256, 1024, seed=3)
    assert np.all(np.abs(real.psi) <= impairments.delta_psi)
    assert np.all(np.abs(real.theta_hat) <= impairments.delta_theta_hat)


def test_sample_rejects_empty_arrays(impairments):
    with pytest.raises(DomainError):
        sample_phases(impairments, 0, 4, seed=0)


def test_mean_cos_matches_sinc():
    imp = ImpairmentConfig(delta_psi=math.pi / 18)
    psi = sample_phases(imp, 100_000, 1, seed=2024).psi
    cos = np.cos(psi)
    std_error = cos.std(ddof=1) / math.sqrt(len(cos))
    assert abs(cos.mean() - sinc(math.pi / 18)) < 3 * std_error


def test_coherence_factor_tends_to_sinc_squared():
    imp = ImpairmentConfig(delta_theta_hat=math.pi / 8)
    target = sinc(math.pi / 8) ** 2
    deviations = []
    for size in (100, 10_000, 1_000_000):
        devs = [abs(coherence_factor(sample_phases(imp, 1, size, seed=s).theta_hat) - target)
                for s in range(5)]
        deviations.append(sum(devs) / len(devs))
    assert deviations[0] > deviations[1] > deviations[2]
    assert coherence_factor(np.zeros(8)) == pytest.approx(1.0)


def test_trial_seed_is_pure():
    assert trial_seed(7, 3) == trial_seed(7, 3)
    seeds = {trial_seed(7, t) for t in range(1000)}
    assert len(seeds) == 1000
    assert trial_seed(7, 0) != trial_seed(8, 0)


@pytest.mark.parametrize("seed", [-1, 2 ** 64])
def test_seeds_outside_u64_rejected(seed, impairments):
    with pytest.raises(DomainError, match="seed"):
        trial_seed(seed, 0)
    with pytest.raises(DomainError, match="seed"):
        sample_phases(impairments, 4, 16, seed)


def test_u64_seed_edges_accepted(impairments):
    for seed in (0, 2 ** 64 - 1):
        assert 0 <= trial_seed(seed, 5) < 2 ** 64
        assert sample_phases(impairments, 4, 16, seed).M == 4


def test_sinc_is_even():
    x = np.random.default_rng(11).uniform(-10.0, 10.0, 1000)
    assert np.max(np.abs(sinc(x) - sinc(-x))) <= 1e-15


def test_sinc_strictly_decreasing_on_half_period():
    x = np.linspace(0.0, math.pi, 100001, endpoint=False)
    assert np.all(np.diff(sinc(x)) < 0)


def test_rf_distortion_matrix():
    real = PhaseRealization.zeros(4, 4)
    np.testing.assert_array_equal(rf_distortion_matrix(ImpairmentConfig(), real), np.eye(4))
    np.testing.assert_allclose(rf_distortion_matrix(ImpairmentConfig(eta=0.9), real), 0.9 * np.eye(4))

    imp = ImpairmentConfig(eta=0.9, delta_psi=math.pi / 4)
    chi = rf_distortion_matrix(imp, sample_phases(imp, 16, 4, seed=5))
    np.testing.assert_allclose(np.abs(np.diag(chi)), 0.9, atol=1e-15)
    assert np.count_nonzero(chi - np.diag(np.diag(chi))) == 0
