"""Power model, Lambert W and the EE-optimal transmit power."""

import math
from dataclasses import replace

import mpmath
import numpy as np
import pytest
from scipy.optimize import bisect
from scipy.special import lambertw

from conftest import make_system
from src.energy import (
    EXP_NEG1,
    PowerConfig,
    bisect_optimal_power,
    c_ap,
    c_ideal,
    closed_form_candidates,
    ee_high_snr,
    ee_ideal,
    energy_efficiency,
    lambert_w0,
    optimal_power,
    optimal_power_ideal,
    stationarity_residual,
    total_power,
)
from src.errors import DomainError
from src.impairments import ImpairmentConfig

mpmath.mp.dps = 40


def test_total_power():
    pc = PowerConfig(mu=1.1, p_static=10.0)
    assert total_power(0.0, pc) == 10.0
    assert total_power(1.0, pc) == pytest.approx(11.1)
    assert total_power(3.0, pc) - total_power(2.0, pc) == pytest.approx(1.1)
    with pytest.raises(DomainError):
        total_power(-1.0, pc)


def test_energy_efficiency():
    pc = PowerConfig(mu=1.0, p_static=1.0)
    assert energy_efficiency(0.0, 1.0, pc) == 0.0
    assert energy_efficiency(1.0, 1.0, pc) == 0.5
    assert energy_efficiency(1.0, 1.0, replace(pc, bandwidth=4.0)) == 2.0


@pytest.mark.parametrize("kwargs", [dict(mu=0.9), dict(p_static=0.0), dict(bandwidth=-1.0),
                                    dict(p_static_ideal=0.0)])
def test_power_config_rejects(kwargs):
    with pytest.raises(DomainError):
        PowerConfig(**kwargs)


def test_for_ideal():
    assert PowerConfig().for_ideal() == PowerConfig()
    assert PowerConfig(p_static=10.0, p_static_ideal=12.0).for_ideal().p_static == 12.0


def test_c_ap_pins(impairments):
    assert c_ap(ImpairmentConfig(eta=1.0, sigma2=1.0)) == 0.0
    assert c_ap(ImpairmentConfig(eta=1.0, sigma2=0.1)) == pytest.approx(math.log(10), rel=1e-15)
    x = mpmath.mpf(math.pi / 18)
    expected = 2 * mpmath.log(mpmath.mpf("0.9")) + 2 * mpmath.log(mpmath.sin(x) / x) - mpmath.log(mpmath.mpf("0.1"))
    assert c_ap(impairments) == pytest.approx(float(expected), rel=1e-14)
    assert c_ap(impairments) == pytest.approx(2.0817, abs=1e-4)
    with pytest.raises(DomainError):
        c_ap(ImpairmentConfig(eta=0.9))


def test_lambert_known_values():
    assert lambert_w0(0.0) == 0.0
    assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-15)
    assert lambert_w0(-EXP_NEG1) == -1.0
    oracle = bisect(lambda w: w * math.exp(w) - 26.82, 0.0, 10.0, xtol=1e-15)
    assert lambert_w0(26.82) == pytest.approx(oracle, rel=1e-12)
    assert lambert_w0(26.82) == pytest.approx(2.41, abs=0.01)


def test_lambert_matches_references():
    xs = np.concatenate([[-0.3, -0.2, 1e-300, 1e-8], np.geomspace(1e-3, 1e300, 200)])
    for x in xs:
        w = lambert_w0(x)
        assert abs(w * math.exp(w) - x) <= 1e-12 * max(1.0, abs(x))
        assert w == pytest.approx(float(mpmath.re(mpmath.lambertw(x))), rel=1e-12)
        assert w == pytest.approx(lambertw(x).real, rel=1e-8)


def test_lambert_near_branch_point():
    x = -EXP_NEG1 + 1e-9
    w = lambert_w0(x)
    assert abs(w * math.exp(w) - x) <= 1e-12
    # dW/dx is about 4e4 here, so agreement is limited by the rounding of x
    assert w == pytest.approx(float(mpmath.re(mpmath.lambertw(x))), abs=1e-10)
    assert -1.0 < w < -0.9999


def test_lambert_domain():
    with pytest.raises(DomainError):
        lambert_w0(-0.5)
    with pytest.raises(DomainError):
        lambert_w0(math.nan)


def test_stationarity_residual():
    pc = PowerConfig(mu=1.0, p_static=math.e)
    assert stationarity_residual(math.e, 1.0, pc) == pytest.approx(0.0, abs=1e-15)
    assert stationarity_residual(0.0, 1.0, pc) == math.inf


def test_fixed_point_example():
    pc = PowerConfig(mu=1.0, p_static=math.e)
    imp = ImpairmentConfig(eta=1.0, sigma2=math.exp(-1.0))
    assert c_ap(imp) == pytest.approx(1.0, rel=1e-15)
    assert optimal_power(imp, pc).p_opt == pytest.approx(math.e, rel=1e-12)


def test_candidates_only_derived_form_is_stationary(impairments, power):
    derived, typeset = closed_form_candidates(c_ap(impairments), power)
    assert derived.name == "derived" and typeset.name == "typeset"
    assert derived.residual <= 1e-8
    assert typeset.residual > 1e-2


def test_default_optimum(impairments, power):
    result = optimal_power(impairments, power)
    oracle = bisect_optimal_power(c_ap(impairments), power)
    assert result.p_opt == pytest.approx(oracle, rel=1e-8)
    assert result.p_opt == pytest.approx(3.7729, abs=1e-3)
    assert result.stationarity_residual <= 1e-8
    assert result.c_ap == pytest.approx(c_ap(impairments))
    assert result.ee_opt == pytest.approx(1.0 / (math.log(2) * 1.1 * result.p_opt), rel=1e-10)


def test_optimum_maximizes_ee_on_grid(impairments, power):
    result = optimal_power(impairments, power)
    grid = np.geomspace(result.p_opt / 10, result.p_opt * 10, 1000)
    ee = np.array([ee_high_snr(impairments, P, power) for P in grid])
    step = math.log(grid[1] / grid[0])
    assert abs(math.log(grid[np.argmax(ee)] / result.p_opt)) <= step
    assert ee.max() <= result.ee_opt * (1 + 1e-12)


def test_ideal_optimum(system, power):
    result = optimal_power_ideal(system, power)
    assert result.c_ap == pytest.approx(c_ideal(system))
    assert result.p_opt == pytest.approx(bisect_optimal_power(c_ideal(system), power), rel=1e-8)
    assert result.ee_opt == pytest.approx(ee_ideal(system, result.p_opt, power), rel=1e-12)

    hungrier = optimal_power_ideal(system, replace(power, p_static_ideal=20.0))
    assert hungrier.p_opt > result.p_opt


def test_c_ideal_pin():
    cfg = make_system()
    assert c_ideal(cfg) == pytest.approx(math.log(16 * 64 ** 2 * 0.0025 / 0.1), rel=1e-14)


def test_optimum_monotone_in_impairments(power):
    base = ImpairmentConfig(eta=0.9, delta_psi=math.pi / 18, sigma2=0.1, delta_theta_hat=math.pi / 8)
    better = optimal_power(replace(base, eta=0.95), power)
    worse = optimal_power(replace(base, sigma2=0.2), power)
    reference = optimal_power(base, power)
    assert better.p_opt < reference.p_opt < worse.p_opt
    assert better.ee_opt > reference.ee_opt > worse.ee_opt
