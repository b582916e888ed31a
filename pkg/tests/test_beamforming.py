"""Optimal IRS phases and the MRT beamformer."""

import math

import numpy as np
import pytest

from conftest import make_system
from src.beamforming import (
    BeamformingSolution,
    beamforming_gain,
    cascaded_channel,
    design_beamforming,
    mrt_beamformer,
    optimal_irs_phases,
    reflection_matrix,
)
from src.errors import DegenerateChannelError, DomainError
from src.geometry import Angles, array_response


def test_matching_angles_give_zero_phases():
    cfg = make_system(aod_irs=Angles(math.pi / 4, math.pi / 3))
    np.testing.assert_allclose(optimal_irs_phases(cfg), 0.0, atol=1e-15)


def test_phases_hand_evaluated():
    # p = 1, q = 0: arrival broadside on x, departure along the array normal
    cfg = make_system(N=4, aoa_irs=Angles(math.pi / 2, math.pi / 2), aod_irs=Angles(0.0, math.pi / 2))
    np.testing.assert_allclose(optimal_irs_phases(cfg), [0.0, 0.0, -math.pi, -math.pi], atol=1e-12)


def test_phases_coherently_combine(system):
    theta = optimal_irs_phases(system)
    a_in = array_response(system.N, system.aoa_irs, system.spacing_ratio)
    a_out = array_response(system.N, system.aod_irs, system.spacing_ratio)
    combined = abs(a_out.conj() @ reflection_matrix(theta) @ a_in)
    assert combined == pytest.approx(system.N, rel=1e-12)

    rng = np.random.default_rng(0)
    for _ in range(200):
        random_theta = rng.uniform(0, 2 * math.pi, system.N)
        assert abs(a_out.conj() @ reflection_matrix(random_theta) @ a_in) <= system.N


def test_phases_beat_quantized_grid_search():
    cfg = make_system(N=4, aoa_irs=Angles(0.7, 1.2), aod_irs=Angles(2.1, 0.4))
    a_in = array_response(4, cfg.aoa_irs, cfg.spacing_ratio)
    a_out = array_response(4, cfg.aod_irs, cfg.spacing_ratio)
    levels = np.linspace(0, 2 * math.pi, 16, endpoint=False)
    best = max(
        abs(a_out.conj() @ reflection_matrix(np.array([0.0, t1, t2, t3])) @ a_in)
        for t1 in levels for t2 in levels for t3 in levels
    )
    optimum = abs(a_out.conj() @ reflection_matrix(optimal_irs_phases(cfg)) @ a_in)
    assert optimum >= best - 1e-12
    assert optimum == pytest.approx(4.0, rel=1e-12)


def test_mrt_single_antenna_is_unit_scalar():
    cfg = make_system(M=1)
    w = mrt_beamformer(cfg, optimal_irs_phases(cfg))
    assert w.shape == (1,)
    assert abs(w[0]) == pytest.approx(1.0, abs=1e-12)


def test_mrt_matches_normalized_array_response(system):
    w = design_beamforming(system).w
    a_ap = array_response(system.M, system.aod_ap, system.spacing_ratio)
    expected = a_ap / math.sqrt(system.M)
    phase = np.vdot(expected, w) / abs(np.vdot(expected, w))
    np.testing.assert_allclose(w, phase * expected, atol=1e-12)
    assert abs(w[0].imag) < 1e-15 and w[0].real >= 0.0


def test_mrt_unit_norm_for_any_phases(system):
    rng = np.random.default_rng(1)
    for _ in range(20):
        w = mrt_beamformer(system, rng.uniform(0, 2 * math.pi, system.N))
        assert np.linalg.norm(w) == pytest.approx(1.0, abs=1e-12)


def test_gain_at_optimal_phases(system):
    gain = beamforming_gain(system, optimal_irs_phases(system))
    assert gain == pytest.approx(system.M * system.N ** 2 * system.path_gain, rel=1e-12)


@pytest.mark.parametrize("offset", [0.3, -2.0, math.pi])
def test_global_irs_phase_offset_leaves_gain_unchanged(system, offset):
    theta = optimal_irs_phases(system)
    w = mrt_beamformer(system, theta)
    base = abs(cascaded_channel(system, theta) @ w) ** 2
    shifted = abs(cascaded_channel(system, theta + offset) @ w) ** 2
    assert shifted == pytest.approx(base, rel=1e-12)
    assert beamforming_gain(system, theta + offset) == pytest.approx(beamforming_gain(system, theta), rel=1e-12)

    rng = np.random.default_rng(5)
    random_theta = rng.uniform(0, 2 * math.pi, system.N)
    w = mrt_beamformer(system, random_theta)
    assert abs(cascaded_channel(system, random_theta + offset) @ w) ** 2 == pytest.approx(
        abs(cascaded_channel(system, random_theta) @ w) ** 2, rel=1e-12)


def test_degenerate_channel():
    cfg = make_system(alpha=0.0)
    with pytest.raises(DegenerateChannelError):
        mrt_beamformer(cfg, optimal_irs_phases(cfg))


def test_cascaded_channel_checks_length(system):
    with pytest.raises(DomainError):
        cascaded_channel(system, np.zeros(system.N - 1))


def test_solution_requires_unit_norm():
    with pytest.raises(DomainError):
        BeamformingSolution(w=np.array([1.0, 1.0], dtype=complex), theta=np.zeros(4))
