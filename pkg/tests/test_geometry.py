"""Array response vectors and LoS channel construction."""

import logging
import math

import numpy as np
import pytest

from conftest import make_system
from src.errors import DomainError, InvalidDimensionError
from src.geometry import Angles, array_response, build_channels, planar_indices, side_length


def test_side_length_accepts_perfect_squares():
    assert [side_length(n) for n in (1, 4, 16, 1024)] == [1, 2, 4, 32]


@pytest.mark.parametrize("bad", [0, -4, 2, 15, 63, 4.0, True])
def test_side_length_rejects_non_squares(bad):
    with pytest.raises(InvalidDimensionError):
        side_length(bad)


def test_planar_indices_order():
    x, y = planar_indices(9)
    assert x.tolist() == [0, 0, 0, 1, 1, 1, 2, 2, 2]
    assert y.tolist() == [0, 1, 2, 0, 1, 2, 0, 1, 2]


def test_single_element_response_is_one():
    a = array_response(1, Angles(1.234, 0.567), 0.5)
    assert a.tolist() == [1.0 + 0.0j]


def test_zero_phase_progression():
    a = array_response(4, Angles(0.0, math.pi / 2), 0.5)
    np.testing.assert_allclose(a, np.ones(4), atol=1e-15)


def test_response_matches_elementwise_formula():
    angles = Angles(math.pi / 2, math.pi / 2)
    a = array_response(4, angles, 0.5)
    side = 2
    for n in range(4):
        x, y = divmod(n, side)
        phase = 2 * math.pi * 0.5 * (x * math.sin(angles.azimuth) * math.sin(angles.elevation)
                                     + y * math.cos(angles.elevation))
        assert abs(a[n] - complex(math.cos(phase), math.sin(phase))) < 1e-15
    np.testing.assert_allclose(a, [1, 1, -1, -1], atol=1e-12)


def test_response_is_unit_modulus_and_read_only():
    a = array_response(64, Angles(0.3, 1.1), 0.7)
    np.testing.assert_allclose(np.abs(a), 1.0, atol=1e-15)
    with pytest.raises(ValueError):
        a[0] = 2.0


def test_response_rejects_nonpositive_spacing():
    with pytest.raises(DomainError):
        array_response(4, Angles(0.1, 0.2), 0.0)


def test_scalar_channels():
    H1, h2H = build_channels(make_system(M=1, N=1))
    assert H1.shape == (1, 1)
    assert H1[0, 0] == pytest.approx(0.1)
    assert h2H.tolist() == [pytest.approx(0.5)]


def test_h1_is_rank_one():
    H1, _ = build_channels(make_system(M=16, N=64, alpha=0.3 - 0.2j))
    minors = H1[:-1, :-1] * H1[1:, 1:] - H1[:-1, 1:] * H1[1:, :-1]
    assert np.max(np.abs(minors)) < 1e-12
    assert np.linalg.matrix_rank(H1) == 1


def test_channel_norms():
    H1, h2H = build_channels(make_system(M=4, N=4))
    assert np.linalg.norm(H1) == pytest.approx(0.4, abs=1e-12)
    assert np.linalg.norm(h2H) == pytest.approx(1.0, abs=1e-12)


def test_h1_matches_outer_product_of_responses():
    cfg = make_system(M=16, N=64, alpha=0.2 + 0.1j)
    H1, _ = build_channels(cfg)
    a_n = array_response(cfg.N, cfg.aoa_irs, cfg.spacing_ratio)
    a_m = array_response(cfg.M, cfg.aod_ap, cfg.spacing_ratio)
    for n in range(cfg.N):
        for m in range(cfg.M):
            assert abs(H1[n, m] - cfg.alpha * a_n[n] * a_m[m].conjugate()) <= 1e-14


def test_equivalent_angles_give_same_response():
    az, el = 0.7, 1.2
    a = array_response(64, Angles(az, el), 0.5)
    # sin(az)sin(el) and cos(el) are unchanged by negating both angles
    np.testing.assert_array_equal(a, array_response(64, Angles(-az, -el), 0.5))
    np.testing.assert_allclose(a, array_response(64, Angles(math.pi - az, el), 0.5), rtol=0, atol=1e-13)
    np.testing.assert_allclose(a, array_response(64, Angles(az + 2 * math.pi, el), 0.5), rtol=0, atol=1e-13)


def test_system_rejects_bad_values():
    with pytest.raises(InvalidDimensionError):
        make_system(N=63)
    with pytest.raises(DomainError):
        make_system(noise_power=0.0)
    with pytest.raises(DomainError):
        Angles(math.nan, 0.0)


def test_angles_outside_principal_range_warn(caplog):
    with caplog.at_level(logging.WARNING, logger="src.geometry"):
        make_system(aod_ap=Angles(7.0, 0.5))
    assert "aod_ap" in caplog.text


def test_path_gain():
    assert make_system(alpha=0.1j, beta=-0.5).path_gain == pytest.approx(0.0025)
