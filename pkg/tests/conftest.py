"""Shared fixtures: the reference link, its impairments and power model."""

import math

import pytest

from src.energy import PowerConfig
from src.geometry import Angles, SystemConfig
from src.impairments import ImpairmentConfig


def make_system(M: int = 16, N: int = 64, **overrides) -> SystemConfig:
    values = dict(
        M=M,
        N=N,
        alpha=0.1,
        beta=0.5,
        aoa_irs=Angles(math.pi / 4, math.pi / 3),
        aod_ap=Angles(math.pi / 6, math.pi / 4),
        aod_irs=Angles(math.pi / 3, math.pi / 5),
        spacing_ratio=0.5,
        noise_power=0.1,
    )
    values.update(overrides)
    return SystemConfig(**values)


@pytest.fixture
def system() -> SystemConfig:
    return make_system()


@pytest.fixture
def impairments() -> ImpairmentConfig:
    return ImpairmentConfig(eta=0.9, delta_psi=math.pi / 18, sigma2=0.1, delta_theta_hat=math.pi / 8)


@pytest.fixture
def power() -> PowerConfig:
    return PowerConfig(mu=1.1, p_static=10.0)


@pytest.fixture
def write_config(tmp_path):
    """Write TOML text to a temp file and return its path."""
    def _write(text: str, name: str = "run.toml"):
        path = tmp_path / name
        path.write_text(text)
        return path
    return _write
