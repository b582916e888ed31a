"""
Transmit and reflect beamforming.

Both the MRT vector and the IRS phase profile are designed as if the hardware
were ideal; impairments only appear when the design is evaluated.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateChannelError, DomainError
from .geometry import SystemConfig, ComplexVector, build_channels, planar_indices


@dataclass(frozen=True)
class BeamformingSolution:
    """Unit-norm MRT vector w and designed IRS phases theta."""
    w: ComplexVector
    theta: NDArray[np.float64]

    def __post_init__(self):
        if not math.isclose(float(np.linalg.norm(self.w)), 1.0, abs_tol=1e-12):
            raise DomainError("Beamforming vector must have unit norm")
        if not np.all(np.isfinite(self.theta)):
            raise DomainError("IRS phases must be finite")


def reflection_matrix(theta: NDArray[np.float64]) -> NDArray[np.complex128]:
    """Theta = diag{e^{j theta_n}} with unit amplitude coefficients."""
    return np.diag(np.exp(1j * np.asarray(theta, dtype=float)))


def cascaded_channel(cfg: SystemConfig, theta: NDArray[np.float64]) -> ComplexVector:
    """Effective 1 x M channel h2^H Theta H1 for phases theta."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (cfg.N,):
        raise DomainError(f"theta must have length N={cfg.N}, got shape {theta.shape}")
    H1, h2H = build_channels(cfg)
    return (h2H * np.exp(1j * theta)) @ H1


def optimal_irs_phases(cfg: SystemConfig) -> NDArray[np.float64]:
    """
    Phase profile that co-phases every reflected path at the user.

    theta_n = -2*pi*(d/lambda)*(x*p + y*q) where p and q are the differences
    of the IRS arrival and departure direction cosines.
    """
    arrival, departure = cfg.aoa_irs, cfg.aod_irs
    p = (math.sin(arrival.azimuth) * math.sin(arrival.elevation)
         - math.sin(departure.azimuth) * math.sin(departure.elevation))
    q = math.cos(arrival.elevation) - math.cos(departure.elevation)
    x, y = planar_indices(cfg.N)
    return -2.0 * math.pi * cfg.spacing_ratio * (x * p + y * q)


def mrt_beamformer(cfg: SystemConfig, theta: NDArray[np.float64]) -> ComplexVector:
    """
    Maximum ratio transmission vector matched to h2^H Theta H1.

    The global phase is fixed so the first entry is real and nonnegative.

    Raises:
        DegenerateChannelError: if the cascaded channel is zero
    """
    g = cascaded_channel(cfg, theta)
    norm = np.linalg.norm(g)
    if norm == 0.0:
        raise DegenerateChannelError("Cascaded channel h2^H Theta H1 is zero")
    w = g.conj() / norm
    return w * np.exp(-1j * np.angle(w[0]))


def beamforming_gain(cfg: SystemConfig, theta: NDArray[np.float64]) -> float:
    """||h2^H Theta H1||^2, equal to M*N^2*|alpha*beta|^2 at the optimal phases."""
    return float(np.linalg.norm(cascaded_channel(cfg, theta)) ** 2)


def design_beamforming(cfg: SystemConfig) -> BeamformingSolution:
    """Optimal IRS phases plus the MRT vector built on them."""
    theta = optimal_irs_phases(cfg)
    return BeamformingSolution(w=mrt_beamformer(cfg, theta), theta=theta)
