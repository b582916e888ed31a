"""
Array geometry and line-of-sight channel construction.

Builds uniform square planar array (USPA) response vectors and the rank-one
AP->IRS and IRS->user channels. All outputs are read-only numpy arrays.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DomainError, InvalidDimensionError


logger = logging.getLogger(__name__)

ComplexVector = NDArray[np.complex128]
ComplexMatrix = NDArray[np.complex128]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Angles:
    """Azimuth/elevation pair in radians."""
    azimuth: float
    elevation: float

    def __post_init__(self):
        if not (math.isfinite(self.azimuth) and math.isfinite(self.elevation)):
            raise DomainError(f"Angles must be finite, got {self.azimuth}, {self.elevation}")

    @classmethod
    def from_degrees(cls, azimuth: float, elevation: float) -> "Angles":
        return cls(math.radians(azimuth), math.radians(elevation))

    @property
    def in_principal_range(self) -> bool:
        """True when both angles lie in [0, 2*pi)."""
        return all(0.0 <= a < TWO_PI for a in (self.azimuth, self.elevation))


def side_length(count: int) -> int:
    """
    Side of a square array with `count` elements.

    Raises:
        InvalidDimensionError: if count is not a positive perfect square
    """
    if isinstance(count, bool) or not isinstance(count, (int, np.integer)) or count < 1:
        raise InvalidDimensionError(f"Array size must be a positive integer, got {count!r}")
    side = math.isqrt(int(count))
    if side * side != count:
        raise InvalidDimensionError(f"Array size {count} is not a perfect square")
    return side


def planar_indices(count: int) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """
    Planar (x, y) coordinates of each element in linear order.

    Element n (1-based) sits at x = floor((n-1)/sqrt(X)), y = (n-1) mod sqrt(X).
    """
    side = side_length(count)
    linear = np.arange(count)
    return linear // side, linear % side


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class SystemConfig:
    """Array sizes, path gains, angles and noise of the IRS-assisted link."""
    M: int
    N: int
    alpha: complex
    beta: complex
    aoa_irs: Angles
    aod_ap: Angles
    aod_irs: Angles
    spacing_ratio: float = 0.5
    noise_power: float = 0.1

    def __post_init__(self):
        side_length(self.M)
        side_length(self.N)
        if not self.spacing_ratio > 0:
            raise DomainError(f"spacing_ratio must be > 0, got {self.spacing_ratio}")
        if not self.noise_power > 0:
            raise DomainError(f"noise_power must be > 0, got {self.noise_power}")
        for name in ("aoa_irs", "aod_ap", "aod_irs"):
            angles = getattr(self, name)
            if not angles.in_principal_range:
                logger.warning("%s = (%.4f, %.4f) rad lies outside [0, 2*pi)",
                               name, angles.azimuth, angles.elevation)

    @property
    def path_gain(self) -> float:
        """|alpha * beta|^2, the only way the path gains enter any result."""
        return abs(self.alpha * self.beta) ** 2


def array_response(count: int, angles: Angles, spacing_ratio: float) -> ComplexVector:
    """
    USPA response vector a_X(azimuth, elevation).

    Args:
        count: Number of elements X (perfect square)
        angles: Azimuth/elevation in radians
        spacing_ratio: Element spacing over wavelength, d/lambda

    Returns:
        Read-only complex vector of length X, first element 1
    """
    if not spacing_ratio > 0:
        raise DomainError(f"spacing_ratio must be > 0, got {spacing_ratio}")
    x, y = planar_indices(count)
    horizontal = math.sin(angles.azimuth) * math.sin(angles.elevation)
    vertical = math.cos(angles.elevation)
    phase = TWO_PI * spacing_ratio * (x * horizontal + y * vertical)
    return _frozen(np.exp(1j * phase))


def build_channels(cfg: SystemConfig) -> tuple[ComplexMatrix, ComplexVector]:
    """
    LoS channels of the link.

    Returns:
        (H1, h2H) where H1 = alpha * a_N(aoa_irs) a_M(aod_ap)^H is N x M and
        h2H = beta * a_N(aod_irs)^H is the IRS->user row, stored 1-D (length N)
    """
    a_irs_in = array_response(cfg.N, cfg.aoa_irs, cfg.spacing_ratio)
    a_ap = array_response(cfg.M, cfg.aod_ap, cfg.spacing_ratio)
    a_irs_out = array_response(cfg.N, cfg.aod_irs, cfg.spacing_ratio)

    H1 = cfg.alpha * np.outer(a_irs_in, a_ap.conj())
    h2H = cfg.beta * a_irs_out.conj()
    return _frozen(H1), _frozen(h2H)
