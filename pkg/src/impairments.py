"""
Hardware impairment models.

EEVM transmitter impairments at the AP (attenuation, per-chain phase rotation,
additive distortion noise) and phase noise at the IRS. Distortion noise is
never sampled: it enters the SNR analytically through its covariance
sigma2 * I_M.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DomainError


SEED_LIMIT = 2 ** 64


@dataclass(frozen=True)
class ImpairmentConfig:
    """EEVM parameters of the AP and phase-noise bound of the IRS."""
    eta: float = 1.0
    delta_psi: float = 0.0
    sigma2: float = 0.0
    delta_theta_hat: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise DomainError(f"eta must lie in (0, 1], got {self.eta}")
        if not 0.0 <= self.delta_psi < math.pi:
            raise DomainError(f"delta_psi must lie in [0, pi), got {self.delta_psi}")
        if not self.sigma2 >= 0.0:
            raise DomainError(f"sigma2 must be >= 0, got {self.sigma2}")
        if not 0.0 <= self.delta_theta_hat < math.pi:
            raise DomainError(f"delta_theta_hat must lie in [0, pi), got {self.delta_theta_hat}")

    @classmethod
    def ideal(cls) -> "ImpairmentConfig":
        return cls(eta=1.0, delta_psi=0.0, sigma2=0.0, delta_theta_hat=0.0)

    @property
    def is_ideal(self) -> bool:
        return self == ImpairmentConfig.ideal()

    @property
    def is_deterministic(self) -> bool:
        """No random phases to draw."""
        return self.delta_psi == 0.0 and self.delta_theta_hat == 0.0


@dataclass(frozen=True)
class PhaseRealization:
    """One Monte Carlo draw of the AP phase rotations and IRS phase noise."""
    psi: NDArray[np.float64]
    theta_hat: NDArray[np.float64]

    @property
    def M(self) -> int:
        return len(self.psi)

    @property
    def N(self) -> int:
        return len(self.theta_hat)

    @classmethod
    def zeros(cls, M: int, N: int) -> "PhaseRealization":
        return cls(psi=np.zeros(M), theta_hat=np.zeros(N))


def sinc(x: ArrayLike):
    """Unnormalized sinc, sin(x)/x with sinc(0) = 1. Scalars in, float out."""
    x = np.asarray(x, dtype=float)
    zero = x == 0.0
    safe = np.where(zero, 1.0, x)
    out = np.where(zero, 1.0, np.sin(safe) / safe)
    return float(out) if out.ndim == 0 else out


def coherence_factor(phases: ArrayLike) -> float:
    """|mean(e^{j*phase})|^2, which tends to sinc^2(delta) for U[-delta, delta] phases."""
    phases = np.asarray(phases, dtype=float)
    return float(np.abs(np.exp(1j * phases).mean()) ** 2)


def check_seed(seed: int) -> int:
    """Seeds are unsigned 64-bit integers."""
    if not 0 <= int(seed) < SEED_LIMIT:
        raise DomainError(f"seed must lie in [0, 2**64), got {seed}")
    return int(seed)


def trial_seed(seed: int, trial: int) -> int:
    """
    Child seed for one Monte Carlo trial.

    Depends only on (seed, trial), so any partition of trials across workers
    draws the same phases.
    """
    check_seed(seed)
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(trial),))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _uniform(rng: np.random.Generator, bound: float, size: int) -> NDArray[np.float64]:
    if bound == 0.0:
        return np.zeros(size)
    return rng.uniform(-bound, bound, size)


def sample_phases(imp: ImpairmentConfig, M: int, N: int, seed: int) -> PhaseRealization:
    """
    Draw psi ~ U[-delta_psi, delta_psi]^M and theta_hat ~ U[-delta_theta_hat, delta_theta_hat]^N.

    Args:
        imp: Impairment bounds
        M: AP antenna count
        N: IRS element count
        seed: 64-bit seed; equal inputs give bit-identical output

    Returns:
        PhaseRealization
    """
    if M < 1 or N < 1:
        raise DomainError(f"M and N must be >= 1, got M={M}, N={N}")
    check_seed(seed)
    rng = np.random.default_rng(int(seed))
    psi = _uniform(rng, imp.delta_psi, M)
    theta_hat = _uniform(rng, imp.delta_theta_hat, N)
    return PhaseRealization(psi=psi, theta_hat=theta_hat)


def rf_distortion_matrix(imp: ImpairmentConfig, real: PhaseRealization) -> NDArray[np.complex128]:
    """chi = diag{eta * e^{j psi(m)}}, the per-chain RF attenuation and rotation."""
    return np.diag(imp.eta * np.exp(1j * real.psi))
