"""
Spectral efficiency of the impaired IRS-assisted link.

Per-realization SNR in matrix form (snr_exact) and in the scalar form that only
needs the two phase sums (snr_reduced), the large-array closed forms with their
ideal, high-SNR and upper-bound special cases, and the Monte Carlo estimator of
the ergodic spectral efficiency.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .beamforming import BeamformingSolution
from .errors import DomainError, NonPositivePowerError, UnboundedError
from .geometry import SystemConfig, build_channels
from .impairments import (
    ImpairmentConfig,
    PhaseRealization,
    check_seed,
    coherence_factor,
    rf_distortion_matrix,
    sample_phases,
    sinc,
    trial_seed,
)


logger = logging.getLogger(__name__)

# Trials handed to a worker at a time. Results do not depend on it.
TRIAL_BLOCK = 512


@dataclass(frozen=True)
class SeSample:
    """SNR of one realization and its spectral efficiency."""
    snr: float
    se: float

    @classmethod
    def from_snr(cls, snr: float) -> "SeSample":
        return cls(snr=snr, se=se_of_snr(snr))


@dataclass(frozen=True)
class MonteCarloResult:
    """Sample mean of the per-realization spectral efficiency."""
    mean_se: float
    std_error: float
    trials: int
    seed: int


def _require_power(P: float) -> None:
    if not P > 0:
        raise NonPositivePowerError(f"Transmit power must be > 0, got {P}")


def _check_realization(cfg: SystemConfig, real: PhaseRealization) -> None:
    if real.M != cfg.M or real.N != cfg.N:
        raise DomainError(
            f"Realization is {real.M}x{real.N}, config expects M={cfg.M}, N={cfg.N}"
        )


def se_of_snr(snr: float) -> float:
    """log2(1 + snr) in bits/s/Hz."""
    if snr < 0:
        raise DomainError(f"SNR must be >= 0, got {snr}")
    return math.log2(1.0 + snr)


def snr_exact(
    cfg: SystemConfig,
    imp: ImpairmentConfig,
    real: PhaseRealization,
    sol: BeamformingSolution,
    P: float,
) -> float:
    """
    Received SNR evaluated with full complex matrix algebra.

    The realized reflection matrix carries the phase noise, theta + theta_hat;
    the distortion noise enters through its covariance sigma2 * I_M.
    """
    _require_power(P)
    _check_realization(cfg, real)
    H1, h2H = build_channels(cfg)
    theta_real = np.diag(np.exp(1j * (sol.theta + real.theta_hat)))
    chi = rf_distortion_matrix(imp, real)

    g = h2H @ theta_real @ H1
    signal = P * abs(g @ chi @ sol.w) ** 2
    distortion = (g @ (imp.sigma2 * np.eye(cfg.M)) @ g.conj()).real
    return float(signal / (distortion + cfg.noise_power))


def snr_reduced(
    cfg: SystemConfig,
    imp: ImpairmentConfig,
    real: PhaseRealization,
    P: float,
) -> float:
    """
    Received SNR under the optimal IRS phases and MRT, from the phase sums only.

    Exactly equal to snr_exact with design_beamforming(cfg) for any M and N.
    """
    _require_power(P)
    _check_realization(cfg, real)
    psi_sum = cfg.M ** 2 * coherence_factor(real.psi)
    theta_sum = cfg.N ** 2 * coherence_factor(real.theta_hat)
    gain = cfg.path_gain

    signal = P * imp.eta ** 2 * gain * psi_sum * theta_sum / cfg.M
    distortion = cfg.M * gain * theta_sum * imp.sigma2
    return float(signal / (distortion + cfg.noise_power))


def snr_asymptotic(cfg: SystemConfig, imp: ImpairmentConfig, P: float) -> float:
    """Large-(M, N) limit of the SNR, with sums replaced by sinc means."""
    _require_power(P)
    s_psi = sinc(imp.delta_psi) ** 2
    s_theta = sinc(imp.delta_theta_hat) ** 2
    array_gain = cfg.M * cfg.N ** 2 * cfg.path_gain

    signal = P * array_gain * imp.eta ** 2 * s_psi * s_theta
    distortion = array_gain * s_theta * imp.sigma2
    return signal / (distortion + cfg.noise_power)


def se_asymptotic(cfg: SystemConfig, imp: ImpairmentConfig, P: float) -> float:
    """Almost-sure large-array limit of the spectral efficiency."""
    return se_of_snr(snr_asymptotic(cfg, imp, P))


def se_ideal(cfg: SystemConfig, P: float) -> float:
    """Spectral efficiency without any impairment: log2(1 + P/sigma_u^2 * M N^2 |ab|^2)."""
    _require_power(P)
    return se_of_snr(P / cfg.noise_power * cfg.M * cfg.N ** 2 * cfg.path_gain)


def se_high_snr(imp: ImpairmentConfig, P: float) -> float:
    """
    High-SNR form: log2 P + 2 log2 eta + 2 log2 sinc(delta_psi) - log2 sigma2.

    Independent of the IRS phase noise by construction.

    Raises:
        DomainError: if sigma2 is zero (the expression diverges)
    """
    _require_power(P)
    if imp.sigma2 <= 0:
        raise DomainError("High-SNR spectral efficiency needs sigma2 > 0")
    return (math.log2(P) + 2 * math.log2(imp.eta)
            + 2 * math.log2(sinc(imp.delta_psi)) - math.log2(imp.sigma2))


def se_upper_bound(imp: ImpairmentConfig, P: float) -> float:
    """
    Ceiling of the spectral efficiency as M and N grow.

    Raises:
        UnboundedError: if sigma2 is zero
    """
    _require_power(P)
    if imp.sigma2 <= 0:
        raise UnboundedError("Spectral efficiency is unbounded in M, N when sigma2 = 0")
    return se_of_snr(imp.eta ** 2 * P / imp.sigma2 * sinc(imp.delta_psi) ** 2)


def impairment_sensitivity(
    cfg: SystemConfig,
    imp: ImpairmentConfig,
    P: float,
    step: float = 1e-6,
) -> dict[str, float]:
    """
    Finite-difference partial derivatives of se_asymptotic per impairment knob.

    Central differences where both neighbours are valid configurations,
    one-sided at the edges of the parameter ranges.
    """
    result = {}
    for name in ("eta", "delta_psi", "sigma2", "delta_theta_hat"):
        value = getattr(imp, name)
        evaluated = {}
        for offset in (-step, step):
            try:
                evaluated[offset] = se_asymptotic(cfg, replace(imp, **{name: value + offset}), P)
            except DomainError:
                continue
        if len(evaluated) == 2:
            result[name] = (evaluated[step] - evaluated[-step]) / (2 * step)
        elif evaluated:
            offset, se = next(iter(evaluated.items()))
            result[name] = (se - se_asymptotic(cfg, imp, P)) / offset
        else:
            raise DomainError(f"No valid neighbour to differentiate {name} at {value}")
    return result


def _trial_se(cfg: SystemConfig, imp: ImpairmentConfig, P: float, seed: int, trial: int) -> float:
    real = sample_phases(imp, cfg.M, cfg.N, trial_seed(seed, trial))
    return se_of_snr(snr_reduced(cfg, imp, real, P))


def monte_carlo_se(
    cfg: SystemConfig,
    imp: ImpairmentConfig,
    P: float,
    trials: int,
    seed: int,
    workers: int = 1,
) -> MonteCarloResult:
    """
    Ergodic spectral efficiency estimated over independent phase draws.

    Args:
        cfg: System configuration
        imp: Impairments
        P: Transmit power (W)
        trials: Number of realizations (>= 1)
        seed: Master seed; trial t draws from a child seed of (seed, t)
        workers: Worker threads; the result is bit-identical for any value

    Returns:
        MonteCarloResult with the sample mean and its standard error
    """
    _require_power(P)
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    check_seed(seed)

    values = np.empty(trials)

    def run_block(start: int) -> None:
        for t in range(start, min(start + TRIAL_BLOCK, trials)):
            values[t] = _trial_se(cfg, imp, P, seed, t)

    starts = range(0, trials, TRIAL_BLOCK)
    if workers > 1 and trials > TRIAL_BLOCK:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_block, starts))
    else:
        for start in starts:
            run_block(start)

    # fsum is exactly rounded, so the mean does not depend on evaluation order
    if np.all(values == values[0]):
        mean, std_error = float(values[0]), 0.0
    else:
        mean = math.fsum(values) / trials
        variance = math.fsum((values - mean) ** 2) / (trials - 1)
        std_error = math.sqrt(variance / trials)

    logger.debug("monte_carlo_se M=%d N=%d P=%g trials=%d -> %.6f +/- %.2e",
                 cfg.M, cfg.N, P, trials, mean, std_error)
    return MonteCarloResult(mean_se=mean, std_error=std_error, trials=trials, seed=seed)
