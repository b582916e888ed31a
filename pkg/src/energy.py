"""
Power consumption, energy efficiency and the EE-optimal transmit power.

The optimum is the unique root of the first-order condition

    g(P) = mu * P * (ln P + C - 1) = P_C

with C = C_AP for the impaired link (or the ideal constant). Substituting
t = ln P turns it into a Lambert-W equation whose solution is

    P* = P_C / (mu * W(e^{C-1} * P_C / mu)).

The form sometimes quoted instead, P* = mu * P_C^{-1} * W(...), does not
satisfy g(P*) = P_C in general. Both are computed by closed_form_candidates and
the one that meets the stationarity residual is returned; the other is kept in
the result for reporting.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

from scipy.optimize import bisect

from .errors import ConvergenceError, DomainError
from .geometry import SystemConfig
from .impairments import ImpairmentConfig, sinc
from .metrics import se_high_snr


logger = logging.getLogger(__name__)

EXP_NEG1 = math.exp(-1.0)

# Relative residual |g(P*) - P_C| / P_C accepted from a closed form
STATIONARITY_TOL = 1e-8
LAMBERT_TOL = 1e-12
LAMBERT_MAX_ITER = 64
EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class PowerConfig:
    """Amplifier inefficiency, static circuit power and bandwidth."""
    mu: float = 1.1
    p_static: float = 10.0
    bandwidth: float = 1.0
    p_static_ideal: Optional[float] = None  # continuous-phase IRS; defaults to p_static

    def __post_init__(self):
        if not self.mu >= 1.0:
            raise DomainError(f"mu must be >= 1, got {self.mu}")
        if not self.p_static > 0:
            raise DomainError(f"p_static must be > 0, got {self.p_static}")
        if not self.bandwidth > 0:
            raise DomainError(f"bandwidth must be > 0, got {self.bandwidth}")
        if self.p_static_ideal is not None and not self.p_static_ideal > 0:
            raise DomainError(f"p_static_ideal must be > 0, got {self.p_static_ideal}")

    def for_ideal(self) -> "PowerConfig":
        """Same config with the ideal-IRS static power in place of p_static."""
        if self.p_static_ideal is None:
            return self
        return replace(self, p_static=self.p_static_ideal, p_static_ideal=None)


@dataclass(frozen=True)
class ClosedFormCandidate:
    name: str
    p: float
    residual: float


@dataclass(frozen=True)
class OptimalPowerResult:
    """EE-optimal transmit power and the quantities that certify it."""
    p_opt: float
    ee_opt: float
    stationarity_residual: float
    c_ap: float
    candidates: tuple[ClosedFormCandidate, ...] = ()


def total_power(P: float, pc: PowerConfig) -> float:
    """P_T = mu * P + P_C."""
    if P < 0:
        raise DomainError(f"Transmit power must be >= 0, got {P}")
    return pc.mu * P + pc.p_static


def energy_efficiency(R: float, P: float, pc: PowerConfig) -> float:
    """B * R / (mu * P + P_C) in bits/joule, for any externally computed rate R."""
    return pc.bandwidth * R / total_power(P, pc)


def c_ap(imp: ImpairmentConfig) -> float:
    """C_AP = 2 ln eta + 2 ln sinc(delta_psi) - ln sigma2, in nats."""
    s = sinc(imp.delta_psi)
    if imp.sigma2 <= 0 or imp.eta <= 0 or s <= 0:
        raise DomainError("C_AP needs eta > 0, sigma2 > 0 and sinc(delta_psi) > 0")
    return 2 * math.log(imp.eta) + 2 * math.log(s) - math.log(imp.sigma2)


def c_ideal(cfg: SystemConfig) -> float:
    """C = ln(M N^2 |alpha beta|^2) - ln sigma_u^2, in nats."""
    gain = cfg.M * cfg.N ** 2 * cfg.path_gain
    if gain <= 0:
        raise DomainError("Ideal constant needs nonzero path gains")
    return math.log(gain) - math.log(cfg.noise_power)


def se_ideal_high_snr(cfg: SystemConfig, P: float) -> float:
    """log2(P * M N^2 |ab|^2 / sigma_u^2), the ideal counterpart of se_high_snr."""
    if not P > 0:
        raise DomainError(f"Transmit power must be > 0, got {P}")
    return (math.log(P) + c_ideal(cfg)) / math.log(2)


def ee_high_snr(imp: ImpairmentConfig, P: float, pc: PowerConfig) -> float:
    return energy_efficiency(se_high_snr(imp, P), P, pc)


def ee_ideal(cfg: SystemConfig, P: float, pc: PowerConfig) -> float:
    """High-SNR EE of the ideal system, using the ideal-IRS static power."""
    return energy_efficiency(se_ideal_high_snr(cfg, P), P, pc.for_ideal())


def lambert_w0(x: float) -> float:
    """
    Principal branch of the Lambert W function for real x >= -1/e.

    Starts from ln(1 + x) for moderate x, ln x - ln ln x for large x, or the
    branch-point series close to -1/e, and refines with Halley's method.

    Raises:
        DomainError: if x < -1/e
        ConvergenceError: if the residual |W e^W - x| misses its tolerance
    """
    x = float(x)
    if math.isnan(x) or x < -EXP_NEG1:
        raise DomainError(f"Lambert W0 is undefined for x = {x} < -1/e")
    if x == -EXP_NEG1:
        return -1.0
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf

    if x < -0.25:
        p = math.sqrt(max(0.0, 2.0 * (math.e * x + 1.0)))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    elif x <= 3.0:
        w = math.log1p(x)
    else:
        # asymptotic start keeps w * e^w finite for huge x
        lx = math.log(x)
        w = lx - math.log(lx)

    for _ in range(LAMBERT_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - x
        w1 = w + 1.0
        if f == 0.0 or w1 == 0.0:
            break
        dw = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1))
        w -= dw
        if abs(dw) <= 4 * EPS * (1.0 + abs(w)):
            break

    residual = abs(w * math.exp(w) - x)
    if residual > LAMBERT_TOL * max(1.0, abs(x)):
        raise ConvergenceError(f"Lambert W0({x}) residual {residual:.3e} above tolerance")
    return w


def stationarity_residual(P: float, c: float, pc: PowerConfig) -> float:
    """|mu P (ln P + c - 1) - P_C| / P_C."""
    if not P > 0 or not math.isfinite(P):
        return math.inf
    return abs(pc.mu * P * (math.log(P) + c - 1.0) - pc.p_static) / pc.p_static


def closed_form_candidates(c: float, pc: PowerConfig) -> tuple[ClosedFormCandidate, ...]:
    """
    Both closed forms of the stationary point with their residuals.

    'derived' is P_C / (mu W(z)), 'typeset' is mu W(z) / P_C, z = e^{c-1} P_C / mu.
    """
    w = lambert_w0(math.exp(c - 1.0) * pc.p_static / pc.mu)
    derived = pc.p_static / (pc.mu * w)
    typeset = pc.mu * w / pc.p_static
    return (
        ClosedFormCandidate("derived", derived, stationarity_residual(derived, c, pc)),
        ClosedFormCandidate("typeset", typeset, stationarity_residual(typeset, c, pc)),
    )


def bisect_optimal_power(c: float, pc: PowerConfig) -> float:
    """Root of g(P) - P_C by plain bisection; independent of the Lambert W path."""
    def g(P: float) -> float:
        return pc.mu * P * (math.log(P) + c - 1.0) - pc.p_static

    lo = math.exp(1.0 - c)  # g(lo) = -P_C
    hi = 2.0 * lo
    while g(hi) <= 0:
        hi *= 2.0
    return bisect(g, lo, hi, xtol=1e-300, rtol=4 * EPS, maxiter=2000)


def _solve(c: float, pc: PowerConfig) -> tuple[float, float, tuple[ClosedFormCandidate, ...]]:
    candidates = closed_form_candidates(c, pc)
    best = min(candidates, key=lambda cand: cand.residual)
    if best.residual > STATIONARITY_TOL:
        raise ConvergenceError(
            "No closed form satisfies the stationarity condition: "
            + ", ".join(f"{cand.name}={cand.p:.6g} (residual {cand.residual:.2e})" for cand in candidates)
        )
    # g'(P*) = mu (ln P* + c) must be positive for the root to be the maximizer
    if not math.log(best.p) + c > 0:
        raise ConvergenceError(f"ln P* + C = {math.log(best.p) + c:.3e} is not positive")
    for cand in candidates:
        if cand is not best:
            logger.debug("Discarded %s closed form P=%.6g (residual %.2e)",
                         cand.name, cand.p, cand.residual)
    return best.p, best.residual, candidates


def optimal_power(imp: ImpairmentConfig, pc: PowerConfig) -> OptimalPowerResult:
    """EE-optimal transmit power of the impaired link at high SNR."""
    c = c_ap(imp)
    p_opt, residual, candidates = _solve(c, pc)
    return OptimalPowerResult(
        p_opt=p_opt,
        ee_opt=ee_high_snr(imp, p_opt, pc),
        stationarity_residual=residual,
        c_ap=c,
        candidates=candidates,
    )


def optimal_power_ideal(cfg: SystemConfig, pc: PowerConfig) -> OptimalPowerResult:
    """EE-optimal transmit power of the ideal link, C = ln(M N^2 |ab|^2 / sigma_u^2)."""
    c = c_ideal(cfg)
    ideal_pc = pc.for_ideal()
    p_opt, residual, candidates = _solve(c, ideal_pc)
    return OptimalPowerResult(
        p_opt=p_opt,
        ee_opt=energy_efficiency(se_ideal_high_snr(cfg, p_opt), p_opt, ideal_pc),
        stationarity_residual=residual,
        c_ap=c,
        candidates=candidates,
    )
