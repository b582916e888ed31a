"""
Cross-module validation suites behind `irsperf validate`.

Each suite checks one family of properties of the implementation (exact
identities, bounds, monotonicity, Lambert W, large-array convergence, high-SNR
behaviour, EE optimality) on seeded random or gridded inputs and reports a
deterministic one-line verdict.
"""

import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import bisect

from .beamforming import design_beamforming
from .energy import (
    EXP_NEG1,
    PowerConfig,
    bisect_optimal_power,
    c_ap,
    ee_high_snr,
    lambert_w0,
    optimal_power,
    stationarity_residual,
)
from .geometry import Angles, SystemConfig
from .impairments import ImpairmentConfig, coherence_factor, sample_phases, sinc
from .metrics import (
    impairment_sensitivity,
    monte_carlo_se,
    se_asymptotic,
    se_high_snr,
    se_ideal,
    se_upper_bound,
    snr_asymptotic,
    snr_exact,
    snr_reduced,
)


logger = logging.getLogger(__name__)

INTENSITIES = {
    "quick": dict(identity_pairs=100, lambert_points=1000, mc_trials=1000, sinc_law_size=100_000),
    "default": dict(identity_pairs=1000, lambert_points=10_000, mc_trials=10_000, sinc_law_size=1_000_000),
    "full": dict(identity_pairs=5000, lambert_points=100_000, mc_trials=100_000, sinc_law_size=4_000_000),
}

IDENTITY_TOL = 1e-9
ARRAY_SIZES = (4, 16, 64, 256)
BOUND_SIZES = (4, 16, 64, 256, 1024, 4096)


def reference_system(M: int = 16, N: int = 64) -> SystemConfig:
    """Default link used by the suites (same values as the config defaults)."""
    return SystemConfig(
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


def reference_impairments() -> ImpairmentConfig:
    return ImpairmentConfig(eta=0.9, delta_psi=math.pi / 18, sigma2=0.1, delta_theta_hat=math.pi / 8)


@dataclass
class SuiteResult:
    """Verdict of one suite."""
    name: str
    passed: bool
    checks: int
    detail: str


def random_system(rng: np.random.Generator, M: int, N: int) -> SystemConfig:
    def gain() -> complex:
        return 10 ** rng.uniform(-2, 0) * np.exp(1j * rng.uniform(0, 2 * math.pi))

    def angles() -> Angles:
        return Angles(*rng.uniform(0, 2 * math.pi, 2))

    return SystemConfig(
        M=M,
        N=N,
        alpha=gain(),
        beta=gain(),
        aoa_irs=angles(),
        aod_ap=angles(),
        aod_irs=angles(),
        spacing_ratio=rng.uniform(0.1, 1.0),
        noise_power=10 ** rng.uniform(-3, 0),
    )


def random_impairments(rng: np.random.Generator) -> ImpairmentConfig:
    return ImpairmentConfig(
        eta=rng.uniform(0.5, 1.0),
        delta_psi=rng.uniform(0, 0.9 * math.pi),
        sigma2=0.0 if rng.random() < 0.1 else 10 ** rng.uniform(-3, 0),
        delta_theta_hat=rng.uniform(0, 0.9 * math.pi),
    )


def suite_identity(rng: np.random.Generator, pairs: int, sinc_fn: Callable) -> SuiteResult:
    """Matrix-form SNR equals the phase-sum form; sinc is the mean of cos over U[-d, d]."""
    worst = 0.0
    for _ in range(pairs):
        M, N = (int(v) for v in rng.choice(ARRAY_SIZES, 2))
        cfg = random_system(rng, M, N)
        imp = random_impairments(rng)
        real = sample_phases(imp, M, N, int(rng.integers(2 ** 63)))
        P = 10 ** rng.uniform(-2, 2)
        exact = snr_exact(cfg, imp, real, design_beamforming(cfg), P)
        reduced = snr_reduced(cfg, imp, real, P)
        worst = max(worst, abs(exact - reduced) / exact)

    sinc_worst = 0.0
    with warnings.catch_warnings():
        # quad flags roundoff once it reaches double precision
        warnings.simplefilter("ignore", IntegrationWarning)
        for delta in np.linspace(0.05, 3.0, 60):
            mean_cos = quad(math.cos, -delta, delta, epsabs=1e-14, epsrel=1e-14)[0] / (2 * delta)
            sinc_worst = max(sinc_worst, abs(sinc_fn(delta) - mean_cos))

    cfg, P = reference_system(), 1.0
    ideal_gap = abs(se_asymptotic(cfg, ImpairmentConfig.ideal(), P) - se_ideal(cfg, P))

    passed = worst <= IDENTITY_TOL and sinc_worst <= 1e-12 and ideal_gap <= 1e-12
    return SuiteResult(
        "identity", passed, pairs + 61,
        f"snr rel err {worst:.2e}, sinc err {sinc_worst:.2e}, ideal gap {ideal_gap:.2e}",
    )


def suite_bound() -> SuiteResult:
    """Closed form stays below the large-array ceiling and grows with N."""
    imp = reference_impairments()
    checks, violations, worst_margin = 0, 0, math.inf
    for ratio in (0.1, 1.0, 10.0, 100.0):
        P = ratio * imp.sigma2
        ceiling = se_upper_bound(imp, P)
        for M in BOUND_SIZES:
            previous = -math.inf
            for N in BOUND_SIZES:
                se = se_asymptotic(reference_system(M, N), imp, P)
                checks += 2
                if se > ceiling or se < previous:
                    violations += 1
                worst_margin = min(worst_margin, ceiling - se)
                previous = se
    return SuiteResult("bound", violations == 0, checks,
                       f"violations {violations}, min margin {worst_margin:.3e}")


def suite_monotonicity() -> SuiteResult:
    """SE rises with eta and falls with each other knob; P* moves against EE(P*)."""
    cfg = reference_system()
    checks, violations = 0, 0
    expected = {"eta": 1, "delta_psi": -1, "sigma2": -1, "delta_theta_hat": -1}
    for eta in (0.6, 0.75, 0.9):
        for delta_psi in (math.pi / 36, math.pi / 18, math.pi / 9):
            for sigma2 in (0.01, 0.1, 1.0):
                for delta_theta_hat in (math.pi / 16, math.pi / 8, math.pi / 4):
                    imp = ImpairmentConfig(eta, delta_psi, sigma2, delta_theta_hat)
                    slopes = impairment_sensitivity(cfg, imp, 1.0, step=1e-5)
                    for name, sign in expected.items():
                        checks += 1
                        if not slopes[name] * sign > 0:
                            violations += 1

    pc = PowerConfig(mu=1.1, p_static=10.0)
    etas = np.linspace(0.5, 1.0, 5)
    sigmas = np.geomspace(0.01, 1.0, 5)
    deltas = np.linspace(0.0, math.pi / 4, 5)
    p_opt = np.empty((5, 5, 5))
    ee_opt = np.empty((5, 5, 5))
    for i, eta in enumerate(etas):
        for j, sigma2 in enumerate(sigmas):
            for k, delta_psi in enumerate(deltas):
                result = optimal_power(ImpairmentConfig(eta, delta_psi, sigma2, math.pi / 8), pc)
                p_opt[i, j, k], ee_opt[i, j, k] = result.p_opt, result.ee_opt

    tol = 1e-12
    for axis, direction in ((0, -1), (1, 1), (2, 1)):
        dp = np.diff(p_opt, axis=axis) * direction
        de = np.diff(ee_opt, axis=axis) * -direction
        checks += dp.size + de.size
        violations += int(np.sum(dp < -tol * p_opt.max())) + int(np.sum(de < -tol * ee_opt.max()))
    return SuiteResult("monotonicity", violations == 0, checks, f"violations {violations}")


def suite_lambert(rng: np.random.Generator, points: int) -> SuiteResult:
    """W(x) e^W(x) = x, and agreement with plain bisection."""
    xs = np.concatenate([
        [-EXP_NEG1 + 1e-9, 0.0, math.e],
        rng.uniform(-EXP_NEG1 + 1e-6, 1.0, points // 2),
        10 ** rng.uniform(0, 6, points - points // 2 - 3),
    ])
    worst_residual, worst_oracle = 0.0, 0.0
    for i, x in enumerate(xs):
        w = lambert_w0(x)
        worst_residual = max(worst_residual, abs(w * math.exp(w) - x) / max(1.0, abs(x)))
        if i % 10 == 0:
            hi = max(2.0, math.log1p(x) + 1.0)
            oracle = bisect(lambda t: t * math.exp(t) - x, -1.0, hi, xtol=1e-15, maxiter=500)
            worst_oracle = max(worst_oracle, abs(w - oracle) / max(1.0, abs(oracle)))
    passed = worst_residual <= 1e-12 and worst_oracle <= 1e-10
    return SuiteResult("lambert", passed, len(xs),
                       f"max residual {worst_residual:.2e}, max oracle gap {worst_oracle:.2e}")


def suite_convergence(seed: int, trials: int, sinc_size: int, workers: int, sinc_fn: Callable) -> SuiteResult:
    """Monte Carlo mean approaches the closed form as the arrays grow."""
    imp = reference_impairments()
    gaps = []
    for M, N in ((16, 64), (256, 1024)):
        cfg = reference_system(M, N)
        mc = monte_carlo_se(cfg, imp, 1.0, trials, seed, workers=workers)
        gaps.append(abs(mc.mean_se - se_asymptotic(cfg, imp, 1.0)))

    deviations = []
    for size in (1000, sinc_size):
        devs = []
        for k in range(5):
            phases = sample_phases(replace(imp, delta_theta_hat=0.0), size, 1, seed + k).psi
            devs.append(abs(coherence_factor(phases) - sinc_fn(imp.delta_psi) ** 2))
        deviations.append(sum(devs) / len(devs))

    passed = gaps[1] < gaps[0] and gaps[1] < 0.02 and deviations[1] < deviations[0]
    return SuiteResult(
        "convergence", passed, 2 * trials + 10,
        f"gap 16x64 {gaps[0]:.2e}, gap 256x1024 {gaps[1]:.2e}, "
        f"sinc law {deviations[0]:.2e} -> {deviations[1]:.2e}",
    )


def suite_high_snr() -> SuiteResult:
    """Once SNR is high the closed form meets the high-SNR form, whatever the IRS phase noise."""
    cfg, imp = reference_system(), reference_impairments()
    checks, violations, previous = 0, 0, math.inf
    worst_gap, worst_slope = 0.0, 0.0
    h = 1e-4
    for P in np.geomspace(1.0, 1e4, 40):
        if snr_asymptotic(cfg, imp, P) < 100:
            continue
        gap = se_asymptotic(cfg, imp, P) - se_high_snr(imp, P)
        slope = (
            (se_asymptotic(cfg, replace(imp, delta_theta_hat=imp.delta_theta_hat + h), P)
             - se_asymptotic(cfg, replace(imp, delta_theta_hat=imp.delta_theta_hat - h), P)) / (2 * h)
        )
        checks += 3
        violations += int(abs(gap) > 0.01) + int(gap > previous + 1e-12) + int(abs(slope) > 0.01)
        worst_gap, worst_slope = max(worst_gap, abs(gap)), max(worst_slope, abs(slope))
        previous = gap
    return SuiteResult("high_snr", violations == 0 and checks > 0, checks,
                       f"max gap {worst_gap:.2e}, max d(gap)/d(delta_theta_hat) {worst_slope:.2e}")


def suite_optimality() -> SuiteResult:
    """P* satisfies the first-order condition, matches bisection and maximizes EE."""
    imp, pc = reference_impairments(), PowerConfig(mu=1.1, p_static=10.0)
    result = optimal_power(imp, pc)
    oracle = bisect_optimal_power(c_ap(imp), pc)
    residual = stationarity_residual(result.p_opt, c_ap(imp), pc)
    grid = np.geomspace(result.p_opt / 10, result.p_opt * 10, 1000)
    ee = np.array([ee_high_snr(imp, P, pc) for P in grid])
    best = grid[int(np.argmax(ee))]
    step = math.log(grid[1] / grid[0])
    rel_oracle = abs(result.p_opt - oracle) / oracle
    passed = (residual <= 1e-8 and rel_oracle <= 1e-8
              and abs(math.log(best / result.p_opt)) <= step
              and ee.max() <= result.ee_opt * (1 + 1e-12))
    return SuiteResult("optimality", passed, 1003,
                       f"P* {result.p_opt:.6f} W, residual {residual:.2e}, oracle gap {rel_oracle:.2e}")


def run_validation(
    seed: int,
    intensity: str = "default",
    workers: int = 1,
    sinc_fn: Callable = sinc,
) -> list[SuiteResult]:
    """
    Run every suite.

    Args:
        seed: Master seed for all random inputs
        intensity: 'quick', 'default' or 'full'
        workers: Monte Carlo worker threads
        sinc_fn: sinc implementation under test; swap in a faulty one to
            check that the harness notices

    Returns:
        List of SuiteResult objects in a fixed order
    """
    params = INTENSITIES[intensity]
    rng = np.random.default_rng(seed)
    results = [
        suite_identity(rng, params["identity_pairs"], sinc_fn),
        suite_bound(),
        suite_monotonicity(),
        suite_lambert(rng, params["lambert_points"]),
        suite_convergence(seed, params["mc_trials"], params["sinc_law_size"], workers, sinc_fn),
        suite_high_snr(),
        suite_optimality(),
    ]
    for r in results:
        logger.debug("suite %s passed=%s %s", r.name, r.passed, r.detail)
    return results


def format_report(results: list[SuiteResult], seed: int, intensity: str) -> str:
    """Plain-text report; identical inputs give identical bytes."""
    lines = [f"irsperf validation (seed={seed}, intensity={intensity})"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.name:<13} checks={r.checks:<7} {r.detail}")
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} suites passed")
    return "\n".join(lines) + "\n"
