"""
Parameter sweep engine.

Evaluates every requested scenario at every sweep point: Monte Carlo and
closed-form spectral efficiency of the impaired link, the ideal link, the
high-SNR approximation and the large-array ceiling, as SE or as EE.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional

from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn, BarColumn, TaskProgressColumn
from rich.table import Table

from .config import RunConfig, SweepSpec
from .energy import PowerConfig, energy_efficiency
from .errors import DomainError
from .geometry import SystemConfig
from .impairments import ImpairmentConfig
from .metrics import (
    monte_carlo_se,
    se_asymptotic,
    se_high_snr,
    se_ideal,
    se_upper_bound,
)


console = Console()
logger = logging.getLogger(__name__)

IMPAIRED_SCENARIOS = ("nonideal_mc", "nonideal_closed", "high_snr", "upper_bound")


@dataclass
class SweepRow:
    """One CSV row: a scenario evaluated at one sweep point."""
    sweep_value: float
    scenario: str
    metric: str
    value: float
    std_error: Optional[float] = None
    trials: Optional[int] = None


def transmit_power(spec: SweepSpec, run: RunConfig, value: float) -> float:
    """
    Transmit power P (W) at a sweep point.

    dB values are SNRs referenced to sigma_u^2 (channel_noise) or to the
    distortion power sigma^2 (distortion).
    """
    if spec.variable == "transmit_power_linear":
        return float(value)
    if spec.variable == "transmit_power_db":
        db = value
    elif spec.fixed_power is not None:
        return spec.fixed_power
    else:
        db = spec.fixed_power_db

    if spec.snr_reference == "distortion":
        reference = run.impairments.sigma2
        if reference <= 0:
            raise DomainError("snr_reference = 'distortion' needs sigma2 > 0")
    else:
        reference = run.system.noise_power
    return reference * 10 ** (db / 10)


def _system_at(spec: SweepSpec, system: SystemConfig, value) -> SystemConfig:
    if spec.variable == "irs_elements":
        return replace(system, N=value)
    return system


def _evaluate_se(
    scenario: str,
    cfg: SystemConfig,
    imp: ImpairmentConfig,
    P: float,
    trials: int,
    seed: int,
    workers: int,
) -> tuple[float, Optional[float], Optional[int]]:
    if scenario == "nonideal_mc":
        result = monte_carlo_se(cfg, imp, P, trials, seed, workers=workers)
        return result.mean_se, result.std_error, result.trials
    if scenario == "nonideal_closed":
        return se_asymptotic(cfg, imp, P), None, None
    if scenario == "ideal":
        return se_ideal(cfg, P), None, None
    if scenario == "high_snr":
        return se_high_snr(imp, P), None, None
    if scenario == "upper_bound":
        return se_upper_bound(imp, P), None, None
    raise DomainError(f"Unknown scenario: {scenario}")


def evaluate_point(
    run: RunConfig,
    value,
    trials: int,
    seed: int,
    workers: int = 1,
) -> list[SweepRow]:
    """All scenario rows for one sweep value, in scenario-then-profile order."""
    spec = run.sweep
    cfg = _system_at(spec, run.system, value)
    P = transmit_power(spec, run, value)
    profiles = [("", run.impairments)] + sorted(run.profiles.items())

    rows = []
    for scenario in spec.scenarios:
        variants = profiles if scenario in IMPAIRED_SCENARIOS else profiles[:1]
        for name, imp in variants:
            label = f"{scenario}/{name}" if name else scenario
            se, std_error, n = _evaluate_se(scenario, cfg, imp, P, trials, seed, workers)
            if spec.metric == "ee":
                pc: PowerConfig = run.power.for_ideal() if scenario == "ideal" else run.power
                value_out = energy_efficiency(se, P, pc)
                if std_error is not None:
                    std_error = energy_efficiency(std_error, P, pc)
            else:
                value_out = se
            rows.append(SweepRow(value, label, spec.metric, value_out, std_error, n))
    return rows


def run_sweep(
    run: RunConfig,
    seed: int,
    trials: int,
    workers: int = 1,
    quiet: bool = False,
) -> list[SweepRow]:
    """
    Run the sweep described by run.sweep.

    Every point reuses the master seed, so Monte Carlo curves share their
    phase draws across points. Output does not depend on `workers`.

    Args:
        run: Loaded run config with a [sweep] section
        seed: Master seed
        trials: Monte Carlo trials per point
        workers: Threads used inside each Monte Carlo estimate
        quiet: Suppress the progress bar

    Returns:
        List of SweepRow objects, point-major
    """
    if run.sweep is None:
        raise DomainError("Config has no [sweep] section")
    points = run.sweep.points()
    logger.info("Sweeping %s over %d points (%s)",
                run.sweep.variable, len(points), ", ".join(run.sweep.scenarios))

    rows = []
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console,
        disable=quiet,
    ) as progress:
        task = progress.add_task("Sweeping...", total=len(points))
        for value in points:
            progress.update(task, description=f"[cyan]{run.sweep.variable} = {value:g}[/cyan]")
            rows.extend(evaluate_point(run, value, trials, seed, workers))
            progress.advance(task)
    return rows


def peak_of(rows: list[SweepRow], scenario: str) -> Optional[SweepRow]:
    """Row with the largest value for a scenario, or None if absent."""
    matching = [r for r in rows if r.scenario == scenario]
    return max(matching, key=lambda r: r.value) if matching else None


def print_sweep_summary(rows: list[SweepRow]) -> None:
    """Print per-scenario ranges of a finished sweep."""
    table = Table(title="Sweep Summary")
    table.add_column("Scenario", style="bold")
    table.add_column("Metric")
    table.add_column("Points", justify="right")
    table.add_column("Min", justify="right")
    table.add_column("Max", justify="right")
    table.add_column("Argmax", justify="right", style="cyan")

    for scenario in dict.fromkeys(r.scenario for r in rows):
        matching = [r for r in rows if r.scenario == scenario]
        best = peak_of(rows, scenario)
        table.add_row(
            scenario,
            matching[0].metric,
            str(len(matching)),
            f"{min(r.value for r in matching):.4f}",
            f"{best.value:.4f}",
            f"{best.sweep_value:g}",
        )
    console.print(table)
