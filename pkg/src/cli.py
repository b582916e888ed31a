"""
irsperf CLI - Main entry point.

Usage:
    irsperf sweep --config configs/fig1_snr.toml --out results/fig1.csv
    irsperf sweep --manifest results/fig1.manifest.json --out results/replay.csv
    irsperf optimal-power --config configs/default.toml
    irsperf optimal-power --ideal --sensitivity
    irsperf validate --seed 7 --intensity quick
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from . import __version__
from .config import get_default_seed, get_default_trials, get_default_workers, get_output_dir, load_config
from .energy import PowerConfig, bisect_optimal_power, optimal_power, optimal_power_ideal
from .errors import ConfigError, ConvergenceError, DomainError
from .export import write_csv, write_plot_script
from .impairments import SEED_LIMIT
from .manifest import RunManifest, load_manifest, manifest_path_for, save_manifest
from .metrics import impairment_sensitivity
from .sweep import SweepRow, peak_of, print_sweep_summary, run_sweep
from .validation import format_report, run_validation


console = Console()
err_console = Console(stderr=True)
logger = logging.getLogger("irsperf")

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_DOMAIN_ERROR = 3


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Route package logs through rich; --verbose shows debug, --quiet only warnings and errors."""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def seed_arg(text: str) -> int:
    """argparse type for --seed: an unsigned 64-bit integer."""
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed '{text}'") from None
    if not 0 <= value < SEED_LIMIT:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2**64), got {value}")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer '{text}'") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _default_out(name: str) -> Path:
    return get_output_dir() / name


def cmd_sweep(args) -> int:
    """Run a sweep, then write CSV, gnuplot script and manifest."""
    if args.manifest:
        manifest = load_manifest(args.manifest)
        run = manifest.to_run_config()
        seed = manifest.seed if args.seed is None else args.seed
        trials = manifest.trials if args.trials is None else args.trials
        if not args.quiet:
            console.print(f"[dim]Replaying {args.manifest} (tool version {manifest.tool_version})[/dim]")
    else:
        run = load_config(args.config)
        seed = get_default_seed() if args.seed is None else args.seed
        trials = get_default_trials() if args.trials is None else args.trials

    if run.sweep is None:
        raise ConfigError("config has no [sweep] section", key="sweep")
    if trials < 1:
        raise DomainError(f"--trials must be >= 1, got {trials}")

    out = Path(args.out) if args.out else _default_out("sweep.csv")
    workers = args.workers or get_default_workers()

    if not args.quiet:
        console.print(f"\n[bold]irsperf sweep[/bold] [dim]({run.sweep.variable}, seed={seed}, "
                      f"trials={trials}, workers={workers})[/dim]")
        if run.omitted_defaults:
            console.print(f"[dim]Defaults not fixed by the reference parameter set: "
                          f"{', '.join(run.omitted_defaults)}[/dim]")

    rows = run_sweep(run, seed=seed, trials=trials, workers=workers, quiet=args.quiet)

    write_csv(rows, out)
    script = write_plot_script(out, run.sweep, rows)
    manifest_file = save_manifest(
        RunManifest.for_run(run, seed, trials, command="sweep", output_file=out),
        manifest_path_for(out),
    )

    if not args.quiet:
        print_sweep_summary(rows)
        if run.sweep.metric == "ee":
            _report_ee_peak(rows, run)
        console.print(f"[green]✓ CSV:[/green]      {out}")
        console.print(f"[green]✓ gnuplot:[/green]  {script}")
        console.print(f"[green]✓ manifest:[/green] {manifest_file}")
    return EXIT_OK


def _report_ee_peak(rows: list[SweepRow], run) -> None:
    """Compare the EE peak of the closed-form curve with the analytic optimum."""
    best: Optional[SweepRow] = peak_of(rows, "high_snr") or peak_of(rows, "nonideal_closed")
    if best is None or run.impairments.sigma2 <= 0:
        return
    result = optimal_power(run.impairments, run.power)
    console.print(f"[cyan]EE peak of {best.scenario}:[/cyan] {best.value:.6g} bits/J at "
                  f"{best.sweep_value:g}; closed-form P* = {result.p_opt:.6g} W, "
                  f"EE(P*) = {result.ee_opt:.6g} bits/J")


def cmd_optimal_power(args) -> int:
    """Closed-form EE-optimal transmit power, checked against bisection."""
    run = load_config(args.config)
    pc: PowerConfig = run.power

    if args.ideal:
        result = optimal_power_ideal(run.system, pc)
        oracle = bisect_optimal_power(result.c_ap, pc.for_ideal())
        label = "ideal"
    else:
        result = optimal_power(run.impairments, pc)
        oracle = bisect_optimal_power(result.c_ap, pc)
        label = "impaired"

    table = Table(title=f"EE-optimal transmit power ({label})")
    table.add_column("Quantity", style="bold")
    table.add_column("Value", justify="right")
    table.add_row("P* (W)", f"{result.p_opt:.10g}")
    table.add_row("EE(P*) (bits/J)", f"{result.ee_opt:.10g}")
    table.add_row("C (nats)", f"{result.c_ap:.10g}")
    table.add_row("Stationarity residual", f"{result.stationarity_residual:.3e}")
    table.add_row("Bisection oracle P (W)", f"{oracle:.10g}")
    for cand in result.candidates:
        table.add_row(f"Closed form '{cand.name}'", f"{cand.p:.6g} (residual {cand.residual:.2e})")
    console.print(table)

    if args.sensitivity and not args.ideal:
        slopes = impairment_sensitivity(run.system, run.impairments, result.p_opt)
        sens = Table(title="d SE / d parameter at P*")
        sens.add_column("Parameter", style="bold")
        sens.add_column("Slope (bits/s/Hz per unit)", justify="right")
        for name, slope in slopes.items():
            sens.add_row(name, f"{slope:+.6e}")
        console.print(sens)
    elif args.sensitivity:
        logger.warning("--sensitivity applies to the impaired link only; ignored with --ideal")

    if args.out:
        out = Path(args.out)
        rows = [SweepRow(result.p_opt, f"p_opt/{label}", "ee", result.ee_opt)]
        write_csv(rows, out)
        seed = get_default_seed() if args.seed is None else args.seed
        save_manifest(
            RunManifest.for_run(run, seed, 0, command="optimal-power", output_file=out),
            manifest_path_for(out),
        )
        console.print(f"[green]✓ Saved to:[/green] {out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    """Run the validation suites; exit 1 if any fails."""
    seed = get_default_seed() if args.seed is None else args.seed
    workers = args.workers or get_default_workers()
    results = run_validation(seed, intensity=args.intensity, workers=workers)
    report = format_report(results, seed, args.intensity)

    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(report)
    sys.stdout.write(report)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irsperf",
        description="irsperf - Spectral and energy efficiency of IRS-assisted links with hardware impairments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  irsperf sweep --config configs/fig1_snr.toml --out results/fig1.csv
  irsperf sweep --manifest results/fig1.manifest.json --out results/replay.csv
  irsperf optimal-power --config configs/fig2_ee.toml --sensitivity
  irsperf validate --intensity quick
        """
    )
    parser.add_argument('--version', action='version', version=f"irsperf {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--seed',
        type=seed_arg,
        default=None,
        help='Master seed (default: IRSPERF_SEED or 20200101)'
    )
    common.add_argument(
        '--out', '-o',
        type=str,
        default=None,
        metavar='FILE',
        help='Output file'
    )
    common.add_argument(
        '--workers', '-w',
        type=positive_int,
        default=None,
        help='Monte Carlo worker threads (default: IRSPERF_WORKERS or CPU count). Output does not depend on it.'
    )
    common.add_argument(
        '--quiet', '-q',
        action='store_true',
        help='No progress bar or summaries; warnings and errors only'
    )
    common.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='Debug logging'
    )

    sub = parser.add_subparsers(dest='command', required=True)

    sweep = sub.add_parser('sweep', parents=[common], help='Sweep SNR, transmit power or IRS size')
    source = sweep.add_mutually_exclusive_group(required=True)
    source.add_argument('--config', '-c', type=str, help='TOML run config with a [sweep] section')
    source.add_argument('--manifest', type=str, help='Replay the run recorded in a manifest')
    sweep.add_argument(
        '--trials', '-t',
        type=int,
        default=None,
        help='Monte Carlo trials per point (default: IRSPERF_TRIALS or 10000)'
    )
    sweep.set_defaults(func=cmd_sweep)

    opt = sub.add_parser('optimal-power', parents=[common], help='EE-optimal transmit power')
    opt.add_argument('--config', '-c', type=str, default=None, help='TOML run config (default: built-in defaults)')
    opt.add_argument('--ideal', action='store_true', help='Ideal link (no impairments)')
    opt.add_argument('--sensitivity', action='store_true', help='Also print d SE / d impairment at P*')
    opt.set_defaults(func=cmd_optimal_power)

    val = sub.add_parser('validate', parents=[common], help='Run the validation suites')
    val.add_argument(
        '--intensity',
        choices=['quick', 'default', 'full'],
        default='default',
        help='How many random cases each suite draws'
    )
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(verbose=args.verbose, quiet=args.quiet)

    try:
        return args.func(args)
    except ConfigError as e:
        err_console.print(f"[red]Config error:[/red] {escape(str(e))}")
        return EXIT_CONFIG_ERROR
    except (DomainError, ConvergenceError) as e:
        err_console.print(f"[red]Error:[/red] {escape(str(e))}")
        return EXIT_DOMAIN_ERROR


if __name__ == "__main__":
    sys.exit(main())
