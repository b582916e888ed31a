#!/usr/bin/env python3
"""
Regenerate the SE and EE figure data end to end.

Runs the SE-vs-SNR, SE-vs-N and EE-vs-P sweeps from configs/, writes CSV,
gnuplot scripts and manifests into the output directory, then checks that each
EE curve peaks next to the closed-form P*.

Usage:
    python3 scripts/reproduce_figures.py [--out results] [--trials 10000]
    python3 scripts/reproduce_figures.py --only fig2_ee --quiet
"""

import argparse
import math
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import seed_arg
from src.config import get_default_seed, get_default_trials, get_default_workers, load_config
from src.energy import optimal_power
from src.export import write_csv, write_plot_script
from src.manifest import RunManifest, manifest_path_for, save_manifest
from src.sweep import peak_of, print_sweep_summary, run_sweep


CONFIG_DIR = Path(__file__).parent.parent / "configs"
FIGURES = ("fig1_snr", "fig1_elements", "fig2_ee")


def check_ee_peaks(rows, run) -> bool:
    """Each high_snr EE curve should peak within one grid step of its P*."""
    ok = True
    impairments = {"": run.impairments, **run.profiles}
    points = run.sweep.points()
    step = math.log(points[1] / points[0])
    for name, imp in sorted(impairments.items()):
        label = f"high_snr/{name}" if name else "high_snr"
        best = peak_of(rows, label)
        if best is None:
            continue
        p_opt = optimal_power(imp, run.power).p_opt
        near = abs(math.log(best.sweep_value / p_opt)) <= step
        ok &= near
        print(f"  {label:<18} peak at P={best.sweep_value:.4g} W, P*={p_opt:.4g} W "
              f"{'ok' if near else 'MISMATCH'}")
    return ok


def main():
    parser = argparse.ArgumentParser(
        description="Regenerate the SE and EE figure data"
    )
    parser.add_argument("--out", default="results",
                        help="Output directory (default: results)")
    parser.add_argument("--trials", type=int, default=get_default_trials(),
                        help="Monte Carlo trials per point")
    parser.add_argument("--seed", type=seed_arg, default=get_default_seed(),
                        help="Master seed")
    parser.add_argument("--workers", type=int, default=get_default_workers(),
                        help="Monte Carlo worker threads")
    parser.add_argument("--only", choices=FIGURES, default=None,
                        help="Run a single figure config")
    parser.add_argument("--quiet", action="store_true",
                        help="Hide progress bars and summaries")
    args = parser.parse_args()

    out_dir = Path(args.out)
    ok = True
    for name in ([args.only] if args.only else FIGURES):
        run = load_config(CONFIG_DIR / f"{name}.toml")
        started = time.perf_counter()
        rows = run_sweep(run, seed=args.seed, trials=args.trials, workers=args.workers, quiet=args.quiet)
        elapsed = time.perf_counter() - started

        csv_path = write_csv(rows, out_dir / f"{name}.csv")
        write_plot_script(csv_path, run.sweep, rows)
        save_manifest(RunManifest.for_run(run, args.seed, args.trials, command="sweep", output_file=csv_path),
                      manifest_path_for(csv_path))

        print(f"{name}: {len(rows)} rows in {elapsed:.1f} s -> {csv_path}")
        if not args.quiet:
            print_sweep_summary(rows)
        if run.sweep.metric == "ee":
            ok &= check_ee_peaks(rows, run)

    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
