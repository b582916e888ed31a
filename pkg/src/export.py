"""
Sweep output files.

Writes sweep rows as CSV with a fixed header and emits a gnuplot script that
draws one curve per scenario from that CSV.
"""

import csv
from pathlib import Path
from typing import Optional

from .config import SweepSpec
from .sweep import SweepRow


CSV_HEADER = ["sweep_value", "scenario", "metric", "value", "std_error", "trials"]

AXIS_LABELS = {
    "transmit_power_db": "SNR (dB)",
    "transmit_power_linear": "Transmit power P (W)",
    "irs_elements": "Number of IRS elements N",
}
METRIC_LABELS = {
    "se": "Spectral efficiency (bits/s/Hz)",
    "ee": "Energy efficiency (bits/J)",
}


def format_number(value) -> str:
    """Shortest round-trip text for a number; ints stay ints, None is empty."""
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def write_csv(rows: list[SweepRow], path: Path) -> Path:
    """Write rows to `path`; identical rows always give identical bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_HEADER, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({
                "sweep_value": format_number(row.sweep_value),
                "scenario": row.scenario,
                "metric": row.metric,
                "value": format_number(row.value),
                "std_error": format_number(row.std_error),
                "trials": format_number(row.trials),
            })
    return path


def gnuplot_script(csv_path: Path, spec: SweepSpec, scenarios: list[str], image: Optional[Path] = None) -> str:
    """
    gnuplot commands plotting each scenario of a sweep CSV.

    Monte Carlo rows are drawn with error bars from the std_error column.
    """
    csv_path = Path(csv_path)
    image = Path(image) if image else csv_path.with_suffix(".png")
    log_x = spec.spacing == "log" or spec.variable == "irs_elements"

    lines = [
        f"# Generated by irsperf from {csv_path.name}",
        "set datafile separator ','",
        "set terminal pngcairo size 900,600 enhanced",
        f"set output '{image.name}'",
        f"set xlabel '{AXIS_LABELS[spec.variable]}'",
        f"set ylabel '{METRIC_LABELS[spec.metric]}'",
        "set grid",
        "set key left top",
    ]
    if log_x:
        lines.append("set logscale x 2" if spec.variable == "irs_elements" else "set logscale x")

    curves = []
    for scenario in scenarios:
        select = f"(strcol(2) eq '{scenario}' ? $4 : 1/0)"
        if scenario.startswith("nonideal_mc"):
            curves.append(
                f"'{csv_path.name}' every ::1 using 1:{select}:5 with yerrorlines title '{scenario}'"
            )
        else:
            curves.append(
                f"'{csv_path.name}' every ::1 using 1:{select} with linespoints title '{scenario}'"
            )
    lines.append("plot " + ", \\\n     ".join(curves))
    return "\n".join(lines) + "\n"


def write_plot_script(csv_path: Path, spec: SweepSpec, rows: list[SweepRow]) -> Path:
    """Write `<csv stem>.gp` next to the CSV and return its path."""
    csv_path = Path(csv_path)
    scenarios = list(dict.fromkeys(r.scenario for r in rows))
    script_path = csv_path.with_suffix(".gp")
    script_path.write_text(gnuplot_script(csv_path, spec, scenarios))
    return script_path
