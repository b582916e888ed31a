"""
Configuration loading.

Reads TOML run configs with [system], [impairments], [power], [sweep] and
optional [profiles.<name>] sections, applies the simulation defaults, and keeps
track of which defaults the reference parameter set leaves unspecified.
Environment settings come from a .env file via python-dotenv.
"""

import logging
import math
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np
from dotenv import load_dotenv

from .energy import PowerConfig
from .errors import ConfigError, DomainError
from .geometry import Angles, SystemConfig, side_length
from .impairments import SEED_LIMIT, ImpairmentConfig


# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)


# --- Environment settings ---

def get_output_dir() -> Path:
    """Get default output directory, evaluated at runtime."""
    return Path(os.getenv("IRSPERF_OUTPUT_DIR", "results")).expanduser()


def _env_int(name: str, default: int, low: int, high: Optional[int] = None) -> int:
    """Integer environment setting in [low, high); raises ConfigError naming the variable."""
    raw = os.getenv(name)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got '{raw}'", key=name) from None
    if value < low or (high is not None and value >= high):
        bound = f"[{low}, {high})" if high is not None else f">= {low}"
        raise ConfigError(f"{name} must be {bound}, got {value}", key=name)
    return value


def get_default_workers() -> int:
    """Worker threads for Monte Carlo, from IRSPERF_WORKERS or the CPU count."""
    return _env_int("IRSPERF_WORKERS", os.cpu_count() or 1, 1)


def get_default_trials() -> int:
    return _env_int("IRSPERF_TRIALS", 10000, 1)


def get_default_seed() -> int:
    return _env_int("IRSPERF_SEED", 20200101, 0, SEED_LIMIT)


# --- Defaults ---

SWEEP_VARIABLES = ("transmit_power_db", "irs_elements", "transmit_power_linear")
SCENARIOS = ("nonideal_mc", "nonideal_closed", "ideal", "high_snr", "upper_bound")
METRICS = ("se", "ee")
SPACINGS = ("linear", "log")
SNR_REFERENCES = ("channel_noise", "distortion")
DEFAULT_SCENARIOS = ("nonideal_closed", "ideal")

SYSTEM_ANGLES = {
    "aoa_irs": (math.pi / 4, math.pi / 3),
    "aod_ap": (math.pi / 6, math.pi / 4),
    "aod_irs": (math.pi / 3, math.pi / 5),
}
IMPAIRMENT_ANGLES = ("delta_psi", "delta_theta_hat")

DEFAULTS = {
    "system": {
        "M": 16,
        "N": 64,
        "alpha": 0.1,
        "beta": 0.5,
        "spacing_ratio": 0.5,
        "noise_power": 0.1,
        **{f"{link}_azimuth": az for link, (az, _) in SYSTEM_ANGLES.items()},
        **{f"{link}_elevation": el for link, (_, el) in SYSTEM_ANGLES.items()},
    },
    "impairments": {
        "eta": 0.9,
        "delta_psi": math.pi / 18,
        "sigma2": 0.1,
        "delta_theta_hat": math.pi / 8,
    },
    "power": {
        "mu": 1.1,
        "p_static": 10.0,
        "bandwidth": 1.0,
        "p_static_ideal": None,
    },
}

# Defaults not fixed by the reference parameter set; flagged in run manifests
ASSUMED_DEFAULTS = (
    "system.spacing_ratio",
    "system.noise_power",
    *(f"system.{link}_{part}" for link in SYSTEM_ANGLES for part in ("azimuth", "elevation")),
    "power.p_static",
    "power.bandwidth",
)

SWEEP_KEYS = {
    "variable", "start", "stop", "steps", "spacing", "values", "scenarios",
    "metric", "snr_reference", "fixed_power_db", "fixed_power",
}


@dataclass(frozen=True)
class SweepSpec:
    """Which variable to sweep, over what points, and which curves to emit."""
    variable: str
    start: float = 0.0
    stop: float = 1.0
    steps: int = 2
    scenarios: tuple[str, ...] = DEFAULT_SCENARIOS
    metric: str = "se"
    spacing: str = "linear"
    snr_reference: Optional[str] = None
    values: Optional[tuple[float, ...]] = None
    fixed_power_db: Optional[float] = None
    fixed_power: Optional[float] = None

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise DomainError(f"variable must be one of {', '.join(SWEEP_VARIABLES)}")
        unknown = [s for s in self.scenarios if s not in SCENARIOS]
        if unknown or not self.scenarios:
            raise DomainError(f"scenarios must be a non-empty subset of {', '.join(SCENARIOS)}")
        if self.metric not in METRICS:
            raise DomainError(f"metric must be one of {', '.join(METRICS)}")
        if self.spacing not in SPACINGS:
            raise DomainError(f"spacing must be one of {', '.join(SPACINGS)}")
        if self.snr_reference is not None and self.snr_reference not in SNR_REFERENCES:
            raise DomainError(f"snr_reference must be one of {', '.join(SNR_REFERENCES)}")
        if self.values is None:
            if not self.start < self.stop:
                raise DomainError(f"start ({self.start}) must be < stop ({self.stop})")
            if self.steps < 2:
                raise DomainError(f"steps must be >= 2, got {self.steps}")
            if self.spacing == "log" and self.start <= 0:
                raise DomainError("log spacing needs start > 0")
        elif len(self.values) < 1:
            raise DomainError("values must not be empty")

        if self.variable == "transmit_power_db" and self.snr_reference is None:
            raise DomainError("transmit_power_db sweeps need snr_reference "
                              "(channel_noise: P/sigma_u^2, distortion: P/sigma^2)")
        if self.variable == "irs_elements":
            if self.fixed_power is None and self.fixed_power_db is None:
                raise DomainError("irs_elements sweeps need fixed_power or fixed_power_db")
            if self.fixed_power_db is not None and self.snr_reference is None:
                raise DomainError("fixed_power_db needs snr_reference")
            for n in self.points():
                side_length(n)

    def points(self) -> list:
        """Sweep values in order; IRS sizes are returned as ints."""
        if self.values is not None:
            raw = [float(v) for v in self.values]
        elif self.spacing == "log":
            raw = np.geomspace(self.start, self.stop, self.steps).tolist()
        else:
            raw = np.linspace(self.start, self.stop, self.steps).tolist()
        if self.variable == "irs_elements":
            return [int(round(v)) if abs(v - round(v)) < 1e-9 else v for v in raw]
        return raw


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs, plus bookkeeping for the manifest."""
    system: SystemConfig
    impairments: ImpairmentConfig
    power: PowerConfig
    sweep: Optional[SweepSpec] = None
    profiles: dict[str, ImpairmentConfig] = field(default_factory=dict)
    omitted_defaults: tuple[str, ...] = ()
    source: Optional[str] = None


def _line_of(text: Optional[str], section: str, key: str) -> Optional[int]:
    """Line number of `key` inside `[section]` in the raw TOML text."""
    if not text:
        return None
    current = None
    pattern = re.compile(rf"^\s*\"?{re.escape(key)}\"?\s*=")
    for number, line in enumerate(text.splitlines(), start=1):
        header = re.match(r"^\s*\[([^\]]+)\]", line)
        if header:
            current = header.group(1).strip()
            continue
        if current == section and pattern.match(line):
            return number
    return None


class _Section:
    """Key lookup over one TOML table with diagnostics that name the key."""

    def __init__(self, name: str, data: dict, text: Optional[str]):
        self.name = name
        self.data = dict(data)
        self.text = text
        self.used: set[str] = set()

    def error(self, key: str, message: str) -> ConfigError:
        return ConfigError(message, key=f"{self.name}.{key}", line=_line_of(self.text, self.name, key))

    def has(self, key: str) -> bool:
        return key in self.data

    def number(self, key: str, default: Any, kind: type = float) -> Any:
        if key not in self.data:
            return default
        self.used.add(key)
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(key, f"expected a number, got {value!r}")
        if kind is int:
            if isinstance(value, float) and not value.is_integer():
                raise self.error(key, f"expected an integer, got {value!r}")
            return int(value)
        return float(value)

    def complex_number(self, key: str, default: complex) -> complex:
        if key not in self.data:
            return complex(default)
        self.used.add(key)
        value = self.data[key]
        if isinstance(value, bool):
            raise self.error(key, f"expected a complex number, got {value!r}")
        try:
            return complex(value.replace(" ", "")) if isinstance(value, str) else complex(value)
        except (TypeError, ValueError):
            raise self.error(key, f"cannot parse {value!r} as a complex number")

    def angle(self, key: str, default: float) -> float:
        """Angle in radians from `<key>_deg` or `<key>_rad`; the bare key is rejected."""
        if key in self.data:
            raise self.error(key, "angle keys need an explicit unit: use "
                                  f"'{key}_deg' or '{key}_rad'")
        deg, rad = f"{key}_deg", f"{key}_rad"
        if deg in self.data and rad in self.data:
            raise self.error(deg, f"both '{deg}' and '{rad}' are set")
        if deg in self.data:
            return math.radians(self.number(deg, None))
        if rad in self.data:
            return self.number(rad, None)
        return default

    def string(self, key: str, default: Optional[str]) -> Optional[str]:
        if key not in self.data:
            return default
        self.used.add(key)
        value = self.data[key]
        if not isinstance(value, str):
            raise self.error(key, f"expected a string, got {value!r}")
        return value

    def check_unknown(self) -> None:
        for key in self.data:
            if key not in self.used:
                raise self.error(key, f"unknown key in [{self.name}]")


def _section(data: dict, name: str, text: Optional[str]) -> _Section:
    value = data.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{name}] must be a table", key=name)
    return _Section(name, value, text)


def _wrap(section: _Section, key: str, build):
    try:
        return build()
    except ConfigError:
        raise
    except DomainError as e:
        raise section.error(key, str(e)) from e


def _parse_system(section: _Section) -> SystemConfig:
    d = DEFAULTS["system"]
    angles = {}
    for link in SYSTEM_ANGLES:
        parts = []
        for part in ("azimuth", "elevation"):
            key = f"{link}_{part}"
            parts.append(section.angle(key, d[key]))
        angles[link] = _wrap(section, link, lambda p=parts: Angles(*p))

    M = section.number("M", d["M"], int)
    N = section.number("N", d["N"], int)
    for key, value in (("M", M), ("N", N)):
        _wrap(section, key, lambda v=value: side_length(v))

    values = dict(
        M=M,
        N=N,
        alpha=section.complex_number("alpha", d["alpha"]),
        beta=section.complex_number("beta", d["beta"]),
        spacing_ratio=section.number("spacing_ratio", d["spacing_ratio"]),
        noise_power=section.number("noise_power", d["noise_power"]),
        **angles,
    )
    section.check_unknown()
    try:
        return SystemConfig(**values)
    except DomainError as e:
        raise section.error(str(e).split(" ", 1)[0], str(e)) from e


def _parse_impairments(section: _Section, base: dict) -> ImpairmentConfig:
    values = dict(
        eta=section.number("eta", base["eta"]),
        delta_psi=section.angle("delta_psi", base["delta_psi"]),
        sigma2=section.number("sigma2", base["sigma2"]),
        delta_theta_hat=section.angle("delta_theta_hat", base["delta_theta_hat"]),
    )
    section.check_unknown()
    try:
        return ImpairmentConfig(**values)
    except DomainError as e:
        key = str(e).split(" ", 1)[0]
        if key in IMPAIRMENT_ANGLES:
            key = f"{key}_deg" if section.has(f"{key}_deg") else f"{key}_rad"
        raise section.error(key, str(e)) from e


def _parse_power(section: _Section) -> PowerConfig:
    d = DEFAULTS["power"]
    values = dict(
        mu=section.number("mu", d["mu"]),
        p_static=section.number("p_static", d["p_static"]),
        bandwidth=section.number("bandwidth", d["bandwidth"]),
        p_static_ideal=section.number("p_static_ideal", d["p_static_ideal"]),
    )
    section.check_unknown()
    try:
        return PowerConfig(**values)
    except DomainError as e:
        raise section.error(str(e).split(" ", 1)[0], str(e)) from e


def _parse_sweep(section: _Section) -> Optional[SweepSpec]:
    if not section.data:
        return None
    for key in section.data:
        if key not in SWEEP_KEYS:
            raise section.error(key, "unknown key in [sweep]")
    if not section.has("variable"):
        raise section.error("variable", "missing required key")

    scenarios = section.data.get("scenarios", list(DEFAULT_SCENARIOS))
    values = section.data.get("values")
    if not isinstance(scenarios, list) or not all(isinstance(s, str) for s in scenarios):
        raise section.error("scenarios", "expected a list of scenario names")
    if values is not None and (not isinstance(values, list)
                               or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                          for v in values)):
        raise section.error("values", "expected a list of numbers")

    kwargs = dict(
        variable=section.string("variable", None),
        start=section.number("start", 0.0),
        stop=section.number("stop", 1.0),
        steps=section.number("steps", 2, int),
        scenarios=tuple(scenarios),
        metric=section.string("metric", "se"),
        spacing=section.string("spacing", "linear"),
        snr_reference=section.string("snr_reference", None),
        values=tuple(values) if values is not None else None,
        fixed_power_db=section.number("fixed_power_db", None),
        fixed_power=section.number("fixed_power", None),
    )
    try:
        return SweepSpec(**kwargs)
    except DomainError as e:
        message = str(e)
        key = next((k for k in ("snr_reference", "fixed_power", "scenarios", "metric",
                                "spacing", "variable", "steps", "start", "values")
                    if k in message), "variable")
        if "perfect square" in message or "positive integer" in message:
            key = "values" if values is not None else "start"
        raise section.error(key, message) from e


def config_from_mapping(
    data: dict,
    text: Optional[str] = None,
    source: Optional[str] = None,
) -> RunConfig:
    """
    Build a RunConfig from parsed TOML (or a manifest snapshot).

    Raises:
        ConfigError: naming section.key and, when known, the line number
    """
    known = {"system", "impairments", "power", "sweep", "profiles"}
    for name in data:
        if name not in known:
            raise ConfigError(f"unknown section [{name}]", key=name, line=_line_of_section(text, name))

    system = _parse_system(_section(data, "system", text))
    impairments = _parse_impairments(_section(data, "impairments", text), DEFAULTS["impairments"])
    power = _parse_power(_section(data, "power", text))
    sweep = _parse_sweep(_section(data, "sweep", text))

    profiles = {}
    raw_profiles = data.get("profiles", {})
    if not isinstance(raw_profiles, dict):
        raise ConfigError("[profiles] must contain named tables", key="profiles")
    base = {k: getattr(impairments, k) for k in DEFAULTS["impairments"]}
    for name, table in raw_profiles.items():
        if not isinstance(table, dict):
            raise ConfigError("profile must be a table", key=f"profiles.{name}")
        profiles[name] = _parse_impairments(_Section(f"profiles.{name}", table, text), base)

    return RunConfig(
        system=system,
        impairments=impairments,
        power=power,
        sweep=sweep,
        profiles=profiles,
        omitted_defaults=_omitted_defaults(data),
        source=source,
    )


def _omitted_defaults(data: dict) -> tuple[str, ...]:
    """Entries of ASSUMED_DEFAULTS the config file left at their defaults."""
    omitted = []
    for dotted in ASSUMED_DEFAULTS:
        section, key = dotted.split(".")
        table = data.get(section, {})
        if not any(k in table for k in (key, f"{key}_deg", f"{key}_rad")):
            omitted.append(dotted)
    return tuple(omitted)


def _line_of_section(text: Optional[str], name: str) -> Optional[int]:
    if not text:
        return None
    for number, line in enumerate(text.splitlines(), start=1):
        if re.match(rf"^\s*\[{re.escape(name)}[\].]", line):
            return number
    return None


def load_config(path: Optional[Path] = None) -> RunConfig:
    """
    Load a run config from a TOML file, or the defaults when path is None.

    Raises:
        ConfigError: on unreadable files, TOML syntax errors or invalid values
    """
    if path is None:
        return config_from_mapping({}, source=None)
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror or e}") from e
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        # message already carries "(at line X, column Y)"
        raise ConfigError(f"invalid TOML in {path}: {e}") from e
    logger.debug("Loaded config %s", path)
    return config_from_mapping(data, text=text, source=str(path))


def config_snapshot(run: RunConfig) -> dict:
    """
    Fully resolved config as TOML-compatible data, angles in radians.

    config_from_mapping(config_snapshot(run)) rebuilds an equal RunConfig.
    """
    s = run.system
    system = {
        "M": s.M,
        "N": s.N,
        "alpha": repr(complex(s.alpha)),
        "beta": repr(complex(s.beta)),
        "spacing_ratio": s.spacing_ratio,
        "noise_power": s.noise_power,
    }
    for link in SYSTEM_ANGLES:
        angles = getattr(s, link)
        system[f"{link}_azimuth_rad"] = angles.azimuth
        system[f"{link}_elevation_rad"] = angles.elevation

    def impairment_table(imp: ImpairmentConfig) -> dict:
        return {
            "eta": imp.eta,
            "delta_psi_rad": imp.delta_psi,
            "sigma2": imp.sigma2,
            "delta_theta_hat_rad": imp.delta_theta_hat,
        }

    power = {"mu": run.power.mu, "p_static": run.power.p_static, "bandwidth": run.power.bandwidth}
    if run.power.p_static_ideal is not None:
        power["p_static_ideal"] = run.power.p_static_ideal

    snapshot = {
        "system": system,
        "impairments": impairment_table(run.impairments),
        "power": power,
    }
    if run.sweep is not None:
        sweep = {
            "variable": run.sweep.variable,
            "start": run.sweep.start,
            "stop": run.sweep.stop,
            "steps": run.sweep.steps,
            "scenarios": list(run.sweep.scenarios),
            "metric": run.sweep.metric,
            "spacing": run.sweep.spacing,
        }
        for key in ("snr_reference", "fixed_power_db", "fixed_power"):
            if getattr(run.sweep, key) is not None:
                sweep[key] = getattr(run.sweep, key)
        if run.sweep.values is not None:
            sweep["values"] = list(run.sweep.values)
        snapshot["sweep"] = sweep
    if run.profiles:
        snapshot["profiles"] = {name: impairment_table(imp) for name, imp in run.profiles.items()}
    return snapshot
