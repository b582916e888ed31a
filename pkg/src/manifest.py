"""
Run manifests.

Every output file gets a JSON manifest holding the resolved config, master
seed, trial count and tool version, so the run can be replayed bit-exactly.
"""

import json
from dataclasses import dataclass, asdict, field
from datetime import datetime
from pathlib import Path
from typing import Optional

from . import __version__
from .config import RunConfig, config_from_mapping, config_snapshot
from .errors import ConfigError


@dataclass
class RunManifest:
    """Record of one run."""
    config: dict
    seed: int
    trials: int
    tool_version: str
    timestamp: str
    command: str = "sweep"
    output_file: str = ""
    assumed_defaults: list[str] = field(default_factory=list)
    config_source: Optional[str] = None

    @classmethod
    def for_run(cls, run: RunConfig, seed: int, trials: int, command: str, output_file: Path) -> "RunManifest":
        return cls(
            config=config_snapshot(run),
            seed=seed,
            trials=trials,
            tool_version=__version__,
            timestamp=datetime.now().isoformat(),
            command=command,
            output_file=str(output_file),
            assumed_defaults=list(run.omitted_defaults),
            config_source=run.source,
        )

    def to_run_config(self) -> RunConfig:
        """Rebuild the RunConfig this manifest was written for."""
        return config_from_mapping(self.config, source=self.config_source)


def manifest_path_for(output_file: Path) -> Path:
    """Manifest sits next to its output: results/fig1.csv -> results/fig1.manifest.json."""
    output_file = Path(output_file)
    return output_file.with_name(f"{output_file.stem}.manifest.json")


def save_manifest(manifest: RunManifest, path: Path) -> Path:
    """Save manifest to disk."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(asdict(manifest), f, indent=2)
    return path


def load_manifest(path: Path) -> RunManifest:
    """
    Load a manifest from disk.

    Raises:
        ConfigError: if the file is missing or malformed
    """
    path = Path(path)
    try:
        with open(path, 'r') as f:
            data = json.load(f)
        return RunManifest(**data)
    except OSError as e:
        raise ConfigError(f"cannot read manifest {path}: {e.strerror or e}") from e
    except (json.JSONDecodeError, TypeError) as e:
        raise ConfigError(f"malformed manifest {path}: {e}") from e
