"""Runtime configuration: TOML file plus GRIDPULSE_* environment overrides."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ENV_PREFIX = "GRIDPULSE_"


@dataclass(frozen=True)
class ApiConfig:
    """Operational constants: poll cadence, step duration, cluster count,
    candidate sample count, RNG seed, and data file locations."""

    listen: str = "127.0.0.1:8000"
    poll_interval_minutes: int = 30
    step_hours: int = 2
    clusters: int = 11
    samples: int = 100_000
    seed: int = 0
    data_dir: Path = field(default_factory=lambda: Path("data"))

    def __post_init__(self) -> None:
        if self.poll_interval_minutes <= 0:
            raise ValueError("poll_interval_minutes must be positive")
        if self.step_hours <= 0:
            raise ValueError("step_hours must be positive")
        if self.clusters < 1:
            raise ValueError("clusters must be >= 1")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")

    # conventional file locations under data_dir
    @property
    def db_path(self) -> Path:
        return self.data_dir / "outages.sqlite"

    @property
    def zip_table_path(self) -> Path:
        return self.data_dir / "zips.csv"

    @property
    def features_path(self) -> Path:
        return self.data_dir / "features.csv"

    @property
    def demographics_path(self) -> Path:
        return self.data_dir / "demographics.csv"

    @property
    def geocoder_path(self) -> Path:
        return self.data_dir / "geocoder.csv"

    @property
    def boundaries_path(self) -> Path:
        return self.data_dir / "boundaries.geojson"

    @property
    def rankings_path(self) -> Path:
        return self.data_dir / "rankings.json"

    @property
    def clusters_path(self) -> Path:
        return self.data_dir / "clusters.json"

    @property
    def transition_path(self) -> Path:
        return self.data_dir / "transition.json"

    @property
    def prediction_path(self) -> Path:
        return self.data_dir / "prediction.json"


_INT_KEYS = {"poll_interval_minutes", "step_hours", "clusters", "samples", "seed"}


def load_config(path: Optional[str | Path] = None, env: Optional[dict] = None) -> ApiConfig:
    """Build an ApiConfig from an optional TOML file and the environment.

    Environment variables GRIDPULSE_<KEY> (upper-cased field name) take
    precedence over file values, which take precedence over defaults.
    """
    values: dict = {}
    if path is not None:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
        for f in fields(ApiConfig):
            if f.name in doc:
                values[f.name] = doc[f.name]
    environ = env if env is not None else os.environ
    for f in fields(ApiConfig):
        key = ENV_PREFIX + f.name.upper()
        if key in environ:
            values[f.name] = environ[key]
    for key in list(values):
        if key in _INT_KEYS:
            values[key] = int(values[key])
        if key == "data_dir":
            values[key] = Path(values[key])
    return ApiConfig(**values)


def apply_overrides(config: ApiConfig, **overrides) -> ApiConfig:
    """Replace fields with non-None CLI flag values."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    if "data_dir" in updates:
        updates["data_dir"] = Path(updates["data_dir"])
    return replace(config, **updates) if updates else config
