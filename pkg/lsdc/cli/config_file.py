"""Line-oriented key=value configuration files."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from lsdc.composition import BetaParams
from lsdc.errors import ConfigError
from lsdc.pairwise import SimilarityConfig
from lsdc.training import RunConfig

logger = logging.getLogger(__name__)

PRESET_SUFFIX = ".cfg"
_TRUE = ("true", "yes", "on", "1")
_FALSE = ("false", "no", "off", "0")


def _parse_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(part) for part in raw.replace(" ", "").split(",") if part)


def _optional(parse: Callable[[str], Any]) -> Callable[[str], Any]:
    def parse_optional(raw: str) -> Any:
        return None if raw.lower() in ("", "none", "auto") else parse(raw)

    return parse_optional


# dotted key -> (section, field name, parser)
KEY_TABLE: dict[str, tuple[str, str, Callable[[str], Any]]] = {
    "similarity.kind": ("similarity", "kind", str),
    "similarity.tau": ("similarity", "tau", float),
    "similarity.temperature": ("similarity", "temperature", float),
    "similarity.k": ("similarity", "k", int),
    "similarity.space": ("similarity", "space", str),
    "beta.alpha": ("beta", "alpha", float),
    "beta.beta": ("beta", "beta", float),
    "k_clusters": ("run", "k_clusters", int),
    "epochs": ("run", "epochs", int),
    "batch_size": ("run", "batch_size", int),
    "optimizer": ("run", "optimizer", str),
    "lr_init": ("run", "lr_init", float),
    "lr_steps": ("run", "lr_steps", _parse_int_list),
    "lr_decay_factor": ("run", "lr_decay_factor", float),
    "momentum": ("run", "momentum", float),
    "weight_decay": ("run", "weight_decay", _optional(float)),
    "lambda": ("run", "lambda_", float),
    "ramp_len_epochs": ("run", "ramp_len_epochs", int),
    "composition": ("run", "composition", str),
    "augment.mode": ("run", "augment_mode", str),
    "augment.strength": ("run", "augment_strength", float),
    "mse_enabled": ("run", "mse_enabled", _parse_bool),
    "head.kind": ("run", "head_kind", str),
    "head.hidden": ("run", "head_hidden", int),
    "backbone.hidden": ("run", "backbone_hidden", int),
    "backbone.out_dim": ("run", "backbone_out_dim", int),
    "dtype": ("run", "dtype", str),
    "distance_backend": ("run", "distance_backend", str),
    "threads": ("run", "threads", _optional(int)),
    "seed": ("run", "seed", int),
    "data.source": ("data", "source", str),
    "data.path": ("data", "path", str),
    "data.format": ("data", "format", str),
    "data.labels": ("data", "labels", _parse_bool),
    "data.n": ("data", "n", int),
    "data.noise": ("data", "noise", float),
    "data.centers": ("data", "centers", int),
    "data.radius": ("data", "radius", float),
    "data.sigma": ("data", "sigma", float),
    "output.report": ("output", "report", str),
    "output.checkpoint": ("output", "checkpoint", str),
    "output.confusion": ("output", "confusion", str),
}

DATA_SOURCES: tuple[str, ...] = ("file", "moons", "blobs")


@dataclass(frozen=True)
class DataSource:
    """Where the training features come from.

    source "file" reads path in format (with labels in the last csv column when
    labels is set); "moons" and "blobs" generate toy data with the seed of the
    run.
    """

    source: str = "moons"
    path: str | None = None
    format: str = "binary"
    labels: bool = False
    n: int = 1000
    noise: float = 0.05
    centers: int = 4
    radius: float = 3.0
    sigma: float = 0.15

    def __post_init__(self):
        """Validate the source."""
        if self.source not in DATA_SOURCES:
            raise ConfigError(f"unknown data source {self.source!r}.", "data.source")
        if self.source == "file" and not self.path:
            raise ConfigError("data.source=file requires data.path.", "data.path")


@dataclass(frozen=True)
class OutputPaths:
    """Files written by a command, None to skip."""

    report: str | None = None
    checkpoint: str | None = None
    confusion: str | None = None


def parse_assignment(line: str, origin: str) -> tuple[str, str]:
    """Split one key=value assignment, rejecting unknown keys."""
    if "=" not in line:
        raise ConfigError(f"{origin}: expected key=value, got {line!r}.")
    key, raw = (part.strip() for part in line.split("=", 1))
    if key not in KEY_TABLE:
        raise ConfigError(f"{origin}: unknown key {key!r}.", key)
    return key, raw


class ConfigFile:
    """A parsed configuration: the raw assignments and the objects built from them.

    Args:
    ----
        values (dict[str, str]): Raw assignments keyed by dotted key.

    Raises:
    ------
        ConfigError: For an unknown key, a value that does not parse, or a
            configuration that fails validation. The key is attached.

    """

    def __init__(self, values: dict[str, str]):
        """Initialise the ConfigFile."""
        self._values = dict(values)
        sections: dict[str, dict[str, Any]] = {
            "similarity": {},
            "beta": {},
            "run": {},
            "data": {},
            "output": {},
        }
        for key, raw in self._values.items():
            if key not in KEY_TABLE:
                raise ConfigError(f"unknown key {key!r}.", key)
            section, name, parse = KEY_TABLE[key]
            try:
                sections[section][name] = parse(raw)
            except ValueError as exc:
                raise ConfigError(f"{key}: cannot parse {raw!r} ({exc}).", key) from exc

        run = sections["run"]
        if sections["similarity"]:
            run["similarity"] = SimilarityConfig(**sections["similarity"])
        if sections["beta"]:
            run["beta"] = BetaParams(**sections["beta"])
        run["report_path"] = sections["output"].get("report")
        self._run = RunConfig(**run)
        self._data = DataSource(**sections["data"])
        self._outputs = OutputPaths(**sections["output"])

    @classmethod
    def from_text(cls, text: str, origin: str = "<config>") -> ConfigFile:
        """Parse config text; '#' starts a comment and blank lines are ignored."""
        values: dict[str, str] = {}
        for number, line in enumerate(text.splitlines(), start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            key, raw = parse_assignment(stripped, f"{origin}:{number}")
            values[key] = raw
        return cls(values)

    @classmethod
    def from_path(cls, path: str | Path) -> ConfigFile:
        """Read a config file, falling back to a shipped preset of that name."""
        path = Path(path)
        if path.exists():
            return cls.from_text(path.read_text(encoding="utf-8"), str(path))
        name = path.name if path.suffix == PRESET_SUFFIX else path.name + PRESET_SUFFIX
        preset = resources.files("lsdc.presets").joinpath(name)
        if not preset.is_file():
            raise ConfigError(f"no config file or preset named {str(path)!r}.", "config")
        logger.info("Using preset %s", name)
        return cls.from_text(preset.read_text(encoding="utf-8"), f"preset:{name}")

    def with_overrides(self, overrides: Iterable[str]) -> ConfigFile:
        """Return a new config with KEY=VALUE overrides applied and re-validated."""
        values = dict(self._values)
        for override in overrides:
            key, raw = parse_assignment(override, "--set")
            values[key] = raw
        return ConfigFile(values)

    @property
    def values(self) -> dict[str, str]:
        """Return the raw assignments."""
        return dict(self._values)

    @property
    def run_config(self) -> RunConfig:
        """Return the validated run configuration."""
        return self._run

    @property
    def data(self) -> DataSource:
        """Return the data source."""
        return self._data

    @property
    def outputs(self) -> OutputPaths:
        """Return the output paths."""
        return self._outputs


def preset_names() -> list[str]:
    """Return the names of the shipped presets."""
    return sorted(
        entry.name.removesuffix(PRESET_SUFFIX)
        for entry in resources.files("lsdc.presets").iterdir()
        if entry.name.endswith(PRESET_SUFFIX)
    )
