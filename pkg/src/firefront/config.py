"""Run configuration: schema-validated sections per pipeline stage.

A run config is a JSON file with one section per subcommand plus global keys
(``seed``, ``out_dir``). Unknown keys anywhere are rejected before any work
happens. Command-line flags override file values, which override defaults;
the ``FIREFRONT_OUT`` environment variable supplies the default output root.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from firefront.cwgan.networks import CriticConfig, GeneratorConfig
from firefront.cwgan.training import TrainConfig
from firefront.dataset import DatasetConfig
from firefront.observe import ObsParams
from firefront.spread import FireRecipe


class ConfigError(ValueError):
    pass


_NESTED: dict[type, dict[str, type]] = {
    DatasetConfig: {"recipe": FireRecipe, "obs": ObsParams},
}


def validate_keys(cls, data: dict, where: str = "") -> None:
    """Reject unknown keys (recursively for nested config dataclasses)."""
    if not isinstance(data, dict):
        raise ConfigError(f"{where or cls.__name__}: expected a mapping, got {type(data).__name__}")
    fields = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - fields
    if unknown:
        raise ConfigError(f"{where or cls.__name__}: unknown keys {sorted(unknown)}")
    for name, sub_cls in _NESTED.get(cls, {}).items():
        if name in data and isinstance(data[name], dict):
            validate_keys(sub_cls, data[name], f"{where}.{name}" if where else name)


def build_section(cls, data: dict, where: str = ""):
    """Instantiate a config dataclass from a mapping, rejecting unknown keys."""
    validate_keys(cls, data, where)
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    nested = _NESTED.get(cls, {})
    for name, value in data.items():
        if name in nested and isinstance(value, dict):
            value = build_section(nested[name], value, f"{where}.{name}" if where else name)
        else:
            default = _field_default(fields[name])
            if isinstance(default, tuple) and isinstance(value, list):
                value = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        kwargs[name] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where or cls.__name__}: {exc}") from exc


def _field_default(f: dataclasses.Field):
    if f.default is not dataclasses.MISSING:
        return f.default
    if f.default_factory is not dataclasses.MISSING:  # type: ignore[misc]
        return f.default_factory()  # type: ignore[misc]
    return None


@dataclass
class InferSection:
    k: int = 500
    seed: int = 0
    batch_size: int = 64
    contour_interval_hours: float = 4.0
    keep_samples: bool = False


@dataclass
class IngestSection:
    rows: int = 512
    cell_size: float = 25.0
    window_hours: float = 1.0
    max_window_hours: float = 48.0


@dataclass
class EvalSection:
    ref_time_hours: float = 24.0


@dataclass
class AblateSection:
    k: int = 100
    max_tuples: int = 200
    seed: int = 0
    bins: int = 193


_SECTIONS = {
    "synth": DatasetConfig,
    "generator": GeneratorConfig,
    "critic": CriticConfig,
    "train": TrainConfig,
    "infer": InferSection,
    "ingest": IngestSection,
    "evaluate": EvalSection,
    "ablate": AblateSection,
}

_GLOBAL_KEYS = {"seed", "out_dir"}

#: Sections whose own ``seed`` follows the global seed unless set explicitly.
_SEEDED = ("synth", "train", "infer", "ablate")


@dataclass
class RunConfig:
    seed: int = 0
    out_dir: str = ""
    data: dict = field(default_factory=dict)
    explicit: dict = field(default_factory=dict)
    sections: dict = field(default_factory=dict)

    @staticmethod
    def load(config_path=None, overrides: dict | None = None) -> "RunConfig":
        """Merge defaults <- config file <- flag overrides.

        ``overrides`` maps section names to partial dicts (plus optional
        ``seed``/``out_dir`` top-level entries); None values are ignored.
        Every present key is schema-checked up front; sections instantiate
        on first access so commands only need their own sections populated.
        """
        raw: dict = {}
        if config_path is not None:
            try:
                raw = json.loads(Path(config_path).read_text())
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{config_path}: invalid JSON ({exc})") from exc
        unknown = set(raw) - _GLOBAL_KEYS - set(_SECTIONS)
        if unknown:
            raise ConfigError(f"unknown top-level keys {sorted(unknown)}")

        merged: dict = {k: dict(v) if isinstance(v, dict) else v for k, v in raw.items()}
        for key, value in (overrides or {}).items():
            if value is None:
                continue
            if key in _GLOBAL_KEYS:
                merged[key] = value
            elif key in _SECTIONS:
                section = merged.setdefault(key, {})
                section.update({k: v for k, v in value.items() if v is not None})
            else:
                raise ConfigError(f"unknown config section {key!r}")

        seed = int(merged.get("seed", 0))
        out_dir = str(merged.get("out_dir") or os.environ.get("FIREFRONT_OUT", "."))
        cfg = RunConfig(seed=seed, out_dir=out_dir)
        for name, cls in _SECTIONS.items():
            data = merged.get(name, {})
            validate_keys(cls, data, name)
            cfg.explicit[name] = set(data)
            if name in _SEEDED and "seed" not in data:
                data = dict(data, seed=seed)
            cfg.data[name] = data
        return cfg

    def __getitem__(self, name: str):
        if name not in self.sections:
            self.sections[name] = build_section(_SECTIONS[name], self.data[name], name)
        return self.sections[name]

    def out_path(self, *parts) -> Path:
        return Path(self.out_dir).joinpath(*parts)
