"""Experiment configuration: one JSON document per run."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["ConfigError", "SUBCOMMANDS", "PARAM_DEFAULTS", "ExperimentConfig", "load_config"]

FIELDS = ("subcommand", "target", "params", "out_dir", "seed")


class ConfigError(ValueError):
    """Invalid configuration; the CLI reports it as a usage error."""


PARAM_DEFAULTS: dict[str, dict] = {
    "verify-minimal": {
        "samples": 1000, "tol": 1e-10, "msq_tol": 1e-8, "mesh_n": 64,
        "levels": [2, 3, 4], "min_order": 1.7, "patch": {},
    },
    "mcf": {
        "level": 3, "dt": 1e-4, "t_end": 0.1, "scheme": "explicit", "radius": 1.0,
        "tol": 1e-3, "mesh_n": 24, "snapshot_every": 0, "patch": {},
    },
    "ricci": {"theta0": None, "dt": 0.01, "t_end": 0.1, "normalized": False, "tol": 1e-4, "fixed_tol": 1e-6},
    "spectrum": {
        "n": 40, "a": 0.5, "k": 6, "lo": 0.5, "hi": 2.0, "side": 1.0, "mode_cutoff": 1,
        "rel_tol": 0.01, "transition_tol": 0.02,
    },
    "monotonicity": {"radii": None, "point": None, "center": None, "resolution": 6, "patch": {}, "chart": {}},
    "regularity": {"r": None, "point": None, "center": None, "resolution": 6, "rel_tol": 0.01, "patch": {}, "chart": {}},
    "decompose": {
        "r": None, "n0": 4.0, "eps": 1.0, "V0": 1.0, "samples": None, "resolution": 6,
        "patch": {}, "chart": {},
    },
    "einstein-check": {
        "points": None, "h": None, "tol": None, "einstein_hilbert": False, "scale": 2.0, "order": None, "chart": {},
    },
    "veronese": {"samples": 1000, "fit_samples": 50, "rank_samples": 1000},
    "report": {},
}
SUBCOMMANDS = tuple(PARAM_DEFAULTS)


def _plain(x):
    """JSON-normal form: tuples become lists, numpy scalars become Python numbers."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if hasattr(x, "tolist"):
        return x.tolist()
    return x


@dataclass(frozen=True)
class ExperimentConfig:
    subcommand: str
    target: str = ""
    params: dict = field(default_factory=dict)
    out_dir: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.subcommand not in PARAM_DEFAULTS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}; known: {', '.join(SUBCOMMANDS)}")
        if not isinstance(self.params, dict):
            raise ConfigError("params must be a mapping")
        unknown = sorted(set(self.params) - set(PARAM_DEFAULTS[self.subcommand]))
        if unknown:
            raise ConfigError(f"unknown parameters for {self.subcommand}: {', '.join(unknown)}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "params", _plain(self.params))

    def resolved(self) -> dict:
        """Parameters with defaults filled in."""
        return {**PARAM_DEFAULTS[self.subcommand], **self.params}

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in FIELDS}

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("configuration must be a JSON object")
        unknown = sorted(set(d) - set(FIELDS))
        if unknown:
            raise ConfigError(f"unknown configuration fields: {', '.join(unknown)}")
        if "subcommand" not in d:
            raise ConfigError("configuration lacks 'subcommand'")
        return cls(**d)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"configuration is not valid JSON: {exc}") from None
        return cls.from_dict(d)

    def content_hash(self) -> str:
        """Hash of everything that determines results (the output directory excluded)."""
        d = self.to_dict()
        d.pop("out_dir")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc}") from None
    return ExperimentConfig.from_text(text)
