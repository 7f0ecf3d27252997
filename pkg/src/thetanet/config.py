"""Experiment configuration: strict INI files that round-trip losslessly.

Sections mirror the library layout ([run], [p_in], [p_out], [heterogeneity],
[params], [grid]); unknown sections or keys are rejected outright so a typo
cannot silently fall back to a default. The serialized text is hashed into
every output manifest.
"""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass, field

from .errors import ConfigError

MODELS = ("theta-syn", "theta-gap", "ml-syn", "ml-gap", "mf-syn", "mf-gap",
          "continuation")

SECTION_KEYS = {
    "run": {"recipe", "model", "seed", "out", "paper_scale", "threads"},
    "p_in": {"kind", "mean", "sigma", "alpha", "lo", "hi"},
    "p_out": {"kind", "mean", "sigma", "alpha", "lo", "hi"},
    "heterogeneity": {"kind", "center", "scale"},
    "params": {
        "eta0", "delta", "K", "tau", "g", "eps", "eps_reg", "I0",
        "sigma", "alpha", "n", "t_end", "dt", "count", "mean_degree",
        "record_every", "t_per_value", "stats_window", "step",
        "param", "p_start", "p_min", "p_max", "direction",
        "ds0", "ds_min", "ds_max", "lo", "hi", "tol", "settle",
    },
    "grid": {"param1", "range1", "param2", "range2"},
}

_INT_KEYS = {"seed", "threads", "n", "count", "record_every", "direction"}
_BOOL_KEYS = {"paper_scale"}
_STR_KEYS = {"recipe", "model", "out", "kind", "param", "param1", "param2",
             "range1", "range2"}


def _parse_value(section: str, key: str, raw: str):
    if key in _BOOL_KEYS:
        low = raw.strip().lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"[{section}] {key}: expected a boolean, got {raw!r}")
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: expected an integer, got {raw!r}") from None
    if key in _STR_KEYS:
        return raw.strip()
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {raw!r}") from None


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class ExperimentConfig:
    """Parsed configuration; `sections` maps section -> {key: typed value}."""

    sections: dict = field(default_factory=dict)

    def __post_init__(self):
        for section, keys in self.sections.items():
            if section not in SECTION_KEYS:
                raise ConfigError(f"unknown config section [{section}]")
            for key in keys:
                if key not in SECTION_KEYS[section]:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
        model = self.get("run", "model")
        if model is not None and model not in MODELS:
            raise ConfigError(f"unknown model {model!r}; choose from {MODELS}")

    # --- access ---------------------------------------------------------

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def require(self, section: str, key: str):
        value = self.get(section, key)
        if value is None:
            raise ConfigError(f"missing required key {key!r} in section [{section}]")
        return value

    @property
    def params(self) -> dict:
        return dict(self.sections.get("params", {}))

    def set(self, section: str, key: str, value) -> None:
        if section not in SECTION_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        if key not in SECTION_KEYS[section]:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")
        if isinstance(value, str):
            value = _parse_value(section, key, value)
        self.sections.setdefault(section, {})[key] = value

    def override(self, spec: str) -> None:
        """Apply a `[section.]key=value` override; bare keys go to [params]."""
        if "=" not in spec:
            raise ConfigError(f"override {spec!r} is not of the form key=value")
        key, _, raw = spec.partition("=")
        key = key.strip()
        section = "params"
        if "." in key:
            section, _, key = key.partition(".")
        self.set(section, key, raw.strip())

    def degree_distribution(self, section: str):
        from .distributions import DegreeDistribution
        keys = self.sections.get(section)
        if not keys:
            return None
        try:
            return DegreeDistribution.from_keys(keys)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"[{section}]: {exc}") from None

    def heterogeneity_law(self):
        from .distributions import HeterogeneityLaw
        keys = self.sections.get("heterogeneity")
        if not keys:
            return None
        try:
            return HeterogeneityLaw.from_keys(keys)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"[heterogeneity]: {exc}") from None

    # --- serialization --------------------------------------------------

    def to_ini(self) -> str:
        out = io.StringIO()
        for section in SECTION_KEYS:
            if section not in self.sections or not self.sections[section]:
                continue
            out.write(f"[{section}]\n")
            for key in sorted(self.sections[section]):
                out.write(f"{key} = {_format_value(self.sections[section][key])}\n")
            out.write("\n")
        return out.getvalue()

    @staticmethod
    def from_ini(text: str) -> "ExperimentConfig":
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str  # keys are case-sensitive (K vs k)
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}") from None
        sections: dict = {}
        for section in parser.sections():
            if section not in SECTION_KEYS:
                raise ConfigError(f"unknown config section [{section}]")
            sections[section] = {}
            for key, raw in parser.items(section):
                if key not in SECTION_KEYS[section]:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                sections[section][key] = _parse_value(section, key, raw)
        return ExperimentConfig(sections)

    @staticmethod
    def from_file(path) -> "ExperimentConfig":
        try:
            with open(path, encoding="ascii") as fh:
                return ExperimentConfig.from_ini(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None

    def hash(self) -> str:
        return hashlib.sha256(self.to_ini().encode("ascii")).hexdigest()

    def copy(self) -> "ExperimentConfig":
        return ExperimentConfig({s: dict(kv) for s, kv in self.sections.items()})


def parse_range(text: str):
    """Parse a `lo:hi:count` grid axis into an inclusive linspace."""
    import numpy as np

    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range {text!r} is not of the form lo:hi:count")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"range {text!r} has non-numeric parts") from None
    if count < 1:
        raise ConfigError("range count must be at least 1")
    return np.linspace(lo, hi, count)
