"""Run configuration: plain-text `key = value` files plus CLI overrides.

The file format is a flat list of assignments under [section] headers:

    [model]
    demand = reciprocal
    w = 1.0
    k = 0.01
    c = 50.0

    [simulation]
    tau = 3.2
    step = 0.01
    t_end = 5000
    history_p0 = 0.025

Unknown sections or keys are rejected so typos fail loudly. Every JSON
report embeds the resolved configuration under the same section/key names,
so a report can be turned back into a config file mechanically.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

from .demand import make_demand
from .errors import ValidationError
from .model import ModelConfig

SEED_DIR_ENV = "HOPFDUAL_SEED_DIR"

_BOOL_WORDS = {
    "true": True, "yes": True, "on": True, "1": True,
    "false": False, "no": False, "off": False, "0": False,
}

# section -> key -> parser
_SCHEMA: dict[str, dict[str, str]] = {
    "model": {"demand": "str", "w": "float", "alpha": "float", "k": "float", "c": "float"},
    "simulation": {
        "tau": "float",
        "tau_list": "floatlist",
        "step": "float",
        "t_end": "float",
        "history_p0": "float",
    },
    "analysis": {"transient_fraction": "float", "n_critical": "int"},
    "output": {"out": "str", "json": "bool", "waveform": "str", "periods": "int"},
}


@dataclass
class RunConfig:
    """Fully resolved run settings with package defaults filled in."""

    demand_family: str = "reciprocal"
    w: float = 1.0
    alpha: float | None = None
    k: float = 0.01
    c: float = 50.0
    tau: float | None = None
    tau_list: list[float] | None = None
    step: float | None = None
    t_end: float = 5000.0
    history_p0: float | None = None
    transient_fraction: float = 0.5
    n_critical: int = 3
    out: str | None = None
    json_output: bool = False
    waveform: str | None = None
    periods: int = 5
    source: str = field(default="defaults", compare=False)

    def validate(self) -> None:
        def positive(name: str, value, allow_zero: bool = False) -> None:
            if value is None:
                return
            ok = math.isfinite(value) and (value >= 0 if allow_zero else value > 0)
            if not ok:
                raise ValidationError(f"{name} must be positive, got {value!r}")

        if self.demand_family not in ("reciprocal", "powerlaw"):
            raise ValidationError(
                f"unknown demand family {self.demand_family!r}; "
                "expected reciprocal or powerlaw"
            )
        positive("w", self.w)
        positive("alpha", self.alpha)
        positive("k", self.k)
        positive("c", self.c)
        positive("tau", self.tau, allow_zero=True)
        if self.tau_list is not None:
            if not self.tau_list:
                raise ValidationError("tau_list must be nonempty")
            for t in self.tau_list:
                positive("tau_list entry", t, allow_zero=True)
        positive("step", self.step)
        positive("t_end", self.t_end)
        positive("history_p0", self.history_p0)
        if not 0.0 <= self.transient_fraction < 1.0:
            raise ValidationError(
                f"transient_fraction must be in [0, 1), got {self.transient_fraction!r}"
            )
        if self.n_critical < 1:
            raise ValidationError(f"n_critical must be >= 1, got {self.n_critical!r}")
        if self.periods < 1:
            raise ValidationError(f"periods must be >= 1, got {self.periods!r}")

    def build_model(self, tau: float | None = None) -> ModelConfig:
        """ModelConfig at the given delay (0 when analysis needs no delay)."""
        use_tau = tau if tau is not None else (self.tau if self.tau is not None else 0.0)
        demand = make_demand(self.demand_family, w=self.w, alpha=self.alpha)
        return ModelConfig(k=self.k, c=self.c, tau=use_tau, demand=demand)

    def to_sections(self) -> dict[str, dict]:
        """Resolved settings as nested file-format sections (None omitted)."""
        model: dict = {"demand": self.demand_family, "w": self.w, "k": self.k, "c": self.c}
        if self.alpha is not None:
            model["alpha"] = self.alpha
        sim: dict = {"t_end": self.t_end}
        if self.tau is not None:
            sim["tau"] = self.tau
        if self.tau_list is not None:
            sim["tau_list"] = list(self.tau_list)
        if self.step is not None:
            sim["step"] = self.step
        if self.history_p0 is not None:
            sim["history_p0"] = self.history_p0
        analysis = {
            "transient_fraction": self.transient_fraction,
            "n_critical": self.n_critical,
        }
        output: dict = {"json": self.json_output, "periods": self.periods}
        if self.out is not None:
            output["out"] = self.out
        if self.waveform is not None:
            output["waveform"] = self.waveform
        return {"model": model, "simulation": sim, "analysis": analysis, "output": output}


def _parse_value(kind: str, raw: str, where: str):
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            word = raw.strip().lower()
            if word not in _BOOL_WORDS:
                raise ValueError(f"not a boolean: {raw!r}")
            return _BOOL_WORDS[word]
        if kind == "floatlist":
            parts = [p for p in (s.strip() for s in raw.split(",")) if p]
            if not parts:
                raise ValueError("empty list")
            return [float(p) for p in parts]
        return raw.strip()
    except ValueError as exc:
        raise ValidationError(f"bad value for {where}: {exc}") from None


def resolve_config_path(path: str) -> str:
    """Resolve a --config path, falling back to the seed directory.

    A relative path that does not exist from the current directory is
    retried under $HOPFDUAL_SEED_DIR when that variable is set.
    """
    if os.path.exists(path):
        return path
    seed = os.environ.get(SEED_DIR_ENV)
    if seed and not os.path.isabs(path):
        candidate = os.path.join(seed, path)
        if os.path.exists(candidate):
            return candidate
    raise ValidationError(f"config file not found: {path}")


def parse_config_file(path: str) -> dict[str, dict]:
    """Parse sections/keys/values from a config file, strictly."""
    resolved = resolve_config_path(path)
    sections: dict[str, dict] = {}
    current: str | None = None
    with open(resolved, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#") or text.startswith(";"):
                continue
            if text.startswith("[") and text.endswith("]"):
                current = text[1:-1].strip()
                if current not in _SCHEMA:
                    raise ValidationError(
                        f"{path}:{lineno}: unknown section [{current}]"
                    )
                sections.setdefault(current, {})
                continue
            if "=" not in text:
                raise ValidationError(f"{path}:{lineno}: expected `key = value`")
            if current is None:
                raise ValidationError(
                    f"{path}:{lineno}: assignment before any [section] header"
                )
            key, _, raw = text.partition("=")
            key = key.strip()
            if key not in _SCHEMA[current]:
                raise ValidationError(
                    f"{path}:{lineno}: unknown key {key!r} in section [{current}]"
                )
            if key in sections[current]:
                raise ValidationError(
                    f"{path}:{lineno}: duplicate key {key!r} in section [{current}]"
                )
            sections[current][key] = _parse_value(
                _SCHEMA[current][key], raw.strip(), f"[{current}] {key}"
            )
    return sections


_FIELD_BY_SECTION_KEY = {
    ("model", "demand"): "demand_family",
    ("model", "w"): "w",
    ("model", "alpha"): "alpha",
    ("model", "k"): "k",
    ("model", "c"): "c",
    ("simulation", "tau"): "tau",
    ("simulation", "tau_list"): "tau_list",
    ("simulation", "step"): "step",
    ("simulation", "t_end"): "t_end",
    ("simulation", "history_p0"): "history_p0",
    ("analysis", "transient_fraction"): "transient_fraction",
    ("analysis", "n_critical"): "n_critical",
    ("output", "out"): "out",
    ("output", "json"): "json_output",
    ("output", "waveform"): "waveform",
    ("output", "periods"): "periods",
}


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from defaults, an optional file, and CLI overrides."""
    cfg = RunConfig()
    if path is not None:
        cfg.source = path
        for section, entries in parse_config_file(path).items():
            for key, value in entries.items():
                setattr(cfg, _FIELD_BY_SECTION_KEY[(section, key)], value)
    for name, value in (overrides or {}).items():
        if value is not None and value is not False:
            setattr(cfg, name, value)
    cfg.validate()
    return cfg


def write_config_file(sections: dict[str, dict], path: str) -> None:
    """Write nested sections back to the `key = value` file format."""
    lines = []
    for section, entries in sections.items():
        lines.append(f"[{section}]")
        for key, value in entries.items():
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, list):
                text = ", ".join(repr(float(v)) for v in value)
            else:
                text = repr(value) if isinstance(value, float) else str(value)
            lines.append(f"{key} = {text}")
        lines.append("")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
