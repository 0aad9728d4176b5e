"""Run configuration: defaults, YAML loading, angle parsing and content hashing."""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
from dataclasses import asdict, dataclass, fields

import numpy as np
import yaml

OUTPUT_DIR_ENV = "CORNERLAW_OUTPUT_DIR"

_ANGLE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?(?:e[+-]?\d+)?)(pi)?(?:/(\d+(?:\.\d*)?))?$")


class ConfigError(ValueError):
    pass


def parse_angle(text) -> float:
    """Parse ``"pi"``, ``"-pi/2"``, ``"0.15pi"``, ``"3*pi/4"`` or a plain number (radians)."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    s = str(text).strip().lower().replace("*", "").replace(" ", "")
    m = _ANGLE.match(s)
    if not s or not m:
        raise ConfigError(f"cannot parse angle {text!r}")
    coef, has_pi, denom = m.groups()
    if coef in ("", "+", "-"):
        if not has_pi:
            raise ConfigError(f"cannot parse angle {text!r}")
        coef += "1"
    value = float(coef) * (math.pi if has_pi else 1.0)
    if denom:
        if float(denom) == 0:
            raise ConfigError(f"zero denominator in angle {text!r}")
        value /= float(denom)
    if not math.isfinite(value):
        raise ConfigError(f"angle {text!r} is not finite")
    return value


def parse_grid(text) -> tuple[float, float, int]:
    """Parse ``"start:stop:count"`` (inclusive linspace) into its parts."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must look like start:stop:count, got {text!r}")
    lo, hi = parse_angle(parts[0]), parse_angle(parts[1])
    try:
        n = int(parts[2])
    except ValueError:
        raise ConfigError(f"grid count must be an integer, got {parts[2]!r}") from None
    if n < 1:
        raise ConfigError("grid count must be positive")
    return lo, hi, n


@dataclass(frozen=True)
class RunConfig:
    r_list: tuple[float, ...] = (4.0, 8.0, 16.0, 32.0)
    theta_min: float = 0.02 * math.pi
    theta_max: float = 0.99 * math.pi
    theta_steps: int = 60
    phi_steps: int = 100
    apex_steps: int = 10
    fit_theta_min: float = 0.15 * math.pi
    fit_theta_max: float = 0.99 * math.pi
    quad_tol: float = 1e-8
    rank_tol: float = 1e-10
    seed: int = 0
    output_dir: str = "results"

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        try:
            r_list = self.r_list
            if isinstance(r_list, (int, float, str)):
                r_list = [r_list]
            set_("r_list", tuple(float(r) for r in r_list))
            for key in ("theta_min", "theta_max", "fit_theta_min", "fit_theta_max"):
                set_(key, parse_angle(getattr(self, key)))
            for key in ("theta_steps", "phi_steps", "apex_steps", "seed"):
                value = getattr(self, key)
                if isinstance(value, bool) or int(value) != float(value):
                    raise ConfigError(f"{key} must be an integer, got {value!r}")
                set_(key, int(value))
            set_("quad_tol", float(self.quad_tol))
            set_("rank_tol", float(self.rank_tol))
            set_("output_dir", str(self.output_dir))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if any(not r > 1 for r in self.r_list) or not self.r_list:
            raise ConfigError("r_list needs radii greater than 1")
        if not 0 <= self.theta_min <= self.theta_max <= math.pi:
            raise ConfigError("need 0 <= theta_min <= theta_max <= pi")
        if not self.fit_theta_min < self.fit_theta_max:
            raise ConfigError("need fit_theta_min < fit_theta_max")
        if min(self.theta_steps, self.phi_steps, self.apex_steps) < 1:
            raise ConfigError("grid sizes must be positive")
        if not (self.quad_tol > 0 and self.rank_tol > 0):
            raise ConfigError("tolerances must be positive")

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_mapping(cls, data: dict | None, **overrides) -> "RunConfig":
        merged = dict(data or {})
        merged.update({k: v for k, v in overrides.items() if v is not None})
        unknown = sorted(set(merged) - set(cls.keys()))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}; "
                              f"allowed: {', '.join(cls.keys())}")
        return cls(**merged)

    @classmethod
    def load(cls, path=None, **overrides) -> "RunConfig":
        data = {}
        if path is not None:
            with open(path) as fh:
                data = yaml.safe_load(fh) or {}
            if not isinstance(data, dict):
                raise ConfigError(f"{path}: expected a key-value mapping")
        if overrides.get("output_dir") is None and os.environ.get(OUTPUT_DIR_ENV):
            overrides["output_dir"] = os.environ[OUTPUT_DIR_ENV]
        return cls.from_mapping(data, **overrides)

    @property
    def theta_grid(self) -> list[float]:
        return [float(t) for t in np.linspace(self.theta_min, self.theta_max, self.theta_steps)]

    @property
    def fit_window(self) -> tuple[float, float]:
        return self.fit_theta_min, self.fit_theta_max

    def hashable(self) -> dict:
        data = asdict(self)
        data.pop("output_dir")
        data["r_list"] = list(data["r_list"])
        return data


def content_hash(command: str, payload: dict) -> str:
    """Stable short hash of a command and its resolved inputs."""
    from . import __version__

    blob = json.dumps({"command": command, "version": __version__, **payload},
                      sort_keys=True, separators=(",", ":"), default=repr)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]
