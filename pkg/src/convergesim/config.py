"""Flat ``section.key = value`` experiment configuration.

``#`` starts a comment, lists are comma separated, unknown keys are errors.
Every key has a documented default except ``channel.alpha``.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, fields

from .metrics import SCHEMES
from .mobility import MobilityParams
from .model import (
    ChannelModel,
    FREQUENCY_PLANS,
    ScenarioConfig,
    ScenarioError,
    SimWindow,
    TierConfig,
    scenario_violations,
)


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _float(text):
    return float(text)


def _int(text):
    v = float(text)
    if v != int(v):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(v)


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _strs(text):
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _str(text):
    return text.strip()


def _cap(text):
    return 0 if text.strip() == "auto" else _int(text)


def _center(text):
    return None if text.strip() == "auto" else _floats(text)


# key -> (attribute, parser); defaults live on ExperimentConfig
KEYS = {
    "scenario.side_km": ("side_km", _float),
    "scenario.base_intensity": ("base_intensity", _float),
    "scenario.tier_powers_w": ("tier_powers_w", _floats),
    "scenario.tier_density_ratios": ("tier_density_ratios", _floats),
    "scenario.tier_bandwidths_hz": ("tier_bandwidths_hz", _floats),
    "scenario.tier_circuit_powers_w": ("tier_circuit_powers_w", _floats),
    "scenario.tier_tolerances_w": ("tier_tolerances_w", _floats),
    "scenario.center": ("center", _center),
    "scenario.frequency_plan": ("frequency_plan", _str),
    "scenario.sinr_ceiling": ("sinr_ceiling", _float),
    "channel.alpha": ("alphas", _floats),
    "channel.noise_w": ("noise_w", _float),
    "channel.d_min_km": ("d_min_km", _float),
    "users.lambda_multiples": ("lambda_multiples", _floats),
    "users.accessible": ("accessible", _str),
    "users.mobility_memory": ("mobility_memory", _float),
    "users.mobility_mean": ("mobility_mean", _floats),
    "users.mobility_sigma": ("mobility_sigma", _float),
    "sim.drops": ("drops", _int),
    "sim.time_steps": ("time_steps", _int),
    "sim.seed": ("seed", _int),
    "sim.iteration_cap": ("iteration_cap", _cap),
    "sim.schemes": ("schemes", _strs),
    "output.dir": ("out_dir", _str),
}
REQUIRED = ("channel.alpha",)
ACCESS_POLICIES = ("all", "random")


@dataclass(frozen=True)
class ExperimentConfig:
    alphas: tuple[float, ...]
    side_km: float = 4.0
    base_intensity: float = 1.0  # tier-1 stations per km^2
    tier_powers_w: tuple[float, ...] = (10.0, 1.0, 0.1)
    tier_density_ratios: tuple[float, ...] = (1.0, 10.0, 100.0)
    tier_bandwidths_hz: tuple[float, ...] = (10e6, 10e6, 10e6)
    # every active station draws 20 W in total, whatever its tier
    tier_circuit_powers_w: tuple[float, ...] = (10.0, 19.0, 19.9)
    tier_tolerances_w: tuple[float, ...] = (1e4, 1e4, 1e4)
    center: tuple[float, ...] | None = None
    frequency_plan: str = "per-tier"
    sinr_ceiling: float = 1e6
    noise_w: float = 1e-12
    d_min_km: float = 1e-3
    lambda_multiples: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0, 8.0)
    accessible: str = "all"
    mobility_memory: float = 0.85
    mobility_mean: tuple[float, ...] = (0.0, 0.0)
    mobility_sigma: float = 0.02
    drops: int = 100
    time_steps: int = 10
    seed: int = 1
    iteration_cap: int = 0  # 0: users x tiers
    schemes: tuple[str, ...] = SCHEMES
    out_dir: str = "out"

    @property
    def n_tiers(self) -> int:
        return len(self.tier_powers_w)

    def tiers(self) -> tuple[TierConfig, ...]:
        return tuple(
            TierConfig(k + 1, p, self.base_intensity * r, b, c, tol)
            for k, (p, r, b, c, tol) in enumerate(zip(
                self.tier_powers_w, self.tier_density_ratios, self.tier_bandwidths_hz,
                self.tier_circuit_powers_w, self.tier_tolerances_w))
        )

    def scenario(self, alpha: float) -> ScenarioConfig:
        return ScenarioConfig(
            tiers=self.tiers(),
            window=SimWindow(self.side_km),
            channel=ChannelModel(alpha, self.noise_w, self.d_min_km),
            center=None if self.center is None else (self.center[0], self.center[1]),
            frequency_plan=self.frequency_plan,
            sinr_ceiling=self.sinr_ceiling,
        )

    def mobility(self) -> MobilityParams:
        return MobilityParams(self.mobility_memory, (self.mobility_mean[0], self.mobility_mean[1]),
                              self.mobility_sigma)

    def user_intensity(self, multiple: float) -> float:
        return multiple * self.base_intensity * self.tier_density_ratios[0]

    def digest(self) -> str:
        return hashlib.sha256(render_config(self).encode()).hexdigest()[:16]


def config_violations(cfg: ExperimentConfig) -> list[str]:
    errors = []
    lists = ("tier_powers_w", "tier_density_ratios", "tier_bandwidths_hz",
             "tier_circuit_powers_w", "tier_tolerances_w")
    lengths = {name: len(getattr(cfg, name)) for name in lists}
    if len(set(lengths.values())) != 1:
        errors.append("per-tier lists must have equal length: "
                      + ", ".join(f"{k}={v}" for k, v in lengths.items()))
    if not cfg.alphas:
        errors.append("channel.alpha must be nonempty")
    if not cfg.lambda_multiples:
        errors.append("users.lambda_multiples must be nonempty")
    elif any(not m > 0 for m in cfg.lambda_multiples):
        errors.append("users.lambda_multiples must be > 0")
    elif any(b <= a for a, b in zip(cfg.lambda_multiples, cfg.lambda_multiples[1:])):
        errors.append("users.lambda_multiples must be strictly increasing")
    if cfg.drops < 1:
        errors.append("sim.drops must be >= 1")
    if cfg.time_steps < 1:
        errors.append("sim.time_steps must be >= 1")
    if cfg.iteration_cap < 0:
        errors.append("sim.iteration_cap must be 'auto' or >= 1")
    if cfg.accessible not in ACCESS_POLICIES:
        errors.append(f"users.accessible must be one of {', '.join(ACCESS_POLICIES)}")
    if not cfg.schemes or any(s not in SCHEMES for s in cfg.schemes):
        errors.append(f"sim.schemes must be a nonempty subset of {', '.join(SCHEMES)}")
    if len(cfg.mobility_mean) != 2:
        errors.append("users.mobility_mean must have two components")
    if cfg.center is not None and len(cfg.center) != 2:
        errors.append("scenario.center must be 'auto' or two coordinates")
    if not 0 <= cfg.mobility_memory <= 1:
        errors.append("users.mobility_memory must lie in [0, 1]")
    if not cfg.mobility_sigma >= 0:
        errors.append("users.mobility_sigma must be >= 0")
    if cfg.frequency_plan not in FREQUENCY_PLANS:
        errors.append(f"scenario.frequency_plan must be one of {', '.join(FREQUENCY_PLANS)}")
    if not errors:
        for a in cfg.alphas or (4.0,):
            errors.extend(e for e in scenario_violations(cfg.scenario(a)) if e not in errors)
    return errors


# scenario-level field names that show up in validation messages
_FIELD_KEYS = {
    "path_loss_exponent": ("channel.alpha",),
    "noise_power_w": ("channel.noise_w",),
    "reference_distance_km": ("channel.d_min_km",),
    "tx_power_w": ("scenario.tier_powers_w",),
    "station_intensity": ("scenario.base_intensity", "scenario.tier_density_ratios"),
    "bandwidth_hz": ("scenario.tier_bandwidths_hz",),
    "circuit_power_w": ("scenario.tier_circuit_powers_w",),
    "interference_tolerance_w": ("scenario.tier_tolerances_w",),
    "center": ("scenario.center",),
}


def parse_config(text: str) -> ExperimentConfig:
    values, where = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in where:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        attr, parser = KEYS[key]
        try:
            values[attr] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"{key}: type mismatch ({exc})", lineno) from None
        where[key] = lineno
    for key in REQUIRED:
        if key not in where:
            raise ConfigError(f"missing required key {key!r}")
    cfg = ExperimentConfig(**values)
    errors = config_violations(cfg)
    if errors:
        raise ConfigError("; ".join(errors), _first_line(errors, where))
    return cfg


def _first_line(errors, where):
    """Line of the earliest key that any error message mentions."""
    hits = []
    for key, lineno in where.items():
        names = [key, key.split(".", 1)[1]]
        names += [f for f, keys in _FIELD_KEYS.items() if key in keys]
        if any(n in e for n in names for e in errors):
            hits.append(lineno)
    return min(hits) if hits else None


def _format(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def render_config(cfg: ExperimentConfig) -> str:
    """Canonical text: every key, sorted, defaults filled in."""
    attrs = {f.name for f in fields(cfg)}
    lines = []
    for key in sorted(KEYS):
        attr = KEYS[key][0]
        assert attr in attrs
        value = getattr(cfg, attr)
        if key == "sim.iteration_cap" and value == 0:
            value = "auto"
        lines.append(f"{key} = {_format(value)}")
    return "\n".join(lines) + "\n"


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ScenarioError",
    "config_violations",
    "load_config",
    "parse_config",
    "render_config",
]
