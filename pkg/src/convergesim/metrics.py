"""Aggregation of Monte Carlo drops into normalised sweep curves, plus trend statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import spearmanr

from .model import ScenarioConfig

SCHEMES = ("max-sinr", "interference-min", "energy-opt")
BASELINE = "max-sinr"


@dataclass(frozen=True)
class SweepPoint:
    scheme: str
    alpha: float
    lambda_norm: float
    drops: int
    mean_interference_w: float
    ci95_interference_w: float
    mean_flow_bps: float
    mean_power_w: float
    mean_eff_bpj: float
    ci95_eff_bpj: float
    norm_interference: float = math.nan
    norm_eff: float = math.nan


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    config_digest: str
    master_seed: int
    resamples: int = 0

    def cell(self, scheme: str, alpha: float, lambda_norm: float) -> SweepPoint:
        for p in self.points:
            if p.scheme == scheme and p.alpha == alpha and p.lambda_norm == lambda_norm:
                return p
        raise KeyError((scheme, alpha, lambda_norm))

    def curve(self, scheme: str, alpha: float) -> list[SweepPoint]:
        return sorted((p for p in self.points if p.scheme == scheme and p.alpha == alpha),
                      key=lambda p: p.lambda_norm)


def normalized_user_intensity(lambda_users: float, scenario: ScenarioConfig) -> float:
    lam1 = scenario.tiers[0].station_intensity
    if not lam1 > 0:
        raise ValueError("tier-1 intensity must be > 0")
    return lambda_users / lam1


def normalize_curves(values: Mapping, reference) -> dict:
    """Divide every value by ``values[reference]``; the reference maps to 1.0."""
    ref = values[reference]
    if not ref > 0:
        raise ValueError(f"reference value must be > 0, got {ref!r}")
    return {k: v / ref for k, v in values.items()}


def aggregate_drops(values: Sequence[float]) -> tuple[float, float]:
    """Sample mean and 95% half-width ``1.96 * s / sqrt(n)``; NaN half-width for one drop."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("no drops to aggregate")
    mean = float(x.mean())
    if x.size < 2:
        return mean, math.nan
    return mean, float(1.96 * x.std(ddof=1) / math.sqrt(x.size))


def trend_monotone(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman rank correlation of ``ys`` against strictly increasing ``xs``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size != ys.size or xs.size < 3:
        raise ValueError("need at least three paired samples")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("xs must be strictly increasing")
    if np.all(ys == ys[0]):
        return 0.0
    return float(spearmanr(xs, ys).statistic)


def ci_separated(low: SweepPoint, high: SweepPoint, metric: str) -> bool:
    """True when ``low``'s upper 95% bound sits strictly below ``high``'s lower bound."""
    if metric == "interference":
        a = low.mean_interference_w + low.ci95_interference_w
        b = high.mean_interference_w - high.ci95_interference_w
    else:
        a = low.mean_eff_bpj + low.ci95_eff_bpj
        b = high.mean_eff_bpj - high.ci95_eff_bpj
    return a < b
