"""Small-instance oracle suite: brute force brackets the greedy optimisers.

For every random instance the checks are

    brute I_C <= interference-min I_C <= max-SINR I_C
    max-SINR E_C <= energy-opt E_C <= brute E_C
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .channel import LinkBudget
from .model import ScenarioConfig, Station, UserTerminal
from .schemes import (
    brute_force_best_association,
    max_sinr_serving,
    minimize_interference_serving,
    objective_value,
    optimize_energy_serving,
)


@dataclass(frozen=True)
class SandwichOutcome:
    brute_ic: float
    alg1_ic: float
    base_ic: float
    base_ec: float
    alg2_ec: float
    brute_ec: float

    def violations(self) -> list[str]:
        out = []
        if not self.brute_ic <= self.alg1_ic <= self.base_ic:
            out.append(f"I_C order broken: brute {self.brute_ic!r}, alg1 {self.alg1_ic!r}, "
                       f"max-sinr {self.base_ic!r}")
        if not self.base_ec <= self.alg2_ec <= self.brute_ec:
            out.append(f"E_C order broken: max-sinr {self.base_ec!r}, alg2 {self.alg2_ec!r}, "
                       f"brute {self.brute_ec!r}")
        return out


def random_instance(rng: np.random.Generator, scenario: ScenarioConfig, max_users: int = 4,
                    max_stations: int = 6) -> tuple[list[UserTerminal], list[Station]]:
    """Uniform stations and users, at least one station per tier, every user able to reach one."""
    side = scenario.window.side_km
    tier_ids = [t.tier_id for t in scenario.tiers]
    n_st = int(rng.integers(len(tier_ids), max_stations + 1))
    tiers = tier_ids + [tier_ids[i] for i in rng.integers(0, len(tier_ids), n_st - len(tier_ids))]
    stations = [Station(i, int(t), tuple(map(float, rng.uniform(0, side, 2))))
                for i, t in enumerate(tiers)]
    users = []
    for u in range(int(rng.integers(1, max_users + 1))):
        mask = rng.integers(0, 2, len(tier_ids)).astype(bool)
        if not mask.any():
            mask[rng.integers(0, len(tier_ids))] = True
        acc = frozenset(t for t, m in zip(tier_ids, mask) if m)
        users.append(UserTerminal(u, tuple(map(float, rng.uniform(0, side, 2))), acc))
    return users, stations


def sandwich(users, stations, scenario: ScenarioConfig) -> SandwichOutcome:
    lb = LinkBudget(users, stations, scenario)
    base = max_sinr_serving(lb)
    s1, _ = minimize_interference_serving(lb, base)
    s2, _ = optimize_energy_serving(lb, base)
    return SandwichOutcome(
        brute_ic=brute_force_best_association(users, stations, scenario, "I_C").value,
        alg1_ic=objective_value(lb, s1, "I_C"),
        base_ic=objective_value(lb, base, "I_C"),
        base_ec=objective_value(lb, base, "E_C"),
        alg2_ec=objective_value(lb, s2, "E_C"),
        brute_ec=brute_force_best_association(users, stations, scenario, "E_C").value,
    )


def two_tier(scenario: ScenarioConfig) -> ScenarioConfig:
    return replace(scenario, tiers=scenario.tiers[:2])


def run_oracle_suite(scenario: ScenarioConfig, instances: int = 200, seed: int = 0) -> list[str]:
    """Failure messages over ``instances`` random two-tier problems; empty means all passed."""
    scenario = two_tier(scenario)
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(instances):
        users, stations = random_instance(rng, scenario)
        failures.extend(f"instance {i}: {msg}" for msg in sandwich(users, stations, scenario).violations())
    return failures
