"""Association schemes: max-SINR baseline and the two greedy cross-tier optimisers.

Both optimisers work on a single user per iteration (the worst-interference
or worst-efficiency user), try one re-association, keep it only if the global
objective strictly improves, and otherwise revert and stop. Their traces are
therefore strictly monotone and they always terminate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .channel import LinkBudget
from .model import Association, ScenarioConfig, Station, UserTerminal

BRUTE_FORCE_LIMIT = 10**6
OBJECTIVES = ("I_C", "E_C")


class InfeasibleError(ValueError):
    """A user has no station in any tier it can access."""

    def __init__(self, user_id: int):
        self.user_id = user_id
        super().__init__(f"user {user_id} has no reachable station")


class SearchSpaceError(ValueError):
    def __init__(self, size: int, limit: int = BRUTE_FORCE_LIMIT):
        self.size = size
        super().__init__(f"brute-force search space {size} exceeds limit {limit}")


@dataclass(frozen=True)
class OptimizerTrace:
    """Objective history of one optimiser run.

    ``values[0]`` is the initial objective, followed by one value per
    evaluated candidate; ``moves[i]`` produced ``values[i + 1]``. Only the
    first ``n_accepted`` moves were kept; when ``rejected`` is set the final
    entry is the candidate that ended the search.
    """

    objective_name: str
    values: tuple[float, ...]
    moves: tuple[tuple[int, int, int, int], ...] = ()
    n_accepted: int = 0
    rejected: bool = False

    @property
    def accepted_values(self) -> tuple[float, ...]:
        return self.values[: self.n_accepted + 1]

    @property
    def final_value(self) -> float:
        return self.values[self.n_accepted]

    def is_monotone(self) -> bool:
        acc = self.accepted_values
        if self.objective_name == "I_C":
            return all(b < a for a, b in zip(acc, acc[1:]))
        return all(b > a for a, b in zip(acc, acc[1:]))

    def to_table(self) -> str:
        lines = ["iteration\tobjective\tstatus\tmove"]
        lines.append(f"0\t{self.values[0]!r}\tinitial\t-")
        for i, (val, mv) in enumerate(zip(self.values[1:], self.moves), start=1):
            status = "accepted" if i <= self.n_accepted else "rejected"
            uid, frm, to, sid = mv
            lines.append(f"{i}\t{val!r}\t{status}\tuser {uid}: tier {frm} -> tier {to} station {sid}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EnergyReport:
    flow_bps: float
    power_w: float
    efficiency_bpj: float
    per_user_flow: dict = field(default_factory=dict)


class BruteForceResult(NamedTuple):
    association: Association
    value: float
    evaluations: int


def efficiency(flow: float, power: float) -> float:
    return flow / power if power > 0 else 0.0


def default_cap(n_users: int, n_tiers: int) -> int:
    return max(1, n_users * n_tiers)


# -- array-level implementations -------------------------------------------------

def max_sinr_serving(lb: LinkBudget) -> np.ndarray:
    """Each user independently takes the best SINR against the all-active field."""
    n = lb.n_users
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    cand = lb.best_idx
    ok = lb.access & (cand >= 0)
    bad = np.flatnonzero(~ok.any(axis=1))
    if bad.size:
        raise InfeasibleError(int(lb.user_ids[bad[0]]))
    interf = kernels.band_interference_excluding(lb.rx, lb.station_band, cand)
    den = interf + lb.noise
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(den > 0, lb.best_rx / np.where(den > 0, den, 1.0), np.inf)
    s = np.where(ok, s, -np.inf)
    top = s.max(axis=1)
    tied = ok & (s == top[:, None])
    ids = np.where(tied, lb.station_ids[np.where(cand >= 0, cand, 0)], np.iinfo(np.int64).max)
    pick = np.argmin(ids, axis=1)
    return cand[np.arange(n), pick]


def _move(lb: LinkBudget, serving, u, s_new):
    uid = int(lb.user_ids[u])
    frm = int(lb.station_tier[serving[u]]) + 1
    to = int(lb.station_tier[s_new]) + 1
    return (uid, frm, to, int(lb.station_ids[s_new]))


def minimize_interference_serving(lb: LinkBudget, serving: np.ndarray, cap: int | None = None):
    """Greedy aggregate-interference descent; returns ``(serving, trace)``."""
    if cap is None:
        cap = default_cap(lb.n_users, lb.n_tiers)
    if cap < 1:
        raise ValueError("cap must be >= 1")
    serving = np.array(serving, dtype=np.int64)
    interf = lb.interference(serving)
    ic = float(interf.sum())
    values, moves = [ic], []
    accepted, rejected = 0, False
    for _ in range(cap):
        if lb.n_users == 0:
            break
        u = int(np.argmax(interf))
        cur = lb.station_tier[serving[u]]
        headroom = lb.tier_tolerance - lb.tier_means(serving, interf)
        ok = lb.access[u] & (lb.best_idx[u] >= 0) & (headroom > 0)
        ok[cur] = False
        if not ok.any():
            break
        t = int(np.argmax(np.where(ok, headroom, -np.inf)))
        s_new = lb.best_idx[u, t]
        trial = serving.copy()
        trial[u] = s_new
        assert lb.access[u, lb.station_tier[s_new]]
        t_interf = lb.interference(trial)
        t_ic = float(t_interf.sum())
        moves.append(_move(lb, serving, u, s_new))
        values.append(t_ic)
        if t_ic < ic:
            serving, interf, ic = trial, t_interf, t_ic
            accepted += 1
        else:
            rejected = True
            break
    return serving, OptimizerTrace("I_C", tuple(values), tuple(moves), accepted, rejected)


def _efficiency_of(lb: LinkBudget, serving):
    interf = lb.interference(serving)
    flows = lb.flows(serving, interf)
    return efficiency(float(flows.sum()), lb.power(serving)), flows


def optimize_energy_serving(lb: LinkBudget, serving: np.ndarray, cap: int | None = None):
    """Greedy energy-efficiency ascent; returns ``(serving, trace)``."""
    if cap is None:
        cap = default_cap(lb.n_users, lb.n_tiers)
    if cap < 1:
        raise ValueError("cap must be >= 1")
    serving = np.array(serving, dtype=np.int64)
    ec, flows = _efficiency_of(lb, serving)
    values, moves = [ec], []
    accepted, rejected = 0, False
    for _ in range(cap):
        if lb.n_users == 0:
            break
        load = np.bincount(serving, minlength=len(lb.stations))
        # the serving station's consumption shared equally among its users
        share = flows * load[serving] / lb.station_consumption[serving]
        u = int(np.argmin(share))
        best = None
        for t in range(lb.n_tiers):
            s_new = lb.best_idx[u, t]
            if not lb.access[u, t] or s_new < 0 or s_new == serving[u]:
                continue
            trial = serving.copy()
            trial[u] = s_new
            t_ec, t_flows = _efficiency_of(lb, trial)
            if best is None or t_ec > best[0]:
                best = (t_ec, trial, t_flows, s_new)
        if best is None:
            break
        t_ec, trial, t_flows, s_new = best
        assert lb.access[u, lb.station_tier[s_new]]
        moves.append(_move(lb, serving, u, s_new))
        values.append(t_ec)
        if t_ec > ec:
            serving, flows, ec = trial, t_flows, t_ec
            accepted += 1
        else:
            rejected = True
            break
    return serving, OptimizerTrace("E_C", tuple(values), tuple(moves), accepted, rejected)


def objective_value(lb: LinkBudget, serving: np.ndarray, objective: str) -> float:
    if objective == "I_C":
        return float(lb.interference(serving).sum())
    if objective == "E_C":
        return _efficiency_of(lb, serving)[0]
    raise ValueError(f"unknown objective {objective!r}")


def energy_report(lb: LinkBudget, serving: np.ndarray) -> EnergyReport:
    flows = lb.flows(serving)
    total = float(flows.sum())
    power = lb.power(serving)
    return EnergyReport(
        flow_bps=total,
        power_w=power,
        efficiency_bpj=efficiency(total, power),
        per_user_flow={int(u): float(f) for u, f in zip(lb.user_ids, flows)},
    )


# -- object-level API ------------------------------------------------------------

def associate_max_sinr(users: Sequence[UserTerminal], stations: Sequence[Station],
                       scenario: ScenarioConfig) -> Association:
    lb = LinkBudget(users, stations, scenario)
    return lb.to_association(max_sinr_serving(lb))


def minimize_interference(initial: Association, users: Sequence[UserTerminal],
                          stations: Sequence[Station], scenario: ScenarioConfig,
                          cap: int | None = None) -> tuple[Association, OptimizerTrace]:
    lb = LinkBudget(users, stations, scenario)
    serving, trace = minimize_interference_serving(lb, lb.serving_from(initial), cap)
    return lb.to_association(serving), trace


def optimize_energy_efficiency(initial: Association, users: Sequence[UserTerminal],
                               stations: Sequence[Station], scenario: ScenarioConfig,
                               cap: int | None = None) -> tuple[Association, OptimizerTrace]:
    lb = LinkBudget(users, stations, scenario)
    serving, trace = optimize_energy_serving(lb, lb.serving_from(initial), cap)
    return lb.to_association(serving), trace


def network_flow(assoc: Association, users: Sequence[UserTerminal], stations: Sequence[Station],
                 scenario: ScenarioConfig) -> EnergyReport:
    lb = LinkBudget(users, stations, scenario)
    return energy_report(lb, lb.serving_from(assoc))


energy_efficiency = network_flow


def total_power(assoc: Association, stations: Sequence[Station], scenario: ScenarioConfig) -> float:
    tier_of = {s.station_id: s.tier_id for s in stations}
    total = 0.0
    for sid in sorted(assoc.active_stations()):
        t = scenario.tier(tier_of[sid])
        total += t.tx_power_w + t.circuit_power_w
    return total


def brute_force_best_association(users: Sequence[UserTerminal], stations: Sequence[Station],
                                 scenario: ScenarioConfig, objective: str,
                                 limit: int = BRUTE_FORCE_LIMIT) -> BruteForceResult:
    """Exhaustive search over every total association.

    Candidates for a user are all stations in its accessible tiers. Ties keep
    the lexicographically first association (users by id, then station id).
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    lb = LinkBudget(users, stations, scenario)
    options = []
    for i in range(lb.n_users):
        cols = np.flatnonzero(lb.access[i][lb.station_tier])
        if cols.size == 0:
            raise InfeasibleError(int(lb.user_ids[i]))
        options.append(cols.tolist())
    size = math.prod(len(o) for o in options)
    if size > limit:
        raise SearchSpaceError(size, limit)
    sign = 1.0 if objective == "I_C" else -1.0
    best_val, best = math.inf, None
    count = 0
    for combo in itertools.product(*options):
        serving = np.array(combo, dtype=np.int64)
        val = sign * objective_value(lb, serving, objective)
        count += 1
        if val < best_val:
            best_val, best = val, serving
    assert best is not None
    return BruteForceResult(lb.to_association(best), sign * best_val, count)
