"""Monte Carlo drops and the (scheme x alpha x lambda) sweep.

A drop samples one geometry and walks it through ``time_steps`` mobility
epochs. Every scheme is evaluated on the same geometry at every epoch, so
schemes are paired by construction. Optimisers restart from the max-SINR
association at each epoch.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import LinkBudget
from .config import ExperimentConfig
from .geometry import sample_ppp
from .metrics import BASELINE, SweepPoint, SweepResult, aggregate_drops, normalized_user_intensity
from .mobility import advance_positions
from .model import MobilityState, Station, UserTerminal
from .schemes import (
    OptimizerTrace,
    efficiency,
    max_sinr_serving,
    minimize_interference_serving,
    optimize_energy_serving,
)

log = logging.getLogger(__name__)

MAX_RESAMPLES = 100
# per-epoch snapshot columns
I_C, F_C, POWER, E_C, N_USERS = range(5)


@dataclass
class DropResult:
    seed: tuple[int, ...]
    schemes: tuple[str, ...]
    snapshots: dict[str, np.ndarray]  # scheme -> (time_steps, 5)
    association_digests: dict[str, str]
    traces: dict[str, list[OptimizerTrace]] = field(default_factory=dict)
    geometry_digest: str = ""
    resamples: int = 0

    def mean(self, scheme: str, column: int) -> float:
        return float(self.snapshots[scheme][:, column].mean())

    def mean_efficiency(self, scheme: str) -> float:
        return self.mean(scheme, E_C)


class InfeasibleDrop(RuntimeError):
    pass


def drop_seed(master: int, alpha_index: int, lambda_index: int, drop: int) -> tuple[int, ...]:
    """Seed key shared by every scheme at one (alpha, lambda, drop) cell."""
    return (master, alpha_index, lambda_index, drop)


def sample_geometry(cfg: ExperimentConfig, lambda_multiple: float, rng: np.random.Generator):
    """Stations per tier and initial users; raises when a user reaches no station."""
    window = cfg.scenario(cfg.alphas[0]).window
    stations = []
    counts = []
    for t in cfg.tiers():
        pts = sample_ppp(t.station_intensity, window, rng)
        counts.append(len(pts))
        for p in pts:
            stations.append(Station(len(stations), t.tier_id, (float(p[0]), float(p[1]))))
    upts = sample_ppp(cfg.user_intensity(lambda_multiple), window, rng)
    mp = cfg.mobility()
    vel = np.asarray(mp.mean_velocity) + mp.sigma * rng.standard_normal(upts.shape)
    k = cfg.n_tiers
    users = []
    for i, (p, v) in enumerate(zip(upts, vel)):
        if cfg.accessible == "all":
            tiers = frozenset(range(1, k + 1))
        else:
            mask = rng.integers(0, 2, size=k).astype(bool)
            if not mask.any():
                mask[rng.integers(0, k)] = True
            tiers = frozenset(int(j) + 1 for j in np.flatnonzero(mask))
        if not any(counts[t - 1] for t in tiers):
            raise InfeasibleDrop(f"user {i} has no reachable station")
        users.append(UserTerminal(i, (float(p[0]), float(p[1])), tiers,
                                  MobilityState((float(v[0]), float(v[1])))))
    return stations, users


def _digest(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()[:16]


def run_drop(cfg: ExperimentConfig, alpha: float, lambda_multiple: float, seed: tuple[int, ...],
             schemes: tuple[str, ...] | None = None, keep_traces: bool = False) -> DropResult:
    schemes = tuple(schemes or cfg.schemes)
    resamples = 0
    while True:
        rng = np.random.default_rng(np.random.SeedSequence(list(seed) + [resamples]))
        try:
            stations, users = sample_geometry(cfg, lambda_multiple, rng)
            break
        except InfeasibleDrop:
            resamples += 1
            if resamples > MAX_RESAMPLES:
                raise
    scenario = cfg.scenario(alpha)
    geometry_digest = _digest(
        np.array([s.position for s in stations]), np.array([u.position for u in users]))
    params = cfg.mobility()
    pos = np.array([u.position for u in users], dtype=float).reshape(-1, 2)
    vel = np.array([u.mobility_state.velocity for u in users], dtype=float).reshape(-1, 2)

    snaps = {s: np.zeros((cfg.time_steps, 5)) for s in schemes}
    traces: dict[str, list[OptimizerTrace]] = {s: [] for s in schemes if s != BASELINE}
    finals = {}
    for step in range(cfg.time_steps):
        users = [UserTerminal(u.user_id, (float(p[0]), float(p[1])), u.accessible_tiers)
                 for u, p in zip(users, pos)]
        lb = LinkBudget(users, stations, scenario)
        cap = cfg.iteration_cap or None
        base = max_sinr_serving(lb)
        for scheme in schemes:
            if scheme == BASELINE:
                serving = base
            elif scheme == "interference-min":
                serving, trace = minimize_interference_serving(lb, base, cap)
                traces[scheme].append(trace)
            else:
                serving, trace = optimize_energy_serving(lb, base, cap)
                traces[scheme].append(trace)
            interf = lb.interference(serving)
            flow = float(lb.flows(serving, interf).sum())
            power = lb.power(serving)
            snaps[scheme][step] = (interf.sum(), flow, power, efficiency(flow, power), lb.n_users)
            finals[scheme] = serving
        pos, vel = advance_positions(pos, vel, params, scenario.window, rng)

    return DropResult(
        seed=tuple(seed),
        schemes=schemes,
        snapshots=snaps,
        association_digests={s: _digest(v) for s, v in finals.items()},
        traces=traces if keep_traces else {},
        geometry_digest=geometry_digest,
        resamples=resamples,
    )


def _work(args):
    cfg, ai, li, d, schemes, keep_traces = args
    res = run_drop(cfg, cfg.alphas[ai], cfg.lambda_multiples[li],
                   drop_seed(cfg.seed, ai, li, d), schemes, keep_traces=True)
    violations = sum(not t.is_monotone() for ts in res.traces.values() for t in ts)
    base = res.snapshots.get(BASELINE)
    if base is not None:
        if "interference-min" in res.snapshots:
            violations += int(np.sum(res.snapshots["interference-min"][:, I_C] > base[:, I_C]))
        if "energy-opt" in res.snapshots:
            violations += int(np.sum(res.snapshots["energy-opt"][:, E_C] < base[:, E_C]))
    if not keep_traces:
        res.traces = {}
    return ai, li, d, res, violations


def worker_count() -> int:
    env = os.environ.get("CONVERGE_SIM_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class SweepRun:
    result: SweepResult
    drops: dict  # (alpha_index, lambda_index) -> list[DropResult]
    violations: int


def run_sweep(cfg: ExperimentConfig, schemes: tuple[str, ...] | None = None,
              workers: int | None = None, progress=None, keep_traces: bool = False) -> SweepRun:
    """Every (alpha, lambda) cell, ``cfg.drops`` paired drops, aggregated and normalised."""
    schemes = tuple(schemes or cfg.schemes)
    if BASELINE not in schemes:
        # normalisation and the optimisers' guarantees are relative to the baseline
        schemes = (BASELINE,) + schemes
    jobs = [(cfg, ai, li, d, schemes, keep_traces)
            for ai in range(len(cfg.alphas))
            for li in range(len(cfg.lambda_multiples))
            for d in range(cfg.drops)]
    workers = workers or worker_count()
    cells: dict = {}
    violations = 0
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            outputs = pool.map(_work, jobs, chunksize=max(1, len(jobs) // (8 * workers)))
            outputs = list(_tick(outputs, progress))
    else:
        outputs = list(_tick(map(_work, jobs), progress))
    for ai, li, d, res, v in outputs:
        cells.setdefault((ai, li), []).append(res)
        violations += v
    if violations:
        log.warning("%d optimizer guarantee violations", violations)
    return SweepRun(aggregate_sweep(cfg, schemes, cells), cells, violations)


def _tick(it, progress):
    for item in it:
        if progress is not None:
            progress()
        yield item


def aggregate_sweep(cfg: ExperimentConfig, schemes, cells) -> SweepResult:
    points = []
    resamples = 0
    for (ai, li), drops in sorted(cells.items()):
        resamples += sum(d.resamples for d in drops)
    base_scn = cfg.scenario(cfg.alphas[0])
    for scheme in schemes:
        for ai, alpha in enumerate(cfg.alphas):
            for li, mult in enumerate(cfg.lambda_multiples):
                drops = cells[(ai, li)]
                mi, ci_i = aggregate_drops([d.mean(scheme, I_C) for d in drops])
                me, ci_e = aggregate_drops([d.mean(scheme, E_C) for d in drops])
                points.append(SweepPoint(
                    scheme=scheme,
                    alpha=alpha,
                    lambda_norm=normalized_user_intensity(cfg.user_intensity(mult), base_scn),
                    drops=len(drops),
                    mean_interference_w=mi,
                    ci95_interference_w=ci_i,
                    mean_flow_bps=float(np.mean([d.mean(scheme, F_C) for d in drops])),
                    mean_power_w=float(np.mean([d.mean(scheme, POWER) for d in drops])),
                    mean_eff_bpj=me,
                    ci95_eff_bpj=ci_e,
                ))
    return SweepResult(tuple(normalize_points(points)), cfg.digest(), cfg.seed, resamples)


def normalize_points(points: list[SweepPoint]) -> list[SweepPoint]:
    """Divide each alpha family by the baseline scheme's value at the smallest lambda."""
    refs = {}
    for p in points:
        if p.scheme == BASELINE and (p.alpha not in refs or p.lambda_norm < refs[p.alpha].lambda_norm):
            refs[p.alpha] = p
    out = []
    for p in points:
        ref = refs[p.alpha]
        ni = p.mean_interference_w / ref.mean_interference_w if ref.mean_interference_w > 0 else math.nan
        ne = p.mean_eff_bpj / ref.mean_eff_bpj if ref.mean_eff_bpj > 0 else math.nan
        out.append(replace(p, norm_interference=ni, norm_eff=ne))
    return out
