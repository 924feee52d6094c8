"""Received power, SINR, co-channel interference and conflict domains.

Only active stations (at least one served user) transmit. Under the default
``per-tier`` frequency plan each tier owns its band, so interference is
intra-tier; ``full-reuse`` puts every tier on one band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .geometry import TopologyLink, torus_distance
from .model import Association, ChannelModel, ScenarioConfig, Station, UserTerminal


def received_power(tx_power_w: float, distance_km: float, channel: ChannelModel) -> float:
    d = max(distance_km, channel.reference_distance_km)
    return tx_power_w * d ** (-channel.path_loss_exponent)


def sinr_value(desired_w: float, interference_w: float, noise_w: float) -> float:
    """``desired / (interference + noise)``; ``math.inf`` when the denominator is 0."""
    den = interference_w + noise_w
    if den <= 0:
        return math.inf
    return desired_w / den


class LinkBudget:
    """Array view of one snapshot: every user-station received power.

    Stations and users are held sorted by id, so array position order is id
    order and "first maximum" is the lowest-id tie-break. A serving vector is
    an int array of station positions, one per user.
    """

    def __init__(self, users: Sequence[UserTerminal], stations: Sequence[Station],
                 scenario: ScenarioConfig):
        self.scenario = scenario
        self.users = sorted(users, key=lambda u: u.user_id)
        self.stations = sorted(stations, key=lambda s: s.station_id)
        self.user_ids = np.array([u.user_id for u in self.users], dtype=np.int64)
        self.station_ids = np.array([s.station_id for s in self.stations], dtype=np.int64)
        self.station_pos = {sid: i for i, sid in enumerate(self.station_ids.tolist())}
        self.user_pos = {uid: i for i, uid in enumerate(self.user_ids.tolist())}

        k = scenario.n_tiers
        self.n_tiers = k
        tiers = scenario.tiers
        self.station_tier = np.array([s.tier_id - 1 for s in self.stations], dtype=np.int64)
        self.station_band = np.array([scenario.band_of(s.tier_id) for s in self.stations], dtype=np.int64)
        tx = np.array([t.tx_power_w for t in tiers])
        self.station_tx = tx[self.station_tier] if self.stations else np.zeros(0)
        consumed = np.array([t.tx_power_w + t.circuit_power_w for t in tiers])
        self.station_consumption = consumed[self.station_tier] if self.stations else np.zeros(0)
        self.tier_bandwidth = np.array([t.bandwidth_hz for t in tiers])
        self.tier_tolerance = np.array([t.interference_tolerance_w for t in tiers])

        self.access = np.zeros((len(self.users), k), dtype=bool)
        for i, u in enumerate(self.users):
            for t in u.accessible_tiers:
                if 1 <= t <= k:
                    self.access[i, t - 1] = True

        ch = scenario.channel
        self.noise = ch.noise_power_w
        self.rx = kernels.received_power_matrix(
            np.array([u.position for u in self.users], dtype=float).reshape(-1, 2),
            np.array([s.position for s in self.stations], dtype=float).reshape(-1, 2),
            self.station_tx,
            ch.path_loss_exponent,
            scenario.window.side_km,
            ch.reference_distance_km,
        )
        # strongest (equivalently nearest) station of each tier, per user
        self.best_idx, self.best_rx = kernels.best_per_tier(self.rx, self.station_tier, k)

    @property
    def n_users(self) -> int:
        return len(self.users)

    def serving_from(self, assoc: Association) -> np.ndarray:
        return np.array([self.station_pos[assoc.station_of(int(uid))] for uid in self.user_ids],
                        dtype=np.int64)

    def to_association(self, serving: np.ndarray) -> Association:
        return Association({
            int(uid): (int(self.station_tier[s]) + 1, int(self.station_ids[s]))
            for uid, s in zip(self.user_ids, serving)
        })

    def interference(self, serving: np.ndarray) -> np.ndarray:
        if serving.size == 0:
            return np.zeros(0)
        active = np.unique(serving)
        return kernels.cochannel_interference(self.rx, self.station_band, active, serving)

    def desired(self, serving: np.ndarray) -> np.ndarray:
        return self.rx[np.arange(serving.size), serving]

    def sinr(self, serving: np.ndarray, interference: np.ndarray | None = None) -> np.ndarray:
        if interference is None:
            interference = self.interference(serving)
        den = interference + self.noise
        with np.errstate(divide="ignore"):
            return np.where(den > 0, self.desired(serving) / np.where(den > 0, den, 1.0), np.inf)

    def flows(self, serving: np.ndarray, interference: np.ndarray | None = None) -> np.ndarray:
        s = np.minimum(self.sinr(serving, interference), self.scenario.sinr_ceiling)
        return self.tier_bandwidth[self.station_tier[serving]] * np.log2(1.0 + s)

    def power(self, serving: np.ndarray) -> float:
        if serving.size == 0:
            return 0.0
        return float(self.station_consumption[np.unique(serving)].sum())

    def tier_means(self, serving: np.ndarray, interference: np.ndarray) -> np.ndarray:
        """Mean interference over users served in each tier (0 for an empty tier)."""
        tiers = self.station_tier[serving]
        sums = np.bincount(tiers, weights=interference, minlength=self.n_tiers)
        counts = np.bincount(tiers, minlength=self.n_tiers)
        return np.divide(sums, counts, out=np.zeros(self.n_tiers), where=counts > 0)


@dataclass(frozen=True)
class InterferenceReport:
    per_user_w: Mapping[int, float]
    aggregate_w: float
    per_tier_mean_w: Mapping[int, float]


@dataclass(frozen=True)
class ConflictPartition:
    conflict_groups: tuple[frozenset[tuple[int, int]], ...]
    non_conflict: frozenset[tuple[int, int]]


def _single_user_budget(user, assoc, stations, scenario):
    # Interference at one user depends on the others only through the active set.
    lb = LinkBudget([user], stations, scenario)
    active = np.array(sorted(lb.station_pos[s] for s in assoc.active_stations()), dtype=np.int64)
    serving = np.array([lb.station_pos[assoc.station_of(user.user_id)]], dtype=np.int64)
    return lb, active, serving


def interference_at_user(user: UserTerminal, assoc: Association, stations: Sequence[Station],
                         scenario: ScenarioConfig) -> float:
    lb, active, serving = _single_user_budget(user, assoc, stations, scenario)
    return float(kernels.cochannel_interference(lb.rx, lb.station_band, active, serving)[0])


def sinr(user: UserTerminal, assoc: Association, stations: Sequence[Station],
         scenario: ScenarioConfig) -> float:
    lb, active, serving = _single_user_budget(user, assoc, stations, scenario)
    i = float(kernels.cochannel_interference(lb.rx, lb.station_band, active, serving)[0])
    return sinr_value(float(lb.rx[0, serving[0]]), i, lb.noise)


def aggregate_interference(assoc: Association, users: Sequence[UserTerminal],
                           stations: Sequence[Station], scenario: ScenarioConfig) -> InterferenceReport:
    lb = LinkBudget(users, stations, scenario)
    serving = lb.serving_from(assoc)
    per_user = lb.interference(serving)
    means = lb.tier_means(serving, per_user)
    return InterferenceReport(
        per_user_w={int(u): float(v) for u, v in zip(lb.user_ids, per_user)},
        aggregate_w=float(per_user.sum()),
        per_tier_mean_w={k + 1: float(means[k]) for k in range(lb.n_tiers)},
    )


def classify_conflict_domains(stations: Sequence[Station], assoc: Association,
                              users: Sequence[UserTerminal], scenario: ScenarioConfig,
                              threshold_w: float | None = None) -> ConflictPartition:
    """Connected components of the "interferes above threshold" graph.

    Two active co-channel stations are joined when either one's signal at the
    other's nearest served user exceeds ``threshold_w`` (default: 10x noise).
    """
    if threshold_w is None:
        threshold_w = 10.0 * scenario.channel.noise_power_w
    if not threshold_w > 0:
        raise ValueError("threshold_w must be > 0")
    window, ch = scenario.window, scenario.channel
    by_id = {s.station_id: s for s in stations}
    user_by_id = {u.user_id: u for u in users}
    active = sorted(assoc.active_stations())

    anchor = {}
    for sid in active:
        served = sorted(uid for uid, (_, s) in assoc.serving.items() if s == sid)
        pos = by_id[sid].position
        anchor[sid] = min(served, key=lambda uid: (torus_distance(pos, user_by_id[uid].position, window), uid))

    def signal_at(src, dst):
        st = by_id[src]
        d = torus_distance(st.position, user_by_id[anchor[dst]].position, window)
        return received_power(scenario.tier(st.tier_id).tx_power_w, d, ch)

    rows, cols = [], []
    for i, a in enumerate(active):
        for j in range(i + 1, len(active)):
            b = active[j]
            if scenario.band_of(by_id[a].tier_id) != scenario.band_of(by_id[b].tier_id):
                continue
            if signal_at(a, b) > threshold_w or signal_at(b, a) > threshold_w:
                rows.append(i)
                cols.append(j)
    n = len(active)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    members: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        members.setdefault(int(lab), []).append(i)
    key = lambda i: (by_id[active[i]].tier_id, active[i])  # noqa: E731
    groups, lone = [], []
    for idx in members.values():
        if len(idx) >= 2:
            groups.append(frozenset(key(i) for i in idx))
        else:
            lone.append(key(idx[0]))
    groups.sort(key=lambda g: min(g))
    return ConflictPartition(tuple(groups), frozenset(lone))


def association_links(assoc: Association, users: Sequence[UserTerminal],
                      stations: Sequence[Station], scenario: ScenarioConfig) -> list[TopologyLink]:
    """Desired links (weight: Shannon rate, bit/s) and interference links (weight: watts)."""
    lb = LinkBudget(users, stations, scenario)
    serving = lb.serving_from(assoc)
    interf = lb.interference(serving)
    rates = lb.flows(serving, interf)
    active = np.unique(serving)
    links = []
    for i, uid in enumerate(lb.user_ids.tolist()):
        s = serving[i]
        links.append(TopologyLink(("bs", int(lb.station_ids[s])), ("ue", uid), "desired", float(rates[i])))
        for j in active:
            if j != s and lb.station_band[j] == lb.station_band[s]:
                links.append(TopologyLink(("bs", int(lb.station_ids[j])), ("ue", uid),
                                          "interference", float(lb.rx[i, j])))
    return links
