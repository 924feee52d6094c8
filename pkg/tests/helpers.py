"""Bridges between oracle toys and package objects, plus hypothesis strategies."""

from __future__ import annotations

from hypothesis import strategies as st

from convergesim.model import ChannelModel, ScenarioConfig, SimWindow, Station, TierConfig, UserTerminal
from oracles import Toy

DEFAULT_TIERS = {
    1: dict(p=10.0, circuit=10.0, bw=10e6, tol=1e4),
    2: dict(p=1.0, circuit=19.0, bw=10e6, tol=1e4),
    3: dict(p=0.1, circuit=19.9, bw=10e6, tol=1e4),
}


def scenario_of(toy: Toy) -> ScenarioConfig:
    tiers = tuple(
        TierConfig(t, toy.tiers[t]["p"], 1.0, toy.tiers[t]["bw"], toy.tiers[t]["circuit"], toy.tiers[t]["tol"])
        for t in sorted(toy.tiers)
    )
    return ScenarioConfig(
        tiers=tiers,
        window=SimWindow(toy.side),
        channel=ChannelModel(toy.alpha, toy.noise, toy.d_min),
        frequency_plan="full-reuse" if toy.full_reuse else "per-tier",
        sinr_ceiling=toy.ceiling,
    )


def objects_of(toy: Toy):
    stations = [Station(sid, t, p) for sid, t, p in toy.stations]
    users = [UserTerminal(uid, p, frozenset(acc)) for uid, p, acc in toy.users]
    return users, stations, scenario_of(toy)


def as_dict(assoc) -> dict:
    return {uid: sid for uid, (_, sid) in assoc.serving.items()}


coord = st.floats(0.0, 2.0, allow_nan=False, exclude_max=True)
point = st.tuples(coord, coord)


@st.composite
def toys(draw, n_tiers=2, max_users=4, max_stations=6, full_reuse=None, alpha=None):
    tier_ids = list(range(1, n_tiers + 1))
    n_st = draw(st.integers(n_tiers, max_stations))
    extra = draw(st.lists(st.sampled_from(tier_ids), min_size=n_st - n_tiers, max_size=n_st - n_tiers))
    stations = [(i, t, draw(point)) for i, t in enumerate(tier_ids + extra)]
    n_us = draw(st.integers(1, max_users))
    users = []
    for u in range(n_us):
        acc = draw(st.sets(st.sampled_from(tier_ids), min_size=1))
        users.append((u, draw(point), acc))
    tiers = {t: DEFAULT_TIERS[t] for t in tier_ids}
    if alpha is None:
        alpha = draw(st.sampled_from([3.0, 4.0]))
    if full_reuse is None:
        full_reuse = draw(st.booleans())
    return Toy(stations, users, tiers, alpha, side=2.0, full_reuse=full_reuse)
