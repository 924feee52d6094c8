"""Domain types for a K-tier heterogeneous downlink network.

Units are fixed: watts, hertz, kilometres. Every type is an immutable value
object; derived or normalised quantities live in :mod:`convergesim.metrics`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

Position = tuple[float, float]

FREQUENCY_PLANS = ("per-tier", "full-reuse")


class ScenarioError(ValueError):
    """Raised when a scenario violates one or more invariants.

    ``violations`` holds every failure found, not only the first.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class TierConfig:
    tier_id: int
    tx_power_w: float
    station_intensity: float  # stations per km^2
    bandwidth_hz: float
    circuit_power_w: float = 0.0
    interference_tolerance_w: float = math.inf


@dataclass(frozen=True)
class SimWindow:
    """Square observation window ``[0, side_km)^2`` with torus boundary."""

    side_km: float

    @property
    def area(self) -> float:
        return self.side_km * self.side_km

    @property
    def center(self) -> Position:
        h = self.side_km / 2.0
        return (h, h)


@dataclass(frozen=True)
class ChannelModel:
    path_loss_exponent: float = 4.0
    noise_power_w: float = 1e-12
    reference_distance_km: float = 1e-3


@dataclass(frozen=True)
class MobilityState:
    velocity: Position = (0.0, 0.0)


@dataclass(frozen=True)
class Station:
    station_id: int
    tier_id: int
    position: Position


@dataclass(frozen=True)
class UserTerminal:
    user_id: int
    position: Position
    accessible_tiers: frozenset[int]
    mobility_state: MobilityState = field(default_factory=MobilityState)


@dataclass(frozen=True)
class ScenarioConfig:
    tiers: tuple[TierConfig, ...]
    window: SimWindow
    channel: ChannelModel = field(default_factory=ChannelModel)
    # None means the window centre.
    center: Position | None = None
    frequency_plan: str = "per-tier"
    sinr_ceiling: float = 1e6

    @property
    def n_tiers(self) -> int:
        return len(self.tiers)

    def tier(self, tier_id: int) -> TierConfig:
        return self.tiers[tier_id - 1]

    @property
    def normalization_center(self) -> Position:
        return self.window.center if self.center is None else self.center

    def band_of(self, tier_id: int) -> int:
        """Frequency band index used by ``tier_id``."""
        return tier_id if self.frequency_plan == "per-tier" else 0


@dataclass(frozen=True)
class Association:
    """Serving map ``user_id -> (tier_id, station_id)``."""

    serving: Mapping[int, tuple[int, int]]

    def __getitem__(self, user_id: int) -> tuple[int, int]:
        return self.serving[user_id]

    def __len__(self) -> int:
        return len(self.serving)

    def station_of(self, user_id: int) -> int:
        return self.serving[user_id][1]

    def tier_of(self, user_id: int) -> int:
        return self.serving[user_id][0]

    def active_stations(self) -> set[int]:
        return {sid for _, sid in self.serving.values()}

    def moved(self, user_id: int, tier_id: int, station_id: int) -> Association:
        serving = dict(self.serving)
        serving[user_id] = (tier_id, station_id)
        return Association(serving)


def scenario_violations(scenario: ScenarioConfig) -> list[str]:
    """Every invariant violation in ``scenario``, as human-readable strings."""
    errors: list[str] = []
    if not scenario.tiers:
        errors.append("tiers must be nonempty")
    for idx, t in enumerate(scenario.tiers, start=1):
        where = f"tier {t.tier_id}"
        if t.tier_id != idx:
            errors.append(f"{where}: tier_id must be contiguous from 1 (expected {idx})")
        if not t.tx_power_w > 0:
            errors.append(f"{where}: tx_power_w must be > 0")
        if not t.station_intensity > 0:
            errors.append(f"{where}: station_intensity must be > 0")
        if not t.bandwidth_hz > 0:
            errors.append(f"{where}: bandwidth_hz must be > 0")
        if not t.circuit_power_w >= 0:
            errors.append(f"{where}: circuit_power_w must be >= 0")
        if not t.interference_tolerance_w > 0:
            errors.append(f"{where}: interference_tolerance_w must be > 0")
    if not scenario.window.side_km > 0 or math.isinf(scenario.window.side_km):
        errors.append("window.side_km must be > 0 and finite")
    ch = scenario.channel
    if not ch.path_loss_exponent > 2:
        errors.append("path_loss_exponent must exceed 2")
    if not ch.noise_power_w >= 0:
        errors.append("noise_power_w must be >= 0")
    if not ch.reference_distance_km > 0:
        errors.append("reference_distance_km must be > 0")
    if scenario.frequency_plan not in FREQUENCY_PLANS:
        errors.append(f"frequency_plan must be one of {', '.join(FREQUENCY_PLANS)}")
    if not scenario.sinr_ceiling > 0:
        errors.append("sinr_ceiling must be > 0")
    if scenario.center is not None:
        cx, cy = scenario.center
        side = scenario.window.side_km
        if not (0 <= cx < side and 0 <= cy < side):
            errors.append("center must lie inside the window")
    return errors


def validate_scenario(scenario: ScenarioConfig) -> ScenarioConfig:
    """Return ``scenario`` unchanged, or raise :class:`ScenarioError`."""
    errors = scenario_violations(scenario)
    if errors:
        raise ScenarioError(errors)
    return scenario


def association_violations(
    assoc: Association,
    users: list[UserTerminal],
    stations: list[Station],
) -> list[str]:
    """Totality and tier-consistency check, O(#users)."""
    tier_of_station = {s.station_id: s.tier_id for s in stations}
    errors = []
    for u in users:
        if u.user_id not in assoc.serving:
            errors.append(f"user {u.user_id} is not served")
            continue
        tier, sid = assoc.serving[u.user_id]
        if tier not in u.accessible_tiers:
            errors.append(f"user {u.user_id} served in inaccessible tier {tier}")
        if tier_of_station.get(sid) != tier:
            errors.append(f"user {u.user_id}: station {sid} is not in tier {tier}")
    if len(assoc.serving) != len(users):
        errors.append("association covers users outside the scenario")
    return errors
