"""Gauss-Markov user mobility on the torus window.

Per velocity component: ``v' = beta*v + (1-beta)*mu + sigma*sqrt(1-beta^2)*w``
with ``w`` standard normal. Stations never move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .geometry import wrap_positions
from .model import MobilityState, SimWindow, UserTerminal


@dataclass(frozen=True)
class MobilityParams:
    memory: float = 0.85
    mean_velocity: tuple[float, float] = (0.0, 0.0)  # km/step
    sigma: float = 0.02  # km/step

    def __post_init__(self):
        if not 0.0 <= self.memory <= 1.0:
            raise ValueError("memory must lie in [0, 1]")
        if not self.sigma >= 0:
            raise ValueError("sigma must be >= 0")


def gm_velocities(v: np.ndarray, params: MobilityParams, noise: np.ndarray) -> np.ndarray:
    """Vectorised recursion on an ``(n, 2)`` velocity array given standard-normal ``noise``."""
    b = params.memory
    mu = np.asarray(params.mean_velocity, dtype=float)
    return b * v + (1.0 - b) * mu + params.sigma * math.sqrt(1.0 - b * b) * noise


def gm_step(state: MobilityState, params: MobilityParams, rng: np.random.Generator) -> MobilityState:
    w = rng.standard_normal(2)
    v = gm_velocities(np.asarray(state.velocity, dtype=float), params, w)
    return MobilityState((float(v[0]), float(v[1])))


def advance_positions(positions: np.ndarray, velocities: np.ndarray, params: MobilityParams,
                      window: SimWindow, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Array form of :func:`advance_users`: update velocities, then move and wrap."""
    v = gm_velocities(velocities, params, rng.standard_normal(velocities.shape))
    return wrap_positions(positions + v, window), v


def advance_users(users: Sequence[UserTerminal], params: MobilityParams, window: SimWindow,
                  rng: np.random.Generator) -> list[UserTerminal]:
    if not users:
        return []
    pos = np.array([u.position for u in users], dtype=float)
    vel = np.array([u.mobility_state.velocity for u in users], dtype=float)
    pos, vel = advance_positions(pos, vel, params, window, rng)
    return [
        replace(u, position=(float(p[0]), float(p[1])), mobility_state=MobilityState((float(v[0]), float(v[1]))))
        for u, p, v in zip(users, pos, vel)
    ]
