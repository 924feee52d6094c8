"""Point-process sampling, power-normalised scaling and the converged topology.

A tier-k station at ``x`` with power ``P_k`` delivers ``P_k * |x - O|^-alpha``
to a receiver at the normalisation centre ``O``. Moving the station to
``O + P_k^(-1/alpha) * (x - O)`` with unit power delivers the same amount, so
every tier can be folded into a single unit-power node set. The identity holds
at ``O`` only; simulation-time interference is always computed in original
coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import Position, SimWindow, Station, UserTerminal

NodeRef = tuple[str, int]  # ("bs", station_id) or ("ue", user_id)

LINK_KINDS = ("desired", "interference", "virtual-internode")


class TopologyError(ValueError):
    pass


class _InfiniteWeight:
    """Weight of a virtual inter-node link.

    Compares above every finite weight; arithmetic on it raises ``TypeError``.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF_WEIGHT"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_InfiniteWeight, ())

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF_WEIGHT = _InfiniteWeight()


def is_infinite_weight(w) -> bool:
    return w is INF_WEIGHT


@dataclass(frozen=True)
class TierLayout:
    tier_id: int
    stations: tuple[Station, ...]

    @property
    def points(self) -> np.ndarray:
        return np.array([s.position for s in self.stations], dtype=float).reshape(-1, 2)


@dataclass(frozen=True)
class TopologyLink:
    from_node: object
    to_node: object
    kind: str
    weight: object = 0.0

    def __post_init__(self):
        if self.kind not in LINK_KINDS:
            raise TopologyError(f"unknown link kind {self.kind!r}")
        if self.kind == "virtual-internode":
            if self.weight is not INF_WEIGHT:
                raise TopologyError("virtual-internode links must carry INF_WEIGHT")
        elif self.weight is INF_WEIGHT or not self.weight >= 0:
            raise TopologyError(f"{self.kind} link weight must be finite and >= 0")


@dataclass(frozen=True)
class ConvergedNode:
    node_id: int
    scaled_position: Position
    origin_ref: NodeRef
    tier_id: int  # 0 for an unsplit user node
    scale_factor: float = 1.0
    normalized_power: float = 1.0


@dataclass(frozen=True)
class ConvergedTopology:
    center: Position
    nodes: tuple[ConvergedNode, ...]
    links: tuple[TopologyLink, ...]

    def node_of(self, ref: NodeRef) -> ConvergedNode:
        for n in self.nodes:
            if n.origin_ref == ref:
                return n
        raise KeyError(ref)


def sample_ppp(intensity: float, window: SimWindow, seed=None) -> np.ndarray:
    """Homogeneous PPP on the window: Poisson count, i.i.d. uniform positions.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    if not intensity > 0:
        raise ValueError("intensity must be > 0")
    rng = np.random.default_rng(seed)
    n = rng.poisson(intensity * window.area)
    pts = rng.uniform(0.0, window.side_km, size=(n, 2))
    # uniform() may round up to the upper bound
    pts[pts >= window.side_km] = 0.0
    return pts


def wrap_positions(points, window: SimWindow) -> np.ndarray:
    side = window.side_km
    out = np.mod(np.asarray(points, dtype=float), side)
    out[out >= side] = 0.0
    return out


def torus_displacement(points, center, window: SimWindow | None = None) -> np.ndarray:
    """``points - center``, folded to the minimal image when a window is given."""
    d = np.asarray(points, dtype=float) - np.asarray(center, dtype=float)
    if window is not None:
        side = window.side_km
        d = d - side * np.round(d / side)
    return d


def torus_distance(a, b, window: SimWindow) -> float:
    side = window.side_km
    dx = abs(a[0] - b[0]) % side
    dy = abs(a[1] - b[1]) % side
    dx = min(dx, side - dx)
    dy = min(dy, side - dy)
    return math.hypot(dx, dy)


def scale_points(points, tx_power_w, alpha, center, window: SimWindow | None = None,
                 strict: bool = True) -> np.ndarray:
    """Map tier points onto unit-power virtual positions relative to ``center``.

    ``tx_power_w`` and ``alpha`` are scalars or one value per point.
    ``strict=False`` admits any ``alpha > 0`` (identity checks at alpha = 2).
    """
    p = np.asarray(tx_power_w, dtype=float)
    a = np.asarray(alpha, dtype=float)
    if not np.all(p > 0):
        raise ValueError("tx_power_w must be > 0")
    if not np.all(a > 2 if strict else a > 0):
        raise ValueError("path_loss_exponent must exceed 2")
    factor = p ** (-1.0 / a)
    if factor.ndim:
        factor = factor[..., None]
    return factor * torus_displacement(points, center, window)


def build_converged_topology(
    layouts: Sequence[TierLayout],
    users: Sequence[UserTerminal],
    links: Iterable[TopologyLink],
    alpha: float,
    center,
    tx_power: Mapping[int, float],
    window: SimWindow | None = None,
) -> ConvergedTopology:
    """Union of the scaled tier layouts plus user nodes, links carried over as given.

    Input links address endpoints by ``NodeRef``; in the result they address
    ``node_id``. User nodes are translated to the centre but not scaled.
    """
    nodes: list[ConvergedNode] = []
    index: dict[NodeRef, int] = {}
    for layout in layouts:
        p = tx_power[layout.tier_id]
        factor = p ** (-1.0 / alpha)
        scaled = scale_points(layout.points, p, alpha, center, window)
        for st, xy in zip(layout.stations, scaled):
            ref = ("bs", st.station_id)
            if ref in index:
                raise TopologyError(f"duplicate station {st.station_id}")
            index[ref] = len(nodes)
            nodes.append(ConvergedNode(len(nodes), (float(xy[0]), float(xy[1])), ref, layout.tier_id, factor))
    for u in users:
        ref = ("ue", u.user_id)
        if ref in index:
            raise TopologyError(f"duplicate user {u.user_id}")
        xy = torus_displacement(u.position, center, window)
        index[ref] = len(nodes)
        nodes.append(ConvergedNode(len(nodes), (float(xy[0]), float(xy[1])), ref, 0))

    mapped = []
    for link in links:
        try:
            a, b = index[link.from_node], index[link.to_node]
        except KeyError as exc:
            raise TopologyError(f"link references unknown entity {exc.args[0]!r}") from None
        mapped.append(TopologyLink(a, b, link.kind, link.weight))
    return ConvergedTopology((float(center[0]), float(center[1])), tuple(nodes), tuple(mapped))


def split_multimode_node(
    user: UserTerminal,
    modes: Iterable[int],
    alpha: float,
    center,
    tx_power: Mapping[int, float],
    first_node_id: int = 0,
    window: SimWindow | None = None,
) -> tuple[list[ConvergedNode], list[TopologyLink]]:
    """One virtual single-mode node per tier, joined in a star on the first mode."""
    modes = sorted(set(modes))
    if not modes:
        raise ValueError("modes must be nonempty")
    nodes = []
    for i, k in enumerate(modes):
        factor = tx_power[k] ** (-1.0 / alpha)
        xy = factor * torus_displacement(user.position, center, window)
        nodes.append(ConvergedNode(first_node_id + i, (float(xy[0]), float(xy[1])),
                                   ("ue", user.user_id), k, factor))
    hub = nodes[0].node_id
    links = [TopologyLink(hub, n.node_id, "virtual-internode", INF_WEIGHT) for n in nodes[1:]]
    return nodes, links


def converged_received_power(node: ConvergedNode, alpha: float, d_min: float) -> float:
    """Unit-power signal at the centre from a converged node.

    The clamp is the original ``d_min`` carried through the node's scaling.
    """
    d = math.hypot(*node.scaled_position)
    return max(d, node.scale_factor * d_min) ** (-alpha)


def to_edge_list(topology: ConvergedTopology) -> str:
    lines = []
    for n in topology.nodes:
        kind, oid = n.origin_ref
        lines.append(f"N {n.node_id} {n.scaled_position[0]!r} {n.scaled_position[1]!r} {n.tier_id} {kind}:{oid}")
    for link in topology.links:
        w = "inf" if link.weight is INF_WEIGHT else repr(float(link.weight))
        lines.append(f"L {link.from_node} {link.to_node} {link.kind} {w}")
    return "\n".join(lines) + "\n"


def from_edge_list(text: str) -> ConvergedTopology:
    """Inverse of :func:`to_edge_list`; the centre is not stored and reads as the origin."""
    nodes, links = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "N" and len(parts) == 6:
            kind, oid = parts[5].split(":")
            nodes.append(ConvergedNode(int(parts[1]), (float(parts[2]), float(parts[3])),
                                       (kind, int(oid)), int(parts[4])))
        elif parts[0] == "L" and len(parts) == 5:
            w = INF_WEIGHT if parts[4] == "inf" else float(parts[4])
            links.append(TopologyLink(int(parts[1]), int(parts[2]), parts[3], w))
        else:
            raise TopologyError(f"line {lineno}: malformed record {raw!r}")
    return ConvergedTopology((0.0, 0.0), tuple(nodes), tuple(links))
