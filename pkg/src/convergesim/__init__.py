"""Converged-topology simulator for mobile multi-tier heterogeneous networks."""

from .channel import (
    ConflictPartition,
    InterferenceReport,
    LinkBudget,
    aggregate_interference,
    association_links,
    classify_conflict_domains,
    interference_at_user,
    received_power,
    sinr,
)
from .config import ConfigError, ExperimentConfig, load_config, parse_config, render_config
from .geometry import (
    INF_WEIGHT,
    ConvergedNode,
    ConvergedTopology,
    TierLayout,
    TopologyError,
    TopologyLink,
    build_converged_topology,
    from_edge_list,
    sample_ppp,
    scale_points,
    split_multimode_node,
    to_edge_list,
    torus_distance,
)
from .kernels import BACKEND
from .metrics import SweepPoint, SweepResult, aggregate_drops, normalize_curves, normalized_user_intensity, trend_monotone
from .mobility import MobilityParams, advance_users, gm_step
from .model import (
    Association,
    ChannelModel,
    MobilityState,
    ScenarioConfig,
    ScenarioError,
    SimWindow,
    Station,
    TierConfig,
    UserTerminal,
    validate_scenario,
)
from .output import write_csv, write_plot
from .runner import DropResult, run_drop, run_sweep
from .schemes import (
    InfeasibleError,
    OptimizerTrace,
    SearchSpaceError,
    associate_max_sinr,
    brute_force_best_association,
    energy_efficiency,
    minimize_interference,
    network_flow,
    optimize_energy_efficiency,
    total_power,
)

__version__ = "0.1.0"
