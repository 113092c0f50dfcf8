"""Agent-based endogenous growth economy with education spreading over a social network."""

from .dynamics import AgentState, Population, counts, decide, initialize, step
from .economy import EconParams, team_density
from .harness import (
    EnsembleSummary, RunResult, SimConfig, Termination, count_partitions, run_ensemble,
    run_single, wall_series,
)
from .meanfield import calibrate, mf_fixed_point, mf_step
from .topology import (
    Graph, NetworkKind, NetworkSpec, SWMode, build_crg, build_ring, build_square,
    characteristic_path_length, clustering_coefficient, inverse_distance_sum, refresh_shortcuts,
    shortest_distances,
)

__version__ = "0.1.0"
