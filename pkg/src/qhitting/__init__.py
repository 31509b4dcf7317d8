"""Classical and Szegedy quantum hitting times on finite graphs."""

from .chains import (
    ReversedChain,
    absorb,
    classical_ht,
    classical_ht_spectral,
    hitting_time_matrix,
    kemeny,
    make_distribution,
    monte_carlo_ht,
    reversed_chain,
    stationary,
    transition_from_graph,
)
from .errors import QHittingError
from .graphs import (
    Graph,
    barabasi_albert,
    barbell,
    circulant_with_loops,
    erdos_renyi_directed,
    load_graph,
    make_graph,
    random_regular,
    save_graph,
)
from .harness import SweepSummary, emit_csv, node_sweep, trial_sweep
from .hitting import HitReport, che_bound, f_series, qhe_bound, quantum_ht, speedup_check
from .szegedy import SzegedyWalk, apply_walk, build_absorbing_walk, build_walk, initial_state, spectral

__all__ = [
    "Graph", "HitReport", "QHittingError", "ReversedChain", "SweepSummary", "SzegedyWalk",
    "absorb", "apply_walk", "barabasi_albert", "barbell", "build_absorbing_walk", "build_walk",
    "che_bound", "circulant_with_loops", "classical_ht", "classical_ht_spectral", "emit_csv",
    "erdos_renyi_directed", "f_series", "hitting_time_matrix", "initial_state", "kemeny", "load_graph",
    "make_distribution", "make_graph", "monte_carlo_ht", "node_sweep", "qhe_bound", "quantum_ht",
    "random_regular", "reversed_chain", "save_graph", "spectral", "speedup_check", "stationary",
    "transition_from_graph", "trial_sweep",
]
