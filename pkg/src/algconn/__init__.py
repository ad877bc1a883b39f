"""Design of edge-weighted spanning-tree networks with maximum algebraic connectivity."""

__version__ = "0.1.0"

from .graph import (
    EdgeSelection,
    WeightedGraph,
    complete_graph,
    connected_components,
    edge_laplacian,
    enumerate_spanning_trees,
    is_spanning_tree,
    weighted_laplacian,
)
from .linalg import algebraic_connectivity, spectral_norm, sym_eigen
from .milp import Constraint, Model, MilpSolution, dual_bound, solve_lp, solve_milp
from .formulations import (
    DesignModel,
    PriorityOrders,
    base_relaxed_model,
    dclbf_model,
    degree_capped_model,
    restrict_mch,
    spanning_tree_oracle,
)
from .oa import (
    OAConfig,
    OAResult,
    initial_upper_bound,
    kelley_relaxation_bound,
    run_algorithm1,
    solve_exact,
)
from .heuristics import (
    HeuristicParams,
    HeuristicResult,
    best_star,
    max_weight_spanning_tree,
    mch,
    mch_degree_capped,
    min_weight_spanning_tree,
    ranking,
)
from .bruteforce import brute_force_optimum
from .localization import (
    NoiseModel,
    compare_topologies,
    covariance_lower_bound,
    dirichlet_laplacian,
    steady_state_covariance,
)
from .instances import (
    degree_histogram,
    generate_instances,
    instance_digest,
    read_instance,
    write_instance,
)
