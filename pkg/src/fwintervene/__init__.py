"""Budgeted edge-weight reduction with Frank-Wolfe and generalized edge centrality."""

__version__ = "0.1.0"

from .baselines import (
    BASELINES,
    k_edge_deletion,
    top_k_ec_oneshot,
    uniform_reduction,
    weighted_reduction,
)
from .centrality import EdgeScoreList, static_scores, timevarying_scores
from .epidemic import (
    EpidemicParams,
    MetapopParams,
    SimulationTrace,
    simulate_graph,
    simulate_metapop,
    sweep_lambda_scaling,
)
from .errors import (
    DataError,
    DegenerateSpectrumWarning,
    FeasibilityError,
    GraphFormatError,
    GraphValidationError,
    InfeasibleBudgetError,
    InterventionError,
    NumericalError,
    ProductOverflowError,
    SvdConvergenceError,
)
from .graph import (
    BipartiteGraph,
    GraphSequence,
    WeightedGraph,
    bipartite_to_square,
    load_bipartite,
    load_edge_list,
    load_sequence,
    save_edge_list,
)
from .optimizer import (
    BudgetSpec,
    InterventionResult,
    LineSearchGrid,
    SvdOptions,
    check_result,
    frank_wolfe_static,
    frank_wolfe_timevarying,
    largest_singular_value,
    top_k_edge_centrality,
    top_k_timevarying,
)
from .svd import LinearOperator, SvdFactors, objective, truncated_svd
