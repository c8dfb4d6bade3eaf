"""Online edge-orientation simulators with expander-decomposition machinery."""

from .arrivals import ArrivalStream, product_pair_stream, uniform_edge_stream
from .decomposition import (
    Decomposition,
    DecompositionPart,
    InvariantViolation,
    PeeledComponent,
    SubgraphCertificate,
    check_no_dense_subgraph,
    decompose_expanders,
    decomposition_from_json,
    decomposition_to_json,
    default_alpha,
    find_sparse_cut,
    full_decomposition,
    load_decomposition,
    peel_uniformly_dense,
)
from .graph import (
    EXACT_LIMIT,
    Cut,
    Graph,
    build_graph,
    conductance_exact,
    cut_stats,
    densest_subgraph,
    is_uniformly_dense,
    is_weakly_regular,
    read_edge_list,
    sweep_cut,
    write_edge_list,
)
from .harness import (
    DriftEstimate,
    ExperimentConfig,
    PrefixCheckReport,
    RunRecord,
    drift_estimate,
    good_prefix_check,
    run_experiment,
    write_decomposition_json,
    write_run_csv,
)
from .orientation import (
    OrientationState,
    OrientedEdge,
    composed_step,
    discrepancy_of,
    greedy_step,
    majorizes,
    offline_orient,
    one_plus_beta_step,
    potential,
    potential_delta,
    random_step,
)

__version__ = "0.1.0"
