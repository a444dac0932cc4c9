"""Gromov-Hausdorff distance estimates between constant-curvature model
spaces, and a weighted search graph over product signatures."""

from .embedding import (
    EmbeddingConstants,
    bump,
    bump_integral,
    bump_prefix,
    cached_constants,
    compute_constants,
    diagnostics_report,
    embed_cloud,
    embed_h2,
    embed_hn,
    pullback_metric,
    spiral_frame,
    spiral_pair,
)
from .errors import (
    ChartError,
    ConvergenceError,
    ConvergenceWarning,
    EvaluationError,
    GHSpaceError,
    NumericalError,
    ParameterError,
)
from .gh import (
    CandidateGridSpec,
    CandidateScorer,
    DistanceTable,
    EmbeddingCandidate,
    GHEstimate,
    analytic_gh_e2_s2,
    apply_candidate,
    build_distance_table,
    default_distance_table,
    diameter_bound,
    enumerate_euclidean_candidates,
    enumerate_sphere_candidates,
    estimate_gh,
    signature_distance,
)
from .geometry import (
    E2,
    H2,
    ModelSpace,
    PointCloud,
    ProductSignature,
    S2,
    SamplingSpec,
    disk_to_horocyclic,
    exp_map_h2,
    geodesic_diameter,
    sample_euclidean_ball,
    sample_hyperbolic_ball,
    sample_sphere_cap,
)
from .hausdorff import (
    HausdorffResult,
    NearestNeighborIndex,
    build_nn_index,
    directed_hausdorff_earlybreak,
    directed_hausdorff_naive,
    hausdorff_accelerated,
    hausdorff_earlybreak,
    hausdorff_naive,
    nn_distance,
)
from .quadrature import QuadratureSpec, adaptive_simpson
from .search_space import (
    Evaluator,
    SearchGraph,
    SearchResult,
    build_graph,
    export_graph,
    graph_from_json,
    make_evaluator,
    search_best_first,
    search_exhaustive,
    search_greedy,
)

__version__ = "0.1.0"
