"""Dilation-invariant comparison of persistence diagrams.

Exact bottleneck distances, grid searches over dilation factors with
provable error bounds, a shift-invariant distance on log-transformed
diagrams, a desk-scale Vietoris-Rips engine, Wasserstein barycenters,
and a template-retrieval pipeline, all behind one import.
"""
from . import errors
from .barycenter import (
    WassersteinMatching,
    frechet_mean,
    subsample_diagram,
    wasserstein2,
)
from .bottleneck import (
    Matching,
    bottleneck_bruteforce,
    bottleneck_distance,
    candidate_set,
    feasible,
    linf,
)
from .diagram import (
    EMPTY,
    DiagramStats,
    PersistenceDiagram,
    PersistencePoint,
    bd,
    cap_essential,
    drop_essential,
    exp_map,
    log_map,
    pers,
    pers_point,
    read_diagram,
    scale,
    shift,
    stats,
    write_diagram,
)
from .dilation import (
    DilationSearchResult,
    SearchInterval,
    base_interval,
    di_dissimilarity,
    di_symmetrized,
    error_bound,
    fine_grid_bruteforce,
    theta,
    tightened_interval,
)
from .logshift import (
    ShiftInterval,
    ShiftSearchResult,
    di_distance,
    shift_interval,
)
from .metric_spaces import (
    FiniteMetricSpace,
    cdf_euclidean,
    cdf_poincare,
    di_gromov_hausdorff,
    edge_cdf,
    gromov_hausdorff_bruteforce,
    ks_deviation,
    poincare_diameter,
    sample_circle,
)
from .retrieval import (
    ClassTemplate,
    RetrievalResult,
    build_templates,
    classify,
    evaluate,
    make_benchmark,
)
from .vr_persistence import (
    DEFAULT_MAX_SIMPLICES,
    Filtration,
    distance_matrix,
    persistence,
    read_distance_matrix,
    read_point_cloud,
    vr_diagram,
    vr_filtration,
)

__version__ = "0.1.0"

__all__ = [
    "EMPTY",
    "DEFAULT_MAX_SIMPLICES",
    "ClassTemplate",
    "DiagramStats",
    "DilationSearchResult",
    "Filtration",
    "FiniteMetricSpace",
    "Matching",
    "PersistenceDiagram",
    "PersistencePoint",
    "RetrievalResult",
    "SearchInterval",
    "ShiftInterval",
    "ShiftSearchResult",
    "WassersteinMatching",
    "base_interval",
    "bd",
    "bottleneck_bruteforce",
    "bottleneck_distance",
    "build_templates",
    "candidate_set",
    "cap_essential",
    "cdf_euclidean",
    "cdf_poincare",
    "classify",
    "di_dissimilarity",
    "di_distance",
    "di_gromov_hausdorff",
    "di_symmetrized",
    "distance_matrix",
    "drop_essential",
    "edge_cdf",
    "error_bound",
    "errors",
    "evaluate",
    "exp_map",
    "feasible",
    "fine_grid_bruteforce",
    "frechet_mean",
    "gromov_hausdorff_bruteforce",
    "ks_deviation",
    "linf",
    "log_map",
    "make_benchmark",
    "pers",
    "pers_point",
    "persistence",
    "poincare_diameter",
    "read_diagram",
    "read_distance_matrix",
    "read_point_cloud",
    "sample_circle",
    "scale",
    "shift",
    "shift_interval",
    "stats",
    "subsample_diagram",
    "theta",
    "tightened_interval",
    "vr_diagram",
    "vr_filtration",
    "wasserstein2",
    "write_diagram",
]
