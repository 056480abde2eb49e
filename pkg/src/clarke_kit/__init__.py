"""Sampling-based approximation of Clarke subdifferentials of extended-real-valued functions."""

from .functions import ExtendedFunction, ReferenceSubdifferential, cantor_value, catalog, fd_gradient, lookup
from .geometry import (
    FiniteCone,
    MinkowskiSet,
    Polytope,
    boundary_generates_cone_check,
    caratheodory_reduce,
    cone_is_pointed,
    contains,
    distance_to_minkowski,
    min_norm_point,
    support_value,
)
from .sampler import (
    GradientCloud,
    SamplingConfig,
    StationarityReport,
    SubdifferentialEstimate,
    assemble_estimate,
    build_cloud,
    estimate_distance,
    hausdorff_vs_reference,
    lifted_slice,
    sample_ball,
)

__version__ = "0.1.0"
