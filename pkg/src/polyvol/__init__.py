"""Volume estimation for convex H-polytopes by Hit-and-run and Multiphase Monte Carlo."""

from .errors import (
    DimensionMismatchError,
    EmptyPolytopeError,
    FlatSampleError,
    NotFullDimensionalError,
    NotPositiveDefiniteError,
    NumericalError,
    PhaseStarvedError,
    PivotLimitError,
    PolytopeError,
    StateDriftError,
    UnboundedDirectionError,
    UnboundedPolytopeError,
)
from .geometry import (
    AffineMap,
    Ball,
    Ellipsoid,
    HPolytope,
    ReducedPolytope,
    ball_volume,
    check_bounded,
    log_ball_volume,
    reduce_to_full_dimension,
)
from .lp import bounding_box, chebyshev_ball
from .rng import RngStream
from .rounding import apply_rounding, iterative_round, mvee
from .volume import (
    RunStatistics,
    VolumeEstimate,
    VolumeParams,
    ball_sequence,
    estimate_volume,
    estimate_with_statistics,
    sample_count,
)
from .walks import WalkParams, default_walk_length, sample_points

__version__ = "0.1.0"

__all__ = [
    "AffineMap", "Ball", "DimensionMismatchError", "Ellipsoid", "EmptyPolytopeError",
    "FlatSampleError", "HPolytope", "NotFullDimensionalError", "NotPositiveDefiniteError",
    "NumericalError", "PhaseStarvedError", "PivotLimitError", "PolytopeError",
    "ReducedPolytope", "RngStream", "RunStatistics", "StateDriftError",
    "UnboundedDirectionError", "UnboundedPolytopeError", "VolumeEstimate", "VolumeParams",
    "WalkParams", "apply_rounding", "ball_sequence", "ball_volume", "bounding_box",
    "chebyshev_ball", "check_bounded", "default_walk_length", "estimate_volume",
    "estimate_with_statistics", "iterative_round", "log_ball_volume", "mvee",
    "reduce_to_full_dimension", "sample_count", "sample_points",
]
