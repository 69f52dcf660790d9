"""Separated/spanning counts, cover join counts and entropy estimates."""

from ._backend import BACKEND, get_kernels
from .bowen import OrbitCache, bowen_distance, bowen_matrix, orbit_table
from .counts import (
    EXACT,
    EXACT_CAP,
    GREEDY,
    Ball,
    ball_cover,
    cover_join_count,
    max_separated,
    min_spanning,
    separated_count,
    spanning_count,
    sup_separated,
)
from .estimate import (
    COVER,
    METHODS,
    SEPARATED,
    SPANNING,
    SPANNING_X,
    EntropyEstimate,
    GrowthFit,
    SeparationCurve,
    count_curve,
    entropy_estimate,
    growth_rate,
    tail_entropy,
)

__all__ = [
    "BACKEND", "get_kernels", "OrbitCache", "bowen_distance", "bowen_matrix", "orbit_table",
    "EXACT", "EXACT_CAP", "GREEDY", "Ball", "ball_cover", "cover_join_count",
    "max_separated", "min_spanning", "separated_count", "spanning_count", "sup_separated",
    "COVER", "METHODS", "SEPARATED", "SPANNING", "SPANNING_X", "EntropyEstimate",
    "GrowthFit", "SeparationCurve", "count_curve", "entropy_estimate", "growth_rate",
    "tail_entropy",
]
