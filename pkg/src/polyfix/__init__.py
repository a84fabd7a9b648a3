"""Contraction classes, exact coefficients and fixed points of self-maps of metric spaces."""

from .classify import (
    ClassificationReport,
    CoefficientResult,
    banach_coefficient,
    classify_all,
    kannan_coefficient,
    kannan_perimetric_coefficient,
    perimetric_coefficient,
    ratio_for_cycle,
    total_distance_coefficient,
)
from .dynamics import (
    fixed_point_theorem_check,
    fixed_points,
    kannan_theorem_check,
    orbit,
    periodic_points,
)
from .metric import (
    FiniteMetricSpace,
    SelfMap,
    apply_map,
    load_instance,
    perimeter,
    total_pairwise,
    validate_metric,
)
from .polygons import cycle_count, edge_frequency, hamiltonian_cycles, k_subsets

__version__ = "0.1.0"
