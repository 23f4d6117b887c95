from .bivariate import (
    BivariatePoly,
    HomogeneousPart,
    angular_derivative,
    circle_divisor_radii,
    circle_min_max,
    eval_poly,
    homogeneous_decompose,
    partial,
    radial_derivative,
    ray_coefficients,
    restrict_to_ray,
)
from .parser import parse_phi, tokenize
from .univariate import (
    UnivariatePoly,
    count_real_roots,
    sturm_count,
    sturm_count_positive_roots,
    sturm_sequence,
)

__all__ = [
    "BivariatePoly",
    "HomogeneousPart",
    "UnivariatePoly",
    "angular_derivative",
    "circle_divisor_radii",
    "circle_min_max",
    "count_real_roots",
    "eval_poly",
    "homogeneous_decompose",
    "parse_phi",
    "partial",
    "radial_derivative",
    "ray_coefficients",
    "restrict_to_ray",
    "sturm_count",
    "sturm_count_positive_roots",
    "sturm_sequence",
    "tokenize",
]
