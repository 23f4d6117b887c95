"""Certify and locate limit cycles of ``x'' + x' phi(x, x') + x = 0``.

The package checks, for a polynomial damping ``phi``, the hypotheses that
guarantee at most one (or exactly one) limit cycle, and then finds the
cycle numerically through a Poincare return map.
"""

__version__ = "0.1.0"

from .certify import (
    Method,
    StarShapeCertificate,
    Status,
    TrappingRegion,
    Verdict,
    VerdictKind,
    certify_star_shape,
    origin_sign,
    run_certificates,
    theorem_verdict,
    trapping_radius,
)
from .cycle import (
    CycleOptions,
    CycleResult,
    SectionCrossing,
    find_cycle,
    floquet_multiplier,
    next_crossing,
    nu_integral,
    return_map,
    return_map_slope,
)
from .dynamics import IntegratorOptions, State, Trajectory, integrate
from .errors import *  # noqa: F401,F403
from .model import PhiModel, build_model, builtin_model, etba, euler_family, model_from_source, qpoly
from .pipeline import analyze, certify_report
from .poly import BivariatePoly, UnivariatePoly, parse_phi
from .report import AnalysisReport
from .svg import plot_svg, render_svg
from .verify import (
    SweepReport,
    TrappingCheckResult,
    epsilon_sweep,
    origin_instability_check,
    trapping_check,
    uniqueness_sweep,
)
