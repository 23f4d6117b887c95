"""Return map on the half-line ``{y = 0, x > 0}`` and limit-cycle location.

Orbits of ``x' = y, y' = -x - y phi`` cross the section downward
(``y' = -x < 0`` there), so the section is transversal and cycles are
fixed points of the return map ``R``. Stability functionals along a cycle
ride the integrator as extra state components.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import DormandPrince, State, solve
from .errors import (
    CycleNotConverged,
    EscapedError,
    HitOriginError,
    NoBracketError,
    NoCrossingError,
    PreconditionError,
)

TWO_PI = 2.0 * math.pi
ORIGIN_RADIUS = 1e-13
ESCAPE_RADIUS = 1e6
DEPARTURE_SKIP = 1e-6


@dataclass(frozen=True)
class CycleOptions:
    """Numerical settings shared by the return map and the period integration."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    t_max: float = 100.0 * TWO_PI
    r_search_max: float = 1e3
    max_iter: int = 200
    residual_tol: float = 1e-10
    n_samples: int = 512
    max_steps: int = 100_000


DEFAULT_OPTIONS = CycleOptions()


@dataclass(frozen=True)
class SectionCrossing:
    t: float
    x: float
    y: float = 0.0
    direction: str = "Downward"


@dataclass(frozen=True)
class CycleResult:
    """A converged fixed point of the return map and the orbit through it.

    ``samples`` has one ``(t, x, y)`` row per uniform time sample over one
    period, both endpoints included.
    """

    x_star: float
    period: float
    floquet_multiplier: float
    nu_integral: float
    closure_error: float
    samples: np.ndarray = field(repr=False)
    residual: float = 0.0
    iterations: int = 0

    def to_json(self):
        return {
            "x_star": self.x_star,
            "period": self.period,
            "floquet_multiplier": self.floquet_multiplier,
            "nu_integral": self.nu_integral,
            "closure_error": self.closure_error,
            "residual": self.residual,
            "iterations": self.iterations,
            "samples": [[float(v) for v in row] for row in self.samples],
        }

    @classmethod
    def from_json(cls, d):
        return cls(
            x_star=d["x_star"], period=d["period"],
            floquet_multiplier=d["floquet_multiplier"], nu_integral=d["nu_integral"],
            closure_error=d["closure_error"], samples=np.array(d["samples"], dtype=float),
            residual=d["residual"], iterations=d["iterations"],
        )

    def __eq__(self, other):
        if not isinstance(other, CycleResult):
            return NotImplemented
        return self.to_json() == other.to_json()

    def samples_csv(self, stream):
        stream.write("t,x,y\n")
        for row in self.samples:
            stream.write(",".join(f"{float(v):.17g}" for v in row) + "\n")


def _refine_crossing(solver, tol):
    """Safeguarded Newton on the dense-output ``y(t)`` inside the last step."""
    a, b = solver.t_old, solver.t
    ya, yb = solver.u_old[1], solver.u[1]
    if yb == 0.0:
        return b, solver.u.copy()
    t = b - yb * (b - a) / (yb - ya)
    for _ in range(60):
        u = solver.dense(t)
        y = u[1]
        if abs(y) <= tol * (1.0 + abs(u[0])):
            return t, u
        # keep [a, b] bracketing the sign change; y goes + to -
        if (y > 0) == (solver.direction > 0):
            a = t
        else:
            b = t
        dy = solver.dense_derivative(t)[1]
        t_new = t - y / dy if dy != 0 else 0.5 * (a + b)
        lo, hi = min(a, b), max(a, b)
        if not lo < t_new < hi:
            t_new = 0.5 * (a + b)
        if t_new == t:
            break
        t = t_new
    return t, solver.dense(t)


def next_crossing(m, s0, options=DEFAULT_OPTIONS):
    """First downward crossing of ``{y = 0, x > 0}`` after leaving ``s0``.

    Raises
    ------
    NoCrossingError
        No crossing within ``options.t_max``.
    HitOriginError
        The orbit fell within ``1e-13`` of the equilibrium.
    EscapedError
        The orbit left the disk of radius ``1e6``.

    The step budget ``options.max_steps`` also ends the search with
    :class:`NoCrossingError`; stiff stretches (very large ``phi``) exhaust
    it long before ``t_max`` because the explicit scheme is stability-bound.
    """
    if s0.x == 0.0 and s0.y == 0.0:
        raise PreconditionError("the equilibrium has no return map")
    solver = DormandPrince(m.rhs, s0.t, [s0.x, s0.y], s0.t + options.t_max,
                           options.rel_tol, options.abs_tol)
    t_skip = s0.t + DEPARTURE_SKIP
    while solver.step():
        if solver.n_accepted > options.max_steps:
            raise NoCrossingError(
                f"step budget of {options.max_steps} exhausted at t={solver.t!r} (stiff?)",
                (solver.t, solver.u.copy()))
        u_old, u = solver.u_old, solver.u
        r = math.hypot(u[0], u[1])
        if r < ORIGIN_RADIUS:
            raise HitOriginError("trajectory reached the origin", (solver.t, u.copy()))
        if r > ESCAPE_RADIUS or not math.isfinite(r):
            raise EscapedError("trajectory escaped", (solver.t, u.copy()))
        if u_old[1] > 0.0 and u[1] <= 0.0 and solver.t > t_skip:
            tc, uc = _refine_crossing(solver, 1e-12)
            if tc > t_skip and uc[0] > 0.0:
                return SectionCrossing(float(tc), float(uc[0]), float(uc[1]))
    raise NoCrossingError(f"no section crossing within t_max={options.t_max!r}",
                          (solver.t, solver.u.copy()))


def return_map(m, x0, options=DEFAULT_OPTIONS):
    """``(x1, T)``: next section coordinate and return time starting from ``(x0, 0)``."""
    if not x0 > 0:
        raise PreconditionError("x0 must be positive")
    c = next_crossing(m, State(float(x0), 0.0, 0.0), options)
    return c.x, c.t


def _augmented_run(m, x, y, duration, options, n_samples=None):
    """Integrate state plus the nu and divergence quadratures for ``duration``.

    A negative duration runs the orbit backwards.
    """
    traj = solve(m.rhs_augmented, 0.0, [x, y, 0.0, 0.0], duration,
                 options.rel_tol, options.abs_tol)
    samples = None
    if n_samples:
        ts = np.linspace(0.0, duration, n_samples + 1)
        ts[-1] = duration
        dense = traj(ts)
        dense[0], dense[-1] = traj.u[0], traj.u[-1]
        samples = np.column_stack([ts, dense[:, 0], dense[:, 1]])
    return traj.u[-1], samples


def _start_and_span(samples):
    samples = samples.samples if isinstance(samples, CycleResult) else np.asarray(samples)
    t0, x0, y0 = samples[0]
    return float(x0), float(y0), float(samples[-1][0] - t0)


def floquet_multiplier(m, samples, options=DEFAULT_OPTIONS):
    """``exp`` of the divergence integrated once around the orbit.

    ``samples`` (or a :class:`CycleResult`) provides the starting point and
    the span; samples ordered backwards in time give the reversed traversal.
    """
    x, y, span = _start_and_span(samples)
    end, _ = _augmented_run(m, x, y, span, options)
    return math.exp(end[3])


def nu_integral(m, samples, options=DEFAULT_OPTIONS):
    """``integral of -y^2 S`` once around the orbit."""
    x, y, span = _start_and_span(samples)
    end, _ = _augmented_run(m, x, y, span, options)
    return float(end[2])


def return_map_slope(m, x_star, h=None, options=DEFAULT_OPTIONS):
    """Central difference ``(R(x + h) - R(x - h)) / 2h``."""
    if h is None:
        h = 1e-4 * x_star
    if not 1e-7 * x_star * (1 - 1e-12) <= h <= 1e-2 * x_star * (1 + 1e-12):
        raise PreconditionError("h must lie in [1e-7, 1e-2] * x_star")
    up, _ = return_map(m, x_star + h, options)
    down, _ = return_map(m, x_star - h, options)
    return (up - down) / (2.0 * h)


def _bracket(G, x_init, options):
    x = float(x_init)
    g = G(x)
    if g == 0.0:
        return (x, g), (x, g)
    outward = g > 0
    while True:
        x_next = 2.0 * x if outward else 0.5 * x
        if x_next > options.r_search_max or x_next < 1e-6:
            raise NoBracketError(
                f"return-map residual keeps its sign from x={x_init!r} to x={x!r}")
        g_next = G(x_next)
        if (g_next > 0) != (g > 0) or g_next == 0.0:
            return (x, g), (x_next, g_next)
        x, g = x_next, g_next


def find_cycle(m, x_init, options=DEFAULT_OPTIONS):
    """Locate the fixed point of the return map and measure the cycle through it.

    The residual ``G(x) = R(x) - x`` is bracketed by doubling or halving
    from ``x_init``, then solved by secant steps that fall back to bisection
    whenever they leave the bracket or stop shrinking it.
    """
    if not x_init > 0:
        raise PreconditionError("x_init must be positive")
    periods = {}

    def G(x):
        x1, T = return_map(m, x, options)
        periods[x] = T
        return x1 - x

    def converged(x, g):
        return abs(g) <= options.residual_tol * (1.0 + abs(x))

    (x0, g0), (x1, g1) = _bracket(G, x_init, options)
    lo, glo, hi, ghi = (x0, g0, x1, g1) if x0 < x1 else (x1, g1, x0, g0)
    best = min([(abs(g0), x0, g0), (abs(g1), x1, g1)])
    iterations = 0
    width_two_ago = width_one_ago = 2.0 * (hi - lo)
    while not converged(best[1], best[2]):
        if iterations >= options.max_iter:
            raise CycleNotConverged(f"no convergence in {options.max_iter} iterations")
        iterations += 1
        if g1 != g0:
            xs = x1 - g1 * (x1 - x0) / (g1 - g0)
        else:
            xs = 0.5 * (lo + hi)
        # bisect when the secant leaves the bracket or the bracket stalls
        if not lo < xs < hi or (hi - lo) > 0.5 * width_two_ago:
            xs = 0.5 * (lo + hi)
        if xs <= lo or xs >= hi:
            break
        gs = G(xs)
        if (gs > 0) == (glo > 0):
            lo, glo = xs, gs
        else:
            hi, ghi = xs, gs
        width_two_ago, width_one_ago = width_one_ago, hi - lo
        x0, g0, x1, g1 = x1, g1, xs, gs
        if abs(gs) < best[0]:
            best = (abs(gs), xs, gs)
    _, x_star, residual = best
    if not converged(x_star, residual):
        raise CycleNotConverged(
            f"bracket collapsed at x={x_star!r} with residual {residual!r}")
    period = periods[x_star]
    end, samples = _augmented_run(m, x_star, 0.0, period, options, options.n_samples)
    closure = math.hypot(end[0] - x_star, end[1])
    return CycleResult(
        x_star=float(x_star), period=float(period),
        floquet_multiplier=math.exp(end[3]), nu_integral=float(end[2]),
        closure_error=float(closure), samples=samples,
        residual=float(residual), iterations=iterations,
    )
