"""Adaptive integration of ``x' = y, y' = -x - y phi(x, y)`` and pointwise fields.

The integrator is the Dormand-Prince 5(4) pair with local extrapolation,
FSAL reuse, a PI step-size controller and the standard fourth-order
continuous extension for dense output.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteState, StepSizeUnderflow

# Dormand & Prince (1980) coefficients
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = np.array([
    [0, 0, 0, 0, 0, 0],
    [1 / 5, 0, 0, 0, 0, 0],
    [3 / 40, 9 / 40, 0, 0, 0, 0],
    [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
])
B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
# fifth-order minus embedded fourth-order weights
E = np.array([71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension: y(t0 + s h) = y0 + h K^T P [s, s^2, s^3, s^4]
P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
# PI controller exponents (Hairer, Norsett & Wanner, DOPRI5 defaults)
BETA = 0.04
ALPHA = 0.2 - 0.75 * BETA


@dataclass(frozen=True)
class State:
    x: float
    y: float
    t: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.t)):
            raise ValueError("state components must be finite")

    @property
    def radius(self):
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class IntegratorOptions:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    t_end: float = 10.0
    direction: str = "forward"

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not 1e-14 <= v <= 1e-2:
                raise ValueError(f"{name}={v!r} outside [1e-14, 1e-2]")
        if self.direction not in ("forward", "reverse"):
            raise ValueError("direction must be 'forward' or 'reverse'")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")
        if not self.t_end >= 0:
            raise ValueError("t_end is a duration and must be nonnegative")

    @property
    def sign(self):
        return 1.0 if self.direction == "forward" else -1.0


def _rms(v):
    return math.sqrt(float(np.dot(v, v)) / v.size)


class DormandPrince:
    """Step-by-step Dormand-Prince 5(4) solver for ``u' = fun(t, u)``.

    Parameters
    ----------
    fun : callable
        ``fun(t, u)`` returning a sequence of the same length as ``u``.
    t0 : float
    u0 : array_like
    t_bound : float
        Integration stops exactly here; also fixes the direction.
    rel_tol, abs_tol : float
        Local error per step is kept below ``abs_tol + rel_tol * |u|``
        componentwise, in the RMS sense.
    max_step : float
    """

    def __init__(self, fun, t0, u0, t_bound, rel_tol=1e-10, abs_tol=1e-12,
                 max_step=math.inf, first_step=None):
        self.fun = fun
        self.t = float(t0)
        self.u = np.array(u0, dtype=float)
        self.t_bound = float(t_bound)
        self.rtol, self.atol = rel_tol, abs_tol
        self.max_step = max_step
        self.direction = 1.0 if self.t_bound >= self.t else -1.0
        self.n = self.u.size
        self.K = np.empty((7, self.n))
        self.f = np.asarray(fun(self.t, self.u), dtype=float)
        self.nfev = 1
        self.n_accepted = 0
        self.n_rejected = 0
        self.err_old = 1e-4
        self.finished = self.t == self.t_bound
        self.h_abs = first_step if first_step else self._initial_step()
        # dense output of the last accepted step
        self.t_old = None
        self.u_old = None
        self.Q = None

    def _initial_step(self):
        # Hairer, Norsett & Wanner, section II.4
        scale = self.atol + np.abs(self.u) * self.rtol
        d0, d1 = _rms(self.u / scale), _rms(self.f / scale)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, abs(self.t_bound - self.t))
        u1 = self.u + self.direction * h0 * self.f
        f1 = np.asarray(self.fun(self.t + self.direction * h0, u1), dtype=float)
        self.nfev += 1
        d2 = _rms((f1 - self.f) / scale) / h0
        if d1 <= 1e-15 and d2 <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** (1 / 5)
        return min(100 * h0, h1, self.max_step)

    def _try(self, h):
        K, fun, t, u = self.K, self.fun, self.t, self.u
        K[0] = self.f
        for s in range(1, 6):
            du = np.dot(K[:s].T, A[s, :s]) * h
            K[s] = fun(t + C[s] * h, u + du)
        u_new = u + h * np.dot(K[:6].T, B[:6])
        f_new = np.asarray(fun(t + h, u_new), dtype=float)
        K[6] = f_new
        self.nfev += 6
        err = h * np.dot(K.T, E)
        scale = self.atol + np.maximum(np.abs(u), np.abs(u_new)) * self.rtol
        return u_new, f_new, _rms(err / scale)

    def step(self):
        """Take one accepted step; returns False once ``t_bound`` is reached."""
        if self.finished:
            return False
        t = self.t
        min_step = 10 * abs(np.nextafter(t, self.direction * np.inf) - t)
        h_abs = min(self.h_abs, self.max_step)
        rejected = False
        while True:
            if h_abs < min_step:
                raise StepSizeUnderflow(f"step size underflow at t={t!r}", (t, self.u.copy()))
            h = h_abs * self.direction
            t_new = t + h
            if self.direction * (t_new - self.t_bound) > 0:
                t_new = self.t_bound
            h = t_new - t
            h_abs = abs(h)
            u_new, f_new, err = self._try(h)
            if not np.all(np.isfinite(u_new)):
                # treat as a failed step, shrink hard
                self.n_rejected += 1
                h_abs *= MIN_FACTOR
                rejected = True
                if not np.all(np.isfinite(self.u)):
                    raise NonFiniteState("non-finite state", (t, self.u.copy()))
                continue
            if err <= 1.0:
                if err == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = SAFETY * err ** -ALPHA * self.err_old ** BETA
                    factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
                if rejected:
                    factor = min(1.0, factor)
                self.err_old = max(err, 1e-4)
                break
            self.n_rejected += 1
            h_abs *= max(MIN_FACTOR, SAFETY * err ** -0.2)
            rejected = True

        self.t_old, self.u_old = t, self.u
        self.Q = np.dot(self.K.T, P)
        self.h_last = h
        self.t, self.u, self.f = t_new, u_new, f_new
        self.h_abs = h_abs * factor
        self.n_accepted += 1
        if self.t == self.t_bound:
            self.finished = True
        return True

    def dense(self, t):
        """State at ``t`` inside the last accepted step."""
        s = (t - self.t_old) / self.h_last
        return self.u_old + self.h_last * np.dot(self.Q, [s, s * s, s ** 3, s ** 4])

    def dense_derivative(self, t):
        s = (t - self.t_old) / self.h_last
        return np.dot(self.Q, [1.0, 2 * s, 3 * s * s, 4 * s ** 3])


class Trajectory:
    """Accepted steps of one integration with per-step dense output.

    Attributes
    ----------
    t : ndarray, shape (N,)
        Step endpoints, strictly monotone in the integration direction.
    u : ndarray, shape (N, n)
        States at ``t``.
    Q : ndarray, shape (N - 1, n, 4)
        Dense-output coefficients per step.
    stats : dict
        ``accepted``, ``rejected`` and ``nfev`` counts.
    """

    def __init__(self, t, u, Q, stats):
        self.t = np.asarray(t, dtype=float)
        self.u = np.asarray(u, dtype=float)
        self.Q = np.asarray(Q, dtype=float).reshape(max(len(t) - 1, 0), self.u.shape[1], 4)
        self.stats = dict(stats)

    def __len__(self):
        return len(self.t)

    @property
    def final(self):
        return self.u[-1]

    def states(self):
        return [State(float(u[0]), float(u[1]), float(t)) for t, u in zip(self.t, self.u)]

    def __call__(self, t):
        """Dense-output state at time(s) ``t`` within the integrated span."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        sign = 1.0 if len(self.t) < 2 or self.t[-1] >= self.t[0] else -1.0
        idx = np.searchsorted(sign * self.t, sign * t, side="left") - 1
        idx = np.clip(idx, 0, len(self.t) - 2)
        h = self.t[idx + 1] - self.t[idx]
        s = (t - self.t[idx]) / h
        powers = np.stack([s, s ** 2, s ** 3, s ** 4], axis=-1)
        out = self.u[idx] + h[:, None] * np.einsum("knj,kj->kn", self.Q[idx], powers)
        return out

    def to_csv(self, model, stream):
        """Write ``t,x,y,V,Vdot`` rows with 17 significant digits."""
        stream.write("t,x,y,V,Vdot\n")
        for t, u in zip(self.t, self.u):
            x, y = float(u[0]), float(u[1])
            row = (float(t), x, y, 0.5 * (x * x + y * y), -y * y * model.phi(x, y))
            stream.write(",".join(f"{v:.17g}" for v in row) + "\n")


def solve(fun, t0, u0, t_end, rel_tol=1e-10, abs_tol=1e-12, max_step=math.inf, stop=None):
    """Integrate ``fun`` from ``t0`` to ``t_end`` and return a :class:`Trajectory`.

    ``stop(solver)`` is called after every accepted step; a truthy return
    ends the integration early.
    """
    solver = DormandPrince(fun, t0, u0, t_end, rel_tol, abs_tol, max_step)
    ts, us, Qs = [solver.t], [solver.u.copy()], []
    while solver.step():
        ts.append(solver.t)
        us.append(solver.u.copy())
        Qs.append(solver.Q)
        if stop is not None and stop(solver):
            break
    stats = {"accepted": solver.n_accepted, "rejected": solver.n_rejected, "nfev": solver.nfev}
    return Trajectory(ts, us, Qs, stats)


# -- derived fields --------------------------------------------------------------

def vector_field(m, s):
    x, y = s.x, s.y
    return y, -x - y * m.phi(x, y)


def nu(m, s):
    """``-y^2 S(x, y)``; nonpositive for strictly positive star-shaped phi."""
    return -s.y * s.y * m.S(s.x, s.y)


def divergence(m, s):
    return m.div_poly(s.x, s.y)


def lyapunov_V(s):
    return 0.5 * (s.x * s.x + s.y * s.y)


def lyapunov_Vdot(m, s):
    return -s.y * s.y * m.phi(s.x, s.y)


def integrate(m, s0, opts=None, stop=None):
    """Trajectory of the model from ``s0`` for a duration ``opts.t_end``.

    Reverse direction runs time backwards, so stored times decrease from
    ``s0.t`` to ``s0.t - t_end``.
    """
    opts = opts or IntegratorOptions()
    t_final = s0.t + opts.sign * opts.t_end
    return solve(m.rhs, s0.t, [s0.x, s0.y], t_final, opts.rel_tol, opts.abs_tol,
                 opts.max_step, stop=stop)
