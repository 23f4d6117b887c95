"""Empirical campaigns that check the certified conclusions against orbits."""

import math
from dataclasses import dataclass, field

import numpy as np

from .certify import VerdictKind, run_certificates
from .cycle import DEFAULT_OPTIONS, TWO_PI, CycleResult, find_cycle
from .dynamics import DormandPrince, IntegratorOptions
from .errors import (
    CycleNotConverged,
    EscapedError,
    HitOriginError,
    IntegrationError,
    NoBracketError,
    NoCrossingError,
    NoEntryError,
    PreconditionError,
)
from .model import model_from_source
from .poly import circle_min_max, parse_phi

DEFAULT_T_MAX = 1e3 * TWO_PI


@dataclass(frozen=True)
class SweepEntry:
    x_init: float
    outcome: str
    x_star: float | None = None
    period: float | None = None
    message: str = ""

    def to_json(self):
        return {"x_init": self.x_init, "outcome": self.outcome, "x_star": self.x_star,
                "period": self.period, "message": self.message}

    @classmethod
    def from_json(cls, d):
        return cls(**d)


@dataclass(frozen=True)
class SweepReport:
    entries: tuple
    consensus_x_star: float | None
    max_spread: float

    @property
    def converged(self):
        return [e for e in self.entries if e.outcome == "Converged"]

    def to_json(self):
        return {"entries": [e.to_json() for e in self.entries],
                "consensus_x_star": self.consensus_x_star, "max_spread": self.max_spread}

    @classmethod
    def from_json(cls, d):
        return cls(tuple(SweepEntry.from_json(e) for e in d["entries"]),
                   d["consensus_x_star"], d["max_spread"])


@dataclass(frozen=True)
class TrappingCheckResult:
    entered_at: float | None
    stayed: bool
    max_V_after_entry: float

    def to_json(self):
        return {"entered_at": self.entered_at, "stayed": self.stayed,
                "max_V_after_entry": self.max_V_after_entry}

    @classmethod
    def from_json(cls, d):
        return cls(**d)


def default_radii(sigma):
    """16 log-spaced seeds in ``[s / 20, 8 s]`` with ``s = sigma`` (or 1 without one)."""
    s = sigma if sigma and sigma > 0 else 1.0
    return list(np.geomspace(s / 20.0, 8.0 * s, 16))


def _sweep_entry(m, x_init, options):
    try:
        c = find_cycle(m, x_init, options)
    except NoBracketError as exc:
        return SweepEntry(x_init, "NoBracket", message=str(exc))
    except EscapedError as exc:
        return SweepEntry(x_init, "Escaped", message=str(exc))
    except HitOriginError as exc:
        return SweepEntry(x_init, "HitOrigin", message=str(exc))
    except (NoCrossingError, CycleNotConverged, IntegrationError) as exc:
        return SweepEntry(x_init, "Failed", message=f"{type(exc).__name__}: {exc}")
    return SweepEntry(x_init, "Converged", c.x_star, c.period)


def uniqueness_sweep(m, radii, options=DEFAULT_OPTIONS):
    """Run :func:`find_cycle` from every seed and check that they agree.

    A consensus value is reported when at least two seeds converge and the
    spread of their fixed points is within ``1e-6 * (1 + x_star)``.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 3 or any(r <= 0 for r in radii):
        raise PreconditionError("need at least three positive seed radii")
    entries = tuple(_sweep_entry(m, r, options) for r in radii)
    xs = [e.x_star for e in entries if e.outcome == "Converged"]
    spread = float(max(xs) - min(xs)) if xs else 0.0
    consensus = None
    if len(xs) >= 2:
        mid = float(np.median(xs))
        if spread <= 1e-6 * (1.0 + mid):
            consensus = mid
    return SweepReport(entries, consensus, spread)


def trapping_check(m, sigma, start_radius, t_max=DEFAULT_T_MAX, dwell=20.0 * TWO_PI,
                   opts=None):
    """Follow the orbit from ``(start_radius, 0)`` into ``D_sigma`` and watch it stay.

    After the first entry the orbit is followed for ``dwell`` more time
    units; ``V`` is checked at every step end and at interior dense-output
    points.

    Raises
    ------
    NoEntryError
        The disk is not reached within ``t_max``; this is inconclusive,
        not a refutation.
    """
    if not start_radius > sigma:
        raise PreconditionError("start_radius must exceed sigma")
    opts = opts or IntegratorOptions()
    solver = DormandPrince(m.rhs, 0.0, [start_radius, 0.0], t_max, opts.rel_tol, opts.abs_tol)
    v_disk = 0.5 * sigma * sigma
    entered_at = None
    v_max = -math.inf
    stop_at = math.inf
    while solver.t < stop_at and solver.step():
        u = solver.u
        if entered_at is None:
            if 0.5 * (u[0] ** 2 + u[1] ** 2) <= v_disk:
                entered_at = solver.t
                stop_at = solver.t + dwell
                v_max = 0.5 * (u[0] ** 2 + u[1] ** 2)
            continue
        for s in (0.25, 0.5, 0.75, 1.0):
            w = solver.dense(solver.t_old + s * solver.h_last)
            v_max = max(v_max, 0.5 * (w[0] ** 2 + w[1] ** 2))
    if entered_at is None:
        raise NoEntryError(f"no entry into D_sigma within t_max={t_max!r}")
    return TrappingCheckResult(float(entered_at), bool(v_max <= v_disk * (1 + 1e-6)),
                               float(v_max))


def origin_instability_check(m, radius=0.05, t_max=DEFAULT_T_MAX, opts=None):
    """True iff the reversed-time orbit from ``(radius, 0)`` reaches ``radius / 100``.

    Requires ``phi < 0`` on the whole disk of the given radius.
    """
    phi = m.phi
    if not phi.coefficient(0, 0) < 0:
        raise PreconditionError("phi(0, 0) must be negative")
    for r in np.linspace(radius / 32, radius, 32):
        if circle_min_max(-phi, float(r), 256)[0] <= 0:
            raise PreconditionError(f"phi is not negative on the disk of radius {radius!r}")
    opts = opts or IntegratorOptions()
    solver = DormandPrince(m.rhs, 0.0, [radius, 0.0], -t_max, opts.rel_tol, opts.abs_tol)
    target = radius / 100.0
    while solver.step():
        if math.hypot(solver.u[0], solver.u[1]) <= target:
            return True
    return False


@dataclass(frozen=True)
class EpsilonSweepEntry:
    eps: float
    verdict: str | None
    cycle: CycleResult | None = field(default=None, repr=False)
    error: str | None = None

    def to_json(self):
        return {"eps": self.eps, "verdict": self.verdict,
                "cycle": self.cycle.to_json() if self.cycle else None, "error": self.error}

    @classmethod
    def from_json(cls, d):
        cyc = CycleResult.from_json(d["cycle"]) if d["cycle"] else None
        return cls(d["eps"], d["verdict"], cyc, d["error"])


def epsilon_sweep(template, eps_values, options=DEFAULT_OPTIONS):
    """Full certificate-then-cycle pipeline for each value of ``eps``.

    Entries whose verdict is not ExistsUnique, or whose cycle search
    fails, carry the reason in ``error`` instead of a cycle.
    """
    parse_phi(template, {"eps": 1.0})
    out = []
    for eps in eps_values:
        eps = float(eps)
        if not 0 < eps <= 10:
            out.append(EpsilonSweepEntry(eps, None, error="eps outside (0, 10]"))
            continue
        m = model_from_source(template, {"eps": eps})
        certs = run_certificates(m)
        kind = certs.verdict.kind
        if kind is not VerdictKind.EXISTS_UNIQUE:
            failed = [r["hypothesis"] for r in certs.verdict.reasons if not r["passed"]]
            out.append(EpsilonSweepEntry(eps, kind.value,
                                         error="hypotheses failed: " + ", ".join(failed)))
            continue
        x_init = max(1.0, certs.trapping.sigma)
        try:
            cyc = find_cycle(m, x_init, options)
        except Exception as exc:  # recorded per entry by contract
            out.append(EpsilonSweepEntry(eps, kind.value, error=f"{type(exc).__name__}: {exc}"))
            continue
        out.append(EpsilonSweepEntry(eps, kind.value, cyc))
    return out


def epsilon_sweep_csv(entries, stream):
    stream.write("eps,x_star,period,multiplier,nu_integral\n")
    for e in entries:
        if e.cycle is None:
            row = (e.eps, math.nan, math.nan, math.nan, math.nan)
        else:
            c = e.cycle
            row = (e.eps, c.x_star, c.period, c.floquet_multiplier, c.nu_integral)
        stream.write(",".join(f"{v:.17g}" for v in row) + "\n")
