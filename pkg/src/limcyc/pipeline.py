"""End-to-end runs that assemble an :class:`AnalysisReport`."""

import time

from .certify import VerdictKind, run_certificates
from .cycle import DEFAULT_OPTIONS, find_cycle
from .dynamics import IntegratorOptions
from .errors import LimcycError, NoEntryError, PreconditionError
from .report import AnalysisReport
from .verify import default_radii, origin_instability_check, trapping_check, uniqueness_sweep


class _Clock:
    def __init__(self):
        self.timings = {}

    def __call__(self, stage, fn, *args, **kw):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kw)
        finally:
            self.timings[stage] = time.perf_counter() - t0


def certify_report(m, n_theta=256):
    """Certificates and verdict only; nothing is integrated."""
    clock = _Clock()
    certs = clock("certificates", run_certificates, m, n_theta=n_theta)
    return AnalysisReport(
        phi_source=m.source, parameters=dict(m.params),
        certificate=certs.certificate, trapping=certs.trapping,
        circle_divisors=certs.circle_divisors, origin_value=float(certs.origin_value),
        verdict=certs.verdict, timings=clock.timings,
    )


def cycle_seed(trapping):
    """``max(1, sigma)`` when a trapping disk exists, else 1."""
    return max(1.0, trapping.sigma) if trapping.exists else 1.0


def _origin_radius(m, radius=0.05):
    # shrink until phi < 0 on the whole disk, giving up after ten halvings
    for _ in range(10):
        try:
            return radius, origin_instability_check(m, radius)
        except PreconditionError:
            radius *= 0.5
    raise PreconditionError("phi is not negative on any small disk around the origin")


def analyze(m, n_theta=256, options=DEFAULT_OPTIONS, force_cycle=False, sweep=True):
    """Certificates, cycle, uniqueness sweep and the empirical checks.

    The cycle is searched for when the verdict is ExistsUnique or
    ``force_cycle`` is set; a failed search leaves ``cycle`` empty and
    records the reason under ``checks["cycle_error"]``.
    """
    rep = certify_report(m, n_theta)
    clock = _Clock()
    clock.timings.update(rep.timings)
    trap = rep.trapping
    if rep.verdict.kind is VerdictKind.EXISTS_UNIQUE or force_cycle:
        try:
            rep.cycle = clock("cycle", find_cycle, m, cycle_seed(trap), options)
        except LimcycError as exc:
            rep.checks["cycle_error"] = f"{type(exc).__name__}: {exc}"
    if sweep:
        radii = default_radii(trap.sigma if trap.exists else None)
        rep.sweep = clock("sweep", uniqueness_sweep, m, radii, options)

    iopts = IntegratorOptions(rel_tol=options.rel_tol, abs_tol=options.abs_tol)
    if trap.exists and trap.sigma > 0:
        try:
            res = clock("trapping_check", trapping_check, m, trap.sigma, 2.0 * trap.sigma,
                        opts=iopts)
            rep.checks["trapping"] = {"start_radius": 2.0 * trap.sigma, **res.to_json()}
        except NoEntryError as exc:
            rep.checks["trapping"] = {"start_radius": 2.0 * trap.sigma, "inconclusive": str(exc)}
    if rep.origin_value < 0:
        try:
            radius, ok = clock("origin_check", _origin_radius, m)
            rep.checks["origin_instability"] = {"radius": radius, "reached": ok}
        except PreconditionError as exc:
            rep.checks["origin_instability"] = {"skipped": str(exc)}
    rep.timings = clock.timings
    return rep
