"""Certificates for the hypotheses of the uniqueness and existence theorems.

Three independent questions are answered for a model ``phi``:

* is ``phi`` strictly star-shaped, i.e. does the radial derivative
  ``S = x phi_x + y phi_y`` keep a strict sign off the origin;
* is there a disk ``D_sigma`` outside of which ``phi >= 0`` (and does
  ``phi`` avoid vanishing on whole circles beyond it);
* is ``phi(0, 0) < 0``.

:func:`theorem_verdict` combines the answers.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .errors import PreconditionError
from .model import PhiModel, build_model
from .poly import (
    BivariatePoly,
    UnivariatePoly,
    angular_derivative,
    circle_divisor_radii,
    circle_min_max,
    count_real_roots,
    homogeneous_decompose,
    ray_coefficients,
    sturm_count_positive_roots,
)

__all__ = [
    "Method",
    "PhiModel",
    "StarShapeCertificate",
    "Status",
    "TrappingRegion",
    "Verdict",
    "VerdictKind",
    "build_model",
    "certify_star_shape",
    "definite_sign",
    "origin_sign",
    "run_certificates",
    "theorem_verdict",
    "trapping_radius",
]

MAX_GRID = 2 ** 16
N_AUDIT = 4096
N_AUDIT_STORED = 128


class Status(str, enum.Enum):
    STRICT_POSITIVE = "StrictPositive"
    STRICT_NEGATIVE = "StrictNegative"
    NON_STRICT = "NonStrict"
    INDEFINITE = "Indefinite"

    @property
    def is_strict(self):
        return self in (Status.STRICT_POSITIVE, Status.STRICT_NEGATIVE)


class Method(str, enum.Enum):
    EULER_STRUCTURED = "EulerStructured"
    QUADRATIC_DISCRIMINANT = "QuadraticDiscriminant"
    POLAR_STURM_GRID = "PolarSturmGrid"


class VerdictKind(str, enum.Enum):
    EXISTS_UNIQUE = "ExistsUnique"
    AT_MOST_ONE = "AtMostOne"
    HYPOTHESES_FAILED = "HypothesesFailed"


@dataclass(frozen=True)
class StarShapeCertificate:
    """Outcome of the strict star-shapedness check.

    ``witnesses`` holds points off the origin where ``S`` vanishes
    (NonStrict) or takes opposite signs (Indefinite). ``audit`` keeps a
    sample of ``(x, y, S(x, y))`` triples drawn after certification.
    ``details`` carries method-specific evidence such as the discriminant.
    """

    status: Status
    method: Method | None
    witnesses: tuple = ()
    grid_resolution: int | None = None
    details: dict = field(default_factory=dict)
    audit: tuple = ()

    @property
    def structural(self):
        return self.method in (Method.EULER_STRUCTURED, Method.QUADRATIC_DISCRIMINANT)

    @property
    def sign(self):
        return {Status.STRICT_POSITIVE: 1, Status.STRICT_NEGATIVE: -1}.get(self.status, 0)

    def to_json(self):
        return {
            "status": self.status.value,
            "method": self.method.value if self.method else None,
            "witnesses": [list(w) for w in self.witnesses],
            "grid_resolution": self.grid_resolution,
            "details": self.details,
            "audit": [list(a) for a in self.audit],
        }

    @classmethod
    def from_json(cls, d):
        return cls(
            status=Status(d["status"]),
            method=Method(d["method"]) if d["method"] else None,
            witnesses=tuple(tuple(w) for w in d["witnesses"]),
            grid_resolution=d["grid_resolution"],
            details=d["details"],
            audit=tuple(tuple(a) for a in d["audit"]),
        )


@dataclass(frozen=True)
class TrappingRegion:
    sigma: float
    exists: bool
    refinement_tol: float

    def to_json(self):
        return {"sigma": self.sigma, "exists": self.exists, "refinement_tol": self.refinement_tol}

    @classmethod
    def from_json(cls, d):
        return cls(float(d["sigma"]), bool(d["exists"]), float(d["refinement_tol"]))


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    reasons: tuple
    certification: str = "none"

    def to_json(self):
        return {"kind": self.kind.value, "reasons": [dict(r) for r in self.reasons],
                "certification": self.certification}

    @classmethod
    def from_json(cls, d):
        return cls(VerdictKind(d["kind"]), tuple(d["reasons"]), d["certification"])


def _strict_tol(S):
    return 1e-9 * (1.0 + S.norm1())


def _strict_status(sign):
    return Status.STRICT_POSITIVE if sign > 0 else Status.STRICT_NEGATIVE


# -- structured paths -------------------------------------------------------

def definite_sign(part):
    """Sign of a homogeneous part that is definite off the origin, else 0.

    Degree-2 forms use the discriminant of ``a x^2 + b xy + c y^2``. Higher
    even degrees are dehomogenized to ``h(1, t)``, which must have no real
    roots and a nonvanishing ``y^d`` coefficient.
    """
    d, h = part.degree, part.poly
    if d == 0 or d % 2:
        return 0
    if d == 2:
        a, b, c = h.coefficient(2, 0), h.coefficient(1, 1), h.coefficient(0, 2)
        if b * b - 4.0 * a * c < 0.0:
            return 1 if a > 0 else -1
        return 0
    lead_x, lead_y = h.coefficient(d, 0), h.coefficient(0, d)
    if lead_x == 0.0 or lead_y == 0.0 or (lead_x > 0) != (lead_y > 0):
        return 0
    dehom = UnivariatePoly([h.coefficient(d - k, k) for k in range(d + 1)])
    if count_real_roots(dehom) > 0:
        return 0
    return 1 if lead_x > 0 else -1


def _euler_structured(parts):
    if any(p.degree == 0 for p in parts):
        return None
    signs = {definite_sign(p) for p in parts}
    if len(signs) != 1 or 0 in signs:
        return None
    sign = signs.pop()
    details = {"degrees": [p.degree for p in parts],
               "part_signs": [sign] * len(parts)}
    return sign, details


def _quadratic_factorization(S, parts):
    """Write ``S = u * p(u)`` with ``u`` a positive definite quadratic form.

    Returns ``(u, p)`` or ``None`` when ``S`` has no such structure.
    """
    if parts[0].degree != 2 or any(p.degree % 2 for p in parts):
        return None
    low = parts[0].poly
    a = low.coefficient(2, 0)
    if a == 0.0:
        return None
    u = low * (1.0 / a)
    b, c = u.coefficient(1, 1), u.coefficient(0, 2)
    if b * b - 4.0 * c >= 0.0:
        return None
    coeffs = {}
    for part in parts:
        k = part.degree // 2
        ak = part.poly.coefficient(part.degree, 0)
        resid = part.poly - (u ** k) * ak
        if resid.norm1() > 1e-12 * max(1.0, part.poly.norm1()):
            return None
        coeffs[k] = ak
    p = UnivariatePoly([coeffs.get(k, 0.0) for k in range(1, max(coeffs) + 1)])
    return u, p


def _quadratic_discriminant(S, parts):
    fac = _quadratic_factorization(S, parts)
    if fac is None:
        return None
    u, p = fac
    if p.is_zero():
        return None
    npos = sturm_count_positive_roots(p)
    if npos:
        return None
    sign = p.sign_at_zero_plus()
    b, c = u.coefficient(1, 1), u.coefficient(0, 2)
    details = {
        "u": str(u),
        "u_terms": u.to_json(),
        "p": list(p.coeffs),
        "form_discriminant": b * b - 4.0 * c,
        "positive_roots": npos,
    }
    if p.degree == 2:
        p0, p1, p2 = p.coeffs
        details["discriminant"] = p1 * p1 - 4.0 * p0 * p2
    return sign, details


# -- polar grid --------------------------------------------------------------

def _lipschitz(S):
    # |d/dtheta cos^i sin^j| <= i + j, so coefficient k moves at most k * sum|s|
    L = np.zeros(S.degree + 1)
    for (i, j), c in S.terms.items():
        L[i + j] += (i + j) * abs(c)
    return L


def _ray_sign(coeffs, tol):
    for c in coeffs:
        if abs(c) > tol:
            return 1 if c > 0 else -1
    return 0


def _snap(v):
    return 0.0 if abs(v) < 1e-15 else float(v)


def _point(r, theta):
    return (_snap(r * math.cos(theta)), _snap(r * math.sin(theta)))


def _classify_root(S, theta, q, tol):
    """Witnesses for a ray whose radial polynomial has a positive root."""
    roots = [float(r) for r in q.real_roots() if r > 0]
    if not roots:
        cand = np.roots(q.coeffs[::-1])
        cand = cand[cand.real > 0]
        roots = [float(cand[np.argmin(np.abs(cand.imag))].real)]
    r = min(roots)
    d = q.derivative()
    for _ in range(20):
        dv = d(r)
        if dv == 0.0:
            break
        step = q(r) / dv
        if not math.isfinite(step) or r - step <= 0:
            break
        r -= step
        if abs(step) <= 1e-15 * r:
            break
    lo, hi = _point(r * (1 - 1e-6), theta), _point(r * (1 + 1e-6), theta)
    s_lo, s_hi = S(*lo), S(*hi)
    if s_lo * s_hi < 0:
        return Status.INDEFINITE, (lo, hi)
    return Status.NON_STRICT, (_point(r, theta),)


def _grid_scan(S, n_theta, tol):
    """Look for rays where S vanishes or changes sign; return the common sign."""
    m_low = S.min_degree
    theta = np.arange(n_theta) * (2.0 * math.pi / n_theta)
    table = ray_coefficients(S, theta)[:, m_low:]
    signs = []
    for k, row in enumerate(table):
        th = float(theta[k])
        if np.all(np.abs(row) <= tol):
            return None, (Status.NON_STRICT, (_point(1.0, th),))
        q = UnivariatePoly(row)
        if sturm_count_positive_roots(q) > 0:
            return None, _classify_root(S, th, q, tol)
        signs.append((_ray_sign(row, tol), th))
    pos = [th for s, th in signs if s > 0]
    neg = [th for s, th in signs if s < 0]
    if pos and neg:
        wp, wn = _point(1.0, pos[0]), _point(1.0, neg[0])
        return None, (Status.INDEFINITE, (wp, wn))
    return (1 if pos else -1), None


def _grid_certify(S, sign, n_theta):
    """Cover the circle with cells on which a lower-bound polynomial stays positive.

    Each ray polynomial has coefficients ``a_k(theta)`` with
    ``|a_k'| <= L_k``. On a cell of half-width ``h`` around ``theta`` the
    radial polynomial dominates ``sum (a_k(theta) - L_k h) r^k`` for r >= 0,
    so a lower bound with positive constant term and no positive roots
    certifies the whole cell. Failing cells are bisected down to a
    resolution of ``MAX_GRID`` rays.

    Returns ``(resolution, failing_theta)``; ``failing_theta`` is None on success.
    """
    m_low = S.min_degree
    L = _lipschitz(S)[m_low:]
    h = math.pi / n_theta
    cells = np.arange(n_theta) * (2.0 * h)
    h_min = math.pi / MAX_GRID
    resolution = n_theta
    while len(cells):
        table = sign * ray_coefficients(S, cells)[:, m_low:]
        failing = []
        for th, row in zip(cells, table):
            lower = row - L * h
            if lower[0] > 0.0 and sturm_count_positive_roots(UnivariatePoly(lower)) == 0:
                continue
            failing.append(th)
        if not failing:
            return resolution, None
        if h / 2 < h_min * (1 - 1e-12):
            return resolution, failing
        h /= 2
        resolution = int(round(math.pi / h))
        failing = np.asarray(failing)
        cells = np.concatenate([failing - h, failing + h])
    return resolution, None


def _grid_fallback(S, sign, failing, r_max, tol):
    """Dense polar sampling around cells the lower-bound test could not clear."""
    m_low = S.min_degree
    radii = np.geomspace(1e-3, max(r_max, 1e-3), 200)
    best = None
    for th0 in failing[:64]:
        th = th0 + np.linspace(-math.pi / MAX_GRID, math.pi / MAX_GRID, 33)
        R, T = np.meshgrid(radii, th)
        X, Y = R * np.cos(T), R * np.sin(T)
        # judge on S / r^m so that higher-order flatness near the origin
        # is not mistaken for a zero
        vals = sign * S(X, Y) / R ** m_low
        if np.any(vals < -tol):
            k = np.unravel_index(np.argmin(vals), vals.shape)
            return Status.INDEFINITE, ((_snap(X[k]), _snap(Y[k])),), True
        k = np.unravel_index(np.argmin(np.abs(vals)), vals.shape)
        if best is None or abs(vals[k]) < best[0]:
            best = (abs(vals[k]), (_snap(X[k]), _snap(Y[k])))
    if best[0] <= tol:
        return Status.NON_STRICT, (best[1],), True
    # neither a zero nor a sign change was located: report, flagged inconclusive
    return Status.INDEFINITE, (best[1],), False


def _audit(S, r_max):
    pts = qmc.Halton(d=2, scramble=False).random(N_AUDIT + 1)[1:]
    r = 10.0 ** (np.log10(1e-6) + pts[:, 0] * (np.log10(r_max) - np.log10(1e-6)))
    th = 2.0 * math.pi * pts[:, 1]
    x, y = r * np.cos(th), r * np.sin(th)
    return x, y, S(x, y)


def certify_star_shape(m, n_theta=256, r_max_audit=10.0):
    """Decide strict star-shapedness of ``m.phi``.

    Methods are tried from most to least structured: a pure quadratic form
    goes straight to its discriminant; otherwise every homogeneous part of
    ``S`` definite with one sign (EulerStructured); then ``S = u p(u)`` with
    ``u`` a definite quadratic and ``p`` free of positive roots
    (QuadraticDiscriminant); finally a certified polar grid.

    Strict results are audited on quasi-random points of the annulus
    ``1e-6 <= r <= r_max_audit``; an audit failure turns the certificate
    into Indefinite with the offending point.
    """
    if n_theta < 256:
        raise PreconditionError("n_theta must be at least 256")
    S = m.S
    if S.is_zero():
        return StarShapeCertificate(Status.NON_STRICT, None, witnesses=((1.0, 0.0),),
                                    details={"reason": "S is identically zero"})
    tol = _strict_tol(S)
    parts = homogeneous_decompose(S)
    single_quadratic = len(parts) == 1 and parts[0].degree == 2

    found = None
    if not single_quadratic:
        res = _euler_structured(parts)
        if res is not None:
            found = (Method.EULER_STRUCTURED, res[0], res[1], None)
    if found is None:
        res = _quadratic_discriminant(S, parts)
        if res is not None:
            found = (Method.QUADRATIC_DISCRIMINANT, res[0], res[1], None)
    if found is None:
        sign, failure = _grid_scan(S, n_theta, tol)
        if failure is not None:
            status, wit = failure
            return StarShapeCertificate(status, Method.POLAR_STURM_GRID, witnesses=wit,
                                        grid_resolution=n_theta)
        resolution, failing = _grid_certify(S, sign, n_theta)
        if failing is not None:
            status, wit, conclusive = _grid_fallback(S, sign, failing, r_max_audit, tol)
            if status is Status.INDEFINITE:
                # pair with a grid ray that carries the common sign
                wit = wit + (_point(1.0, 0.0) if sign * S(1.0, 0.0) > 0 else _point(1.0, math.pi / 2),)
            return StarShapeCertificate(status, Method.POLAR_STURM_GRID, witnesses=wit,
                                        grid_resolution=resolution,
                                        details={"conclusive": conclusive})
        found = (Method.POLAR_STURM_GRID, sign, {"lipschitz_cells": True}, resolution)

    method, sign, details, resolution = found
    x, y, vals = _audit(S, r_max_audit)
    bad = np.nonzero(sign * vals <= 0)[0]
    if len(bad):
        k = int(bad[0])
        good = int(np.nonzero(sign * vals > 0)[0][0])
        return StarShapeCertificate(
            Status.INDEFINITE, method,
            witnesses=((float(x[k]), float(y[k])), (float(x[good]), float(y[good]))),
            grid_resolution=resolution, details={"audit_failure": True})
    stored = tuple((float(a), float(b), float(v))
                   for a, b, v in zip(x[:N_AUDIT_STORED], y[:N_AUDIT_STORED], vals[:N_AUDIT_STORED]))
    return StarShapeCertificate(_strict_status(sign), method, grid_resolution=resolution,
                                details=details, audit=stored)


# -- trapping disk ------------------------------------------------------------

def _negative_on_scan(phi, radii, n_theta, negative):
    """``negative(r)`` for every scan radius, skipping circles that are clearly positive.

    Sampled circle values come from one matrix product; a circle whose
    sampled minimum stays above the half-gap Lipschitz bound on the angular
    derivative cannot dip below zero, so only the rest are polished.
    """
    theta = np.arange(n_theta) * (2.0 * math.pi / n_theta)
    coeffs = ray_coefficients(phi, theta)
    powers = radii[:, None] ** np.arange(coeffs.shape[1])[None, :]
    sampled_min = (powers @ coeffs.T).min(axis=1)
    d1 = angular_derivative(phi)
    lip = np.array([sum(abs(c) * r ** (i + j) for (i, j), c in d1.terms.items()) for r in radii])
    safe = sampled_min - 0.5 * (2.0 * math.pi / n_theta) * lip > 0.0
    return [False if ok else negative(r) for r, ok in zip(radii, safe)]


def trapping_radius(m,r_search_max=1e3, tol=1e-9, n_theta=256, n_scan=601):
    """Smallest ``sigma`` with ``phi >= 0`` on every circle of radius ``>= sigma``.

    ``U`` is taken to be ``{phi < 0}``. Circle minima are scanned on
    ``n_scan`` log-spaced radii up to ``r_search_max``; the outermost
    sign change is then refined by bisection to ``tol``. No monotonicity
    of the circle minimum in ``r`` is assumed.
    """
    if r_search_max <= 0:
        raise PreconditionError("r_search_max must be positive")
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    phi = m.phi

    def negative(r):
        # rounding-level slack so circles where phi touches zero count as >= 0
        slack = 1e-13 * (1.0 + sum(abs(c) * r ** (i + j) for (i, j), c in phi.terms.items()))
        return circle_min_max(phi, r, n_theta)[0] < -slack

    radii = np.geomspace(r_search_max * 1e-6, r_search_max, n_scan)
    bad = np.nonzero(_negative_on_scan(phi, radii, n_theta, negative))[0]
    if len(bad) == 0:
        if phi.coefficient(0, 0) >= 0:
            return TrappingRegion(0.0, True, tol)
        lo, hi = 0.0, float(radii[0])
    elif bad[-1] == len(radii) - 1:
        return TrappingRegion(float(r_search_max), False, tol)
    else:
        lo, hi = float(radii[bad[-1]]), float(radii[bad[-1] + 1])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if negative(mid):
            lo = mid
        else:
            hi = mid
    return TrappingRegion(hi, True, tol)


def origin_sign(m):
    return m.phi.coefficient(0, 0)


# -- verdict --------------------------------------------------------------------

def theorem_verdict(cert, trap, divisors, origin):
    """Combine the certificates into the existence/uniqueness verdict.

    ``divisors`` is the output of ``circle_divisor_radii(phi, trap.sigma)``,
    or ``None`` when phi vanishes identically.
    """
    reasons = []
    strict = cert.status.is_strict
    reasons.append({
        "hypothesis": "strict_star_shape", "passed": strict,
        "evidence": f"{cert.status.value} via {cert.method.value if cert.method else 'none'}",
    })
    reasons.append({
        "hypothesis": "trapping_region", "passed": bool(trap.exists),
        "evidence": f"sigma={trap.sigma!r}" if trap.exists else "phi < 0 on arbitrarily large circles",
    })
    no_div = divisors is not None and len(divisors) == 0
    if divisors is None:
        evidence = "phi vanishes identically"
    elif divisors:
        evidence = "phi vanishes on circles of radius " + ", ".join(repr(r) for r in divisors)
    else:
        evidence = "no circle of radius > sigma is a zero set of phi"
    reasons.append({"hypothesis": "no_circle_divisor", "passed": no_div, "evidence": evidence})
    reasons.append({"hypothesis": "origin_negative", "passed": origin < 0,
                    "evidence": f"phi(0,0)={origin!r}"})

    if not strict:
        kind = VerdictKind.HYPOTHESES_FAILED
    elif trap.exists and no_div and origin < 0:
        kind = VerdictKind.EXISTS_UNIQUE
    else:
        kind = VerdictKind.AT_MOST_ONE
    if strict:
        certification = "structural" if cert.structural else "numerical"
    else:
        certification = "none"
    return Verdict(kind, tuple(reasons), certification)


@dataclass(frozen=True)
class Certificates:
    certificate: StarShapeCertificate
    trapping: TrappingRegion
    circle_divisors: list | None
    origin_value: float
    verdict: Verdict


def run_certificates(m, n_theta=256, r_max_audit=10.0, r_search_max=1e3, tol=1e-9):
    """All certificates for one model, plus the verdict."""
    cert = certify_star_shape(m, n_theta=n_theta, r_max_audit=r_max_audit)
    trap = trapping_radius(m, r_search_max=r_search_max, tol=tol)
    divisors = None if m.phi.is_zero() else circle_divisor_radii(m.phi, trap.sigma)
    origin = origin_sign(m)
    return Certificates(cert, trap, divisors, origin, theorem_verdict(cert, trap, divisors, origin))
