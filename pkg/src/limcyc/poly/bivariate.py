"""Canonical bivariate polynomials in ``x`` and ``y`` with double coefficients.

Terms are stored as ``{(i, j): c}`` meaning ``c * x**i * y**j``. Exact
zeros produced by arithmetic are dropped, nothing else is pruned, so two
polynomials compare equal exactly when their term maps do.
"""

import math
from dataclasses import dataclass

import numpy as np

from .univariate import UnivariatePoly

# arithmetic zeros only; never an accuracy threshold
ZERO_CUTOFF = 1e-300


def _fmt(v):
    if v.is_integer() and v < 1e15:
        return str(int(v))
    return repr(v)


def grlex_key(exponents):
    """Ascending graded-lex key with ``x > y``: 1, y, x, y^2, xy, x^2, ..."""
    i, j = exponents
    return (i + j, i)


class BivariatePoly:
    """Immutable polynomial in ``x`` and ``y``.

    Supports ``+``, ``-``, ``*`` (by polynomials or scalars) and ``**`` with
    nonnegative integer exponents. Calling the polynomial evaluates it; the
    summation always runs in ascending graded-lex order so results are
    bit-reproducible, and array arguments evaluate elementwise.

    Examples
    --------
    >>> q = BivariatePoly({(2, 0): 1.0, (1, 1): 1.0, (0, 2): 1.0})
    >>> q(1.0, 0.0)
    1.0
    >>> str(q - 1)
    'x^2 + x*y + y^2 - 1'
    """

    __slots__ = ("_terms", "_order", "_fn")

    def __init__(self, terms=None):
        clean = {}
        for (i, j), c in (terms or {}).items():
            i, j = int(i), int(j)
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in term {(i, j)}")
            c = float(c)
            if abs(c) > ZERO_CUTOFF or math.isnan(c):
                clean[(i, j)] = c
        self._terms = clean
        self._order = tuple(sorted(clean, key=grlex_key))
        self._fn = None

    # construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i, j, c=1.0):
        return cls({(i, j): c})

    @classmethod
    def x(cls):
        return cls({(1, 0): 1.0})

    @classmethod
    def y(cls):
        return cls({(0, 1): 1.0})

    @classmethod
    def zero(cls):
        return cls()

    # inspection -----------------------------------------------------------

    @property
    def terms(self):
        """Copy of the term map."""
        return dict(self._terms)

    def sorted_terms(self, descending=False):
        """``[((i, j), c), ...]`` in graded-lex order."""
        keys = reversed(self._order) if descending else self._order
        return [(k, self._terms[k]) for k in keys]

    def coefficient(self, i, j):
        return self._terms.get((i, j), 0.0)

    def is_zero(self):
        return not self._terms

    @property
    def degree(self):
        """Total degree; ``-1`` for the zero polynomial."""
        return max((i + j for i, j in self._terms), default=-1)

    @property
    def min_degree(self):
        return min((i + j for i, j in self._terms), default=-1)

    def is_homogeneous(self):
        return len({i + j for i, j in self._terms}) <= 1

    def norm1(self):
        return sum(abs(c) for c in self._terms.values())

    # arithmetic -----------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, BivariatePoly):
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return BivariatePoly.constant(float(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0.0) + c
        return BivariatePoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BivariatePoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        for (i1, j1), c1 in self.sorted_terms():
            for (i2, j2), c2 in other.sorted_terms():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, 0.0) + c1 * c2
        return BivariatePoly(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("only nonnegative integer powers are polynomial")
        result = BivariatePoly.constant(1.0)
        for _ in range(int(n)):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # evaluation -----------------------------------------------------------

    def _compile(self):
        # straight-line code in grlex order; float reprs round-trip exactly
        deg_x = max((i for i, _ in self._terms), default=0)
        deg_y = max((j for _, j in self._terms), default=0)
        lines = ["def f(x, y):"]
        for k in range(2, deg_x + 1):
            lines.append(f"    x{k} = x{k - 1 if k > 2 else ''} * x")
        for k in range(2, deg_y + 1):
            lines.append(f"    y{k} = y{k - 1 if k > 2 else ''} * y")
        lines.append("    s = 0.0")
        for (i, j) in self._order:
            factors = [repr(self._terms[(i, j)])]
            if i:
                factors.append("x" if i == 1 else f"x{i}")
            if j:
                factors.append("y" if j == 1 else f"y{j}")
            lines.append(f"    s = s + {' * '.join(factors)}")
        lines.append("    return s")
        namespace = {"inf": math.inf, "nan": math.nan}
        exec("\n".join(lines), namespace)
        return namespace["f"]

    def __call__(self, x, y):
        if self._fn is None:
            self._fn = self._compile()
        return self._fn(x, y)

    # formatting -----------------------------------------------------------

    def __repr__(self):
        return f"BivariatePoly({dict(self.sorted_terms(descending=True))!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (i, j), c in self.sorted_terms(descending=True):
            mono = [v if e == 1 else f"{v}^{e}" for v, e in (("x", i), ("y", j)) if e]
            mag = abs(c)
            if mono:
                body = "*".join(mono) if mag == 1.0 else f"{_fmt(mag)}*" + "*".join(mono)
            else:
                body = _fmt(mag)
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def to_json(self):
        """``[[i, j, c], ...]`` in descending graded-lex order."""
        return [[i, j, c] for (i, j), c in self.sorted_terms(descending=True)]

    @classmethod
    def from_json(cls, rows):
        return cls({(int(i), int(j)): float(c) for i, j, c in rows})


@dataclass(frozen=True)
class HomogeneousPart:
    """A nonzero homogeneous component ``poly`` of total degree ``degree``."""

    degree: int
    poly: BivariatePoly

    def __post_init__(self):
        if any(i + j != self.degree for i, j in self.poly.terms):
            raise ValueError("term degree does not match the part's degree")


def eval_poly(p, x, y):
    return p(x, y)


def partial(p, var):
    """Formal partial derivative with respect to ``'x'`` or ``'y'``."""
    if var in ("x", "X"):
        return BivariatePoly({(i - 1, j): i * c for (i, j), c in p.terms.items() if i > 0})
    if var in ("y", "Y"):
        return BivariatePoly({(i, j - 1): j * c for (i, j), c in p.terms.items() if j > 0})
    raise ValueError(f"unknown variable {var!r}")


def radial_derivative(p):
    """``x * dp/dx + y * dp/dy``; each term ``c x^i y^j`` picks up ``i + j``."""
    return BivariatePoly({(i, j): (i + j) * c for (i, j), c in p.terms.items()})


def angular_derivative(p):
    """``-y * dp/dx + x * dp/dy``, the derivative along circles in the angle."""
    return BivariatePoly.y() * partial(p, "x") * -1.0 + BivariatePoly.x() * partial(p, "y")


def homogeneous_decompose(p):
    """Split ``p`` into its nonzero homogeneous parts, by ascending degree."""
    buckets = {}
    for (i, j), c in p.terms.items():
        buckets.setdefault(i + j, {})[(i, j)] = c
    return [HomogeneousPart(d, BivariatePoly(buckets[d])) for d in sorted(buckets)]


def ray_coefficients(p, theta):
    """Coefficients of ``r -> p(r cos(theta), r sin(theta))`` for one or many angles.

    Returns an array of shape ``(degree + 1,)`` for scalar ``theta`` or
    ``(len(theta), degree + 1)`` for an array of angles.
    """
    th = np.asarray(theta, dtype=float)
    c, s = np.cos(th), np.sin(th)
    out = np.zeros(th.shape + (max(p.degree, 0) + 1,))
    for (i, j), coef in p.sorted_terms():
        out[..., i + j] += coef * c ** i * s ** j
    return out


def restrict_to_ray(p, theta):
    """``p`` along the ray at angle ``theta`` as a polynomial in the radius."""
    if p.is_zero():
        return UnivariatePoly()
    return UnivariatePoly(ray_coefficients(p, float(theta)))


def circle_min_max(p, r, n_theta=256):
    """Extrema of ``p`` on the circle of radius ``r``.

    The circle is sampled at ``n_theta`` equally spaced angles and the best
    samples are polished by Newton's method on the angle, using the exact
    angular derivatives of ``p``.

    Returns
    -------
    (min, max, argmin_theta, argmax_theta)
    """
    if n_theta < 64:
        raise ValueError("n_theta must be at least 64")
    if p.degree <= 0:
        c = p.coefficient(0, 0)
        return c, c, 0.0, 0.0
    theta = np.arange(n_theta) * (2.0 * math.pi / n_theta)
    vals = p(r * np.cos(theta), r * np.sin(theta))
    d1 = angular_derivative(p)
    d2 = angular_derivative(d1)
    gap = 2.0 * math.pi / n_theta

    def polish(k, sense):
        t0 = float(theta[k])
        best_t, best_v = t0, float(vals[k])
        t = t0
        for _ in range(30):
            x, y = r * math.cos(t), r * math.sin(t)
            g, h = d1(x, y), d2(x, y)
            if h * sense <= 0.0 or not math.isfinite(h):
                break
            step = g / h
            t_new = min(max(t - step, t0 - gap), t0 + gap)
            v = p(r * math.cos(t_new), r * math.sin(t_new))
            if sense * (v - best_v) <= 0.0:
                best_t, best_v = t_new, v
            if abs(t_new - t) <= 1e-15 * (1.0 + abs(t)):
                break
            t = t_new
        return best_v, best_t % (2.0 * math.pi)

    vmin, tmin = polish(int(np.argmin(vals)), 1.0)
    vmax, tmax = polish(int(np.argmax(vals)), -1.0)
    return vmin, vmax, tmin, tmax


def _reduce_mod_circle(p):
    """Reduce ``p`` modulo ``x^2 + y^2 - c`` with ``c`` kept symbolic.

    Returns two dicts ``{k: UnivariatePoly in c}`` for the coefficients of
    ``x^k`` in ``A(x, c)`` and ``B(x, c)`` with ``p = A + y * B`` on the circle.
    """
    a_parts, b_parts = {}, {}
    for (i, j), coef in p.sorted_terms():
        target = b_parts if j % 2 else a_parts
        # y^(2m) = (c - x^2)^m = sum_l binom(m, l) c^(m-l) (-x^2)^l
        m = j // 2
        for l in range(m + 1):
            k = i + 2 * l
            deg_c = m - l
            w = coef * math.comb(m, l) * (-1.0) ** l
            row = target.setdefault(k, {})
            row[deg_c] = row.get(deg_c, 0.0) + w
    def to_univ(parts):
        out = {}
        for k, row in parts.items():
            q = UnivariatePoly([row.get(d, 0.0) for d in range(max(row) + 1)])
            if not q.is_zero():
                out[k] = q
        return out
    return to_univ(a_parts), to_univ(b_parts)


def circle_divisor_radii(p, r_min):
    """Radii ``r > r_min`` of circles on which ``p`` vanishes identically.

    On the circle ``x^2 + y^2 = c`` the polynomial reduces to
    ``A(x, c) + y B(x, c)``; it vanishes on the whole circle exactly when
    every ``x``-coefficient of ``A`` and ``B`` vanishes at ``c``. Candidate
    values of ``c`` are the real roots of the lowest-degree coefficient
    polynomial; each is kept only if all other coefficients vanish there.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial vanishes on every circle")
    a_parts, b_parts = _reduce_mod_circle(p)
    polys = list(a_parts.values()) + list(b_parts.values())
    if any(q.degree == 0 for q in polys):
        return []
    pivot = min(polys, key=lambda q: q.degree)
    candidates = []
    for c in _cluster_roots(pivot.real_roots()):
        c = _newton_polish(pivot, c)
        if c <= r_min * r_min or c <= 0.0:
            continue
        if all(_vanishes(q, c) for q in polys):
            candidates.append(c)
    return [math.sqrt(c) for c in candidates]


def _cluster_roots(roots, rtol=1e-5):
    # a k-fold root comes back from the eigenvalue solver split by about
    # eps^(1/k); merge such clusters into their mean
    out, group = [], []
    for c in sorted(float(r) for r in roots):
        if group and c - group[-1] > rtol * max(1.0, abs(c)):
            out.append(sum(group) / len(group))
            group = []
        group.append(c)
    if group:
        out.append(sum(group) / len(group))
    return out


def _newton_polish(q, c):
    d = q.derivative()
    for _ in range(8):
        dv = d(c)
        if dv == 0.0:
            break
        step = q(c) / dv
        c -= step
        if abs(step) <= 1e-16 * max(1.0, abs(c)):
            break
    return c


def _vanishes(q, c):
    scale = sum(abs(a) * max(1.0, abs(c)) ** k for k, a in enumerate(q.coeffs))
    return abs(q(c)) <= 1e-9 * (1.0 + scale)
