"""Dense univariate polynomials over doubles and Sturm root counting."""

import math

import numpy as np

# remainder coefficients below this fraction of the dividend's scale are
# treated as cancellation noise when building Sturm chains
_REM_RTOL = 1e-12


class UnivariatePoly:
    """Polynomial ``sum(c[k] * t**k)`` with coefficients in ascending order.

    Trailing zero coefficients are stripped so the leading coefficient is
    nonzero; the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [float(v) for v in coeffs]
        while c and c[-1] == 0.0:
            c.pop()
        self.coeffs = tuple(c)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __call__(self, t):
        # Horner; works elementwise on arrays
        acc = 0.0 * t
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __eq__(self, other):
        if not isinstance(other, UnivariatePoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __neg__(self):
        return UnivariatePoly([-c for c in self.coeffs])

    def __repr__(self):
        return f"UnivariatePoly({list(self.coeffs)!r})"

    def derivative(self):
        return UnivariatePoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def scaled(self, factor):
        return UnivariatePoly([factor * c for c in self.coeffs])

    def strip_low(self):
        """Divide out the largest power of ``t`` that divides the polynomial.

        Returns ``(m, q)`` with ``self == t**m * q`` and ``q(0) != 0``.
        """
        m = 0
        while m < len(self.coeffs) and self.coeffs[m] == 0.0:
            m += 1
        return m, UnivariatePoly(self.coeffs[m:])

    def sign_at_zero_plus(self):
        """Sign just to the right of zero: the sign of the lowest nonzero coefficient."""
        for c in self.coeffs:
            if c != 0.0:
                return 1 if c > 0 else -1
        return 0

    def sign_at_inf(self, direction=1):
        if not self.coeffs:
            return 0
        lead = self.coeffs[-1]
        s = 1 if lead > 0 else -1
        if direction < 0 and self.degree % 2 == 1:
            s = -s
        return s

    def sign_at(self, t):
        if t == math.inf:
            return self.sign_at_inf(1)
        if t == -math.inf:
            return self.sign_at_inf(-1)
        v = self(t)
        return 0 if v == 0 else (1 if v > 0 else -1)

    def real_roots(self):
        """Real roots via companion-matrix eigenvalues (numpy), unsorted."""
        if self.degree < 1:
            return np.empty(0)
        r = np.roots(self.coeffs[::-1])
        scale = max(1.0, float(np.max(np.abs(r))))
        return np.real(r[np.abs(r.imag) <= 1e-9 * scale])


def poly_rem(a, b):
    """Remainder of ``a`` divided by ``b``, with the chain noise floor applied."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a.coeffs)
    db = b.degree
    lead = b.coeffs[-1]
    scale = max((abs(c) for c in r), default=0.0)
    while len(r) - 1 >= db and r:
        q = r[-1] / lead
        shift = len(r) - 1 - db
        for k, c in enumerate(b.coeffs):
            r[shift + k] -= q * c
        r.pop()
    while r and abs(r[-1]) <= _REM_RTOL * scale:
        r.pop()
    return UnivariatePoly(r)


def _normalized(p):
    # positive scaling keeps every sign intact and stops coefficient drift
    m = max(abs(c) for c in p.coeffs)
    return p.scaled(1.0 / m)


def sturm_sequence(q):
    """Sturm chain ``q, q', -rem(q, q'), ...`` with each member renormalized.

    The chain ends at the last nonzero remainder (a multiple of
    ``gcd(q, q')``), so sign-variation counts give distinct roots even when
    ``q`` has repeated factors.
    """
    if q.is_zero():
        raise ValueError("Sturm sequence of the zero polynomial")
    seq = [_normalized(q)]
    d = q.derivative()
    if d.is_zero():
        return seq
    seq.append(_normalized(d))
    while True:
        r = poly_rem(seq[-2], seq[-1])
        if r.is_zero():
            break
        seq.append(_normalized(-r))
    return seq


def _variations(signs):
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count(q, a, b):
    """Number of distinct real roots of ``q`` in ``(a, b]``.

    ``a`` may be ``-inf`` and ``b`` may be ``inf``. Use
    :func:`sturm_count_positive_roots` for the open half-line.
    """
    seq = sturm_sequence(q)
    return _variations([p.sign_at(a) for p in seq]) - _variations([p.sign_at(b) for p in seq])


def sturm_count_positive_roots(q):
    """Number of distinct real roots of ``q`` in ``(0, inf)``.

    Signs are taken at ``0+`` (lowest nonzero coefficient), so a root at the
    origin is never counted.

    >>> sturm_count_positive_roots(UnivariatePoly([-1, 0, 1]))
    1
    """
    if q.is_zero():
        raise ValueError("zero polynomial has infinitely many roots")
    seq = sturm_sequence(q)
    v0 = _variations([p.sign_at_zero_plus() for p in seq])
    vinf = _variations([p.sign_at_inf(1) for p in seq])
    return v0 - vinf


def count_real_roots(q):
    """Number of distinct real roots of ``q`` on the whole line."""
    if q.is_zero():
        raise ValueError("zero polynomial has infinitely many roots")
    seq = sturm_sequence(q)
    return _variations([p.sign_at_inf(-1) for p in seq]) - _variations(
        [p.sign_at_inf(1) for p in seq])
