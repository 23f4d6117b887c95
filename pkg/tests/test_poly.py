"""Polynomial layer: parser, arithmetic, ray/circle views and Sturm counting.

Expansion and differentiation are checked against sympy as an independent
computer-algebra oracle.
"""

import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from limcyc.errors import NonPolynomialError, ParseError, UnboundIdentifierError
from limcyc.poly import (
    BivariatePoly,
    UnivariatePoly,
    circle_divisor_radii,
    circle_min_max,
    homogeneous_decompose,
    parse_phi,
    partial,
    radial_derivative,
    ray_coefficients,
    restrict_to_ray,
    sturm_count,
    sturm_count_positive_roots,
)

X, Y = sp.symbols("x y")
Q_SRC = "(x^2+x*y+y^2)"


def sympy_terms(src, params=None):
    expr = sp.sympify(src.replace("^", "**"), locals={k: sp.Float(v) for k, v in (params or {}).items()})
    poly = sp.Poly(sp.expand(expr), X, Y)
    return {m: float(c) for m, c in poly.terms() if float(c) != 0.0}


# -- parser -----------------------------------------------------------------------

def test_parse_etba():
    p = parse_phi("eps*(x^2 + x*y + y^2 - 1)", {"eps": 0.1})
    assert p.terms == {(2, 0): 0.1, (1, 1): 0.1, (0, 2): 0.1, (0, 0): -0.1}


def test_parse_zero_is_empty():
    assert parse_phi("0*x + 0").terms == {}
    assert parse_phi("x - x").is_zero()


def test_parse_q_squared_matches_sympy():
    p = parse_phi(f"{Q_SRC}^2")
    assert p.terms == {(4, 0): 1, (3, 1): 2, (2, 2): 3, (1, 3): 2, (0, 4): 1}
    assert p.terms == sympy_terms(f"{Q_SRC}**2")


@pytest.mark.parametrize("src", [
    "-1 + (x^2+x*y+y^2) - (x^2+x*y+y^2)^2 + (x^2+x*y+y^2)^3",
    "3*x^3*y - 2.5*y^4 + x",
    "-(x - 2*y)^5 + 0.25",
    "(1 + x)*(1 - y)^2*(x + y)^3",
])
def test_expansion_matches_sympy(src):
    assert parse_phi(src).terms == pytest.approx(sympy_terms(src), rel=1e-15)


@pytest.mark.parametrize("src, exc", [
    ("x/y", NonPolynomialError),
    ("x^-1", NonPolynomialError),
    ("x^1.5", NonPolynomialError),
    ("x**2", ParseError),
    ("x +", ParseError),
    ("(x", ParseError),
    ("x $ y", ParseError),
    ("a*x", UnboundIdentifierError),
])
def test_parse_errors(src, exc):
    with pytest.raises(exc) as info:
        parse_phi(src)
    assert isinstance(info.value.position, int)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse_phi("x + * y")
    assert info.value.position == 4


def test_str_round_trips():
    p = parse_phi("-1 + 2.5*x^2*y - y^3 + x*y")
    assert parse_phi(str(p)) == p


# random expressions from the grammar, interpreted directly as an oracle
def _expr_strategy():
    leaf = st.one_of(
        st.sampled_from(["x", "y", "a"]),
        st.integers(0, 9).map(str),
        st.floats(0.1, 5, allow_nan=False).map(lambda v: f"{v:.3f}"),
    )

    def extend(children):
        return st.one_of(
            st.tuples(children, st.sampled_from("+-*"), children).map(
                lambda t: f"({t[0]} {t[1]} {t[2]})"),
            st.tuples(children, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
            children.map(lambda c: f"(-{c})"),
        )

    return st.recursive(leaf, extend, max_leaves=8)


def _interpret(src, x, y, a):
    return eval(src.replace("^", "**"), {"__builtins__": {}}, {"x": x, "y": y, "a": a})


@settings(max_examples=200, deadline=None)
@given(_expr_strategy(), st.floats(-2, 2), st.floats(-2, 2))
def test_parse_eval_consistency(src, x, y):
    a = 0.7
    p = parse_phi(src, {"a": a})
    direct = _interpret(src, x, y, a)
    assert p(x, y) == pytest.approx(direct, rel=1e-12, abs=1e-12 * (1 + p.norm1() * 4 ** p.degree))


# -- arithmetic and derivatives ------------------------------------------------------------

def test_evaluation_examples():
    assert parse_phi("eps*(x^2 + x*y + y^2 - 1)", {"eps": 1})(0.0, 0.0) == -1.0
    qp = parse_phi(f"-1 + {Q_SRC} - {Q_SRC}^2 + {Q_SRC}^3")
    assert qp(1.0, 0.0) == 0.0
    assert qp(0.0, 0.0) == qp.coefficient(0, 0)


def test_partials():
    q = parse_phi(Q_SRC)
    assert partial(q, "x") == parse_phi("2*x + y")
    assert partial(q, "y") == parse_phi("x + 2*y")
    assert partial(parse_phi("-3"), "x").is_zero()


@pytest.mark.parametrize("src", ["x^3*y^2 - 4*x*y + 7", f"{Q_SRC}^3 - y^5 + x"])
def test_partials_match_sympy(src):
    p = parse_phi(src)
    e = sp.sympify(src.replace("^", "**"))
    for var, sym in (("x", X), ("y", Y)):
        expected = {m: float(c) for m, c in sp.Poly(sp.diff(e, sym), X, Y).terms() if c != 0}
        assert partial(p, var).terms == expected


def test_radial_derivative_examples():
    assert radial_derivative(parse_phi("eps*(x^2+x*y+y^2-1)", {"eps": 0.3})) == parse_phi(
        "0.6*(x^2+x*y+y^2)")
    assert radial_derivative(parse_phi("5")).is_zero()
    S = radial_derivative(parse_phi(f"-1 + {Q_SRC} - {Q_SRC}^2 + {Q_SRC}^3"))
    assert S == parse_phi(f"2*{Q_SRC} - 4*{Q_SRC}^2 + 6*{Q_SRC}^3")


poly_strategy = st.dictionaries(
    st.tuples(st.integers(0, 4), st.integers(0, 4)),
    st.integers(-9, 9).map(float), max_size=8,
).map(BivariatePoly)


@settings(max_examples=100, deadline=None)
@given(poly_strategy)
def test_euler_identity_on_homogeneous_parts(p):
    for h in homogeneous_decompose(p):
        assert radial_derivative(h.poly) == h.poly * float(h.degree)


@settings(max_examples=100, deadline=None)
@given(poly_strategy, poly_strategy, st.integers(-5, 5), st.integers(-5, 5))
def test_partial_linearity(p, q, a, b):
    for var in ("x", "y"):
        assert partial(p * float(a) + q * float(b), var) == (
            partial(p, var) * float(a) + partial(q, var) * float(b))


@settings(max_examples=100, deadline=None)
@given(poly_strategy, st.floats(0, 2 * math.pi), st.floats(0.01, 3))
def test_restrict_to_ray_consistency(p, theta, r):
    direct = p(r * math.cos(theta), r * math.sin(theta))
    via = restrict_to_ray(p, theta)(r)
    assert via == pytest.approx(direct, rel=1e-10, abs=1e-10 * (1 + p.norm1() * 3 ** 8))


def test_arithmetic_matches_sympy():
    a = parse_phi("x^2 - 3*x*y + 1")
    b = parse_phi("y^3 + 2*x")
    prod = sp.expand((X ** 2 - 3 * X * Y + 1) * (Y ** 3 + 2 * X))
    assert (a * b).terms == {m: float(c) for m, c in sp.Poly(prod, X, Y).terms()}
    assert (a + b - a) == b
    assert (a ** 3) == a * a * a


def test_canonical_equality_and_json():
    a = parse_phi("x*y + 1 - 1")
    b = BivariatePoly({(1, 1): 1.0, (0, 0): 0.0})
    assert a == b and hash(a) == hash(b)
    assert BivariatePoly.from_json(a.to_json()) == a


def test_vectorized_evaluation():
    p = parse_phi("x^2*y - y + 3")
    xs, ys = np.linspace(-1, 1, 7), np.linspace(2, 0, 7)
    np.testing.assert_allclose(p(xs, ys), xs ** 2 * ys - ys + 3, rtol=1e-15)


# -- decomposition, rays and circles ---------------------------------------------------------

def test_homogeneous_decompose():
    parts = homogeneous_decompose(parse_phi("x^2 + x*y + y^2 - 1"))
    assert [h.degree for h in parts] == [0, 2]
    assert parts[0].poly == parse_phi("-1") and parts[1].poly == parse_phi(Q_SRC)
    assert homogeneous_decompose(BivariatePoly()) == []
    parts = homogeneous_decompose(parse_phi(f"-2 + {Q_SRC} + {Q_SRC}^2"))
    assert [h.degree for h in parts] == [0, 2, 4]


@pytest.mark.parametrize("theta, factor", [(0.0, 1.0), (math.pi / 2, 1.0), (3 * math.pi / 4, 0.5)])
def test_q_along_rays(theta, factor):
    q = parse_phi(Q_SRC)
    coeffs = ray_coefficients(q, theta)
    np.testing.assert_allclose(coeffs, [0, 0, factor], atol=1e-15)


def test_ray_coefficients_vectorized_shape():
    thetas = np.linspace(0, 1, 5)
    out = ray_coefficients(parse_phi("x^3 + y"), thetas)
    assert out.shape == (5, 4)


def test_circle_min_max_eigenvalue_oracle():
    # Q's matrix [[1, 1/2], [1/2, 1]] has eigenvalues 1/2 and 3/2
    lam = np.linalg.eigvalsh([[1.0, 0.5], [0.5, 1.0]])
    qm1 = parse_phi(f"{Q_SRC} - 1")
    r = math.sqrt(2)
    lo, hi, at_lo, _ = circle_min_max(qm1, r)
    assert lo == pytest.approx(lam[0] * 2 - 1, abs=1e-12)
    assert hi == pytest.approx(lam[1] * 2 - 1, abs=1e-12)
    assert math.cos(2 * at_lo) == pytest.approx(math.cos(2 * 3 * math.pi / 4), abs=1e-6)
    lo, hi, _, _ = circle_min_max(qm1, 1.0)
    assert (lo, hi) == pytest.approx((-0.5, 0.5), abs=1e-12)
    assert circle_min_max(parse_phi("-1"), 3.0)[:2] == (-1.0, -1.0)


def test_circle_divisors():
    p = parse_phi("(x^2+y^2-4)*(x+1)")
    radii = circle_divisor_radii(p, 1.0)
    assert radii == pytest.approx([2.0])
    assert circle_divisor_radii(parse_phi("x^2+x*y+y^2-1"), 0.0) == []
    assert circle_divisor_radii(parse_phi("x^2+y^2-1"), 2.0) == []
    with pytest.raises(ValueError):
        circle_divisor_radii(BivariatePoly(), 0.0)


@pytest.mark.parametrize("src, r_min", [
    ("(x^2+y^2-4)*(x^2+y^2-9)*y", 0.5),
    ("(x^2+y^2-2.25)*(x^3 - y + 1)", 0.0),
    ("(x^2+y^2-1)^2*(x*y + 3)", 0.1),
])
def test_circle_divisor_soundness(src, r_min):
    p = parse_phi(src)
    radii = circle_divisor_radii(p, r_min)
    assert radii
    for r in radii:
        lo, hi, _, _ = circle_min_max(p, r, 1024)
        assert max(abs(lo), abs(hi)) <= 1e-8 * (1 + p.norm1())


# -- univariate and Sturm ----------------------------------------------------------------

def test_sturm_positive_roots_examples():
    assert sturm_count_positive_roots(UnivariatePoly([-1, 0, 1])) == 1
    assert sturm_count_positive_roots(UnivariatePoly([2, -4, 6])) == 0
    assert sturm_count_positive_roots(UnivariatePoly([0, 2, -3, 1])) == 2


def test_sturm_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        sturm_count_positive_roots(UnivariatePoly())


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=5, unique=True))
def test_sturm_counts_constructed_roots(roots):
    # roots are distinct integers, so numpy's root finder is a fair oracle
    q = UnivariatePoly(np.polynomial.polynomial.polyfromroots(roots))
    assert sturm_count_positive_roots(q) == sum(1 for r in roots if r > 0)
    assert sturm_count(q, -math.inf, math.inf) == len(roots)
    assert sturm_count(q, -0.5, 2.5) == sum(1 for r in roots if -0.5 < r <= 2.5)


def test_sturm_counts_repeated_roots_once():
    q = UnivariatePoly(np.polynomial.polynomial.polyfromroots([1, 1, 2, -3]))
    assert sturm_count_positive_roots(q) == 2


def test_univariate_basics():
    q = UnivariatePoly([1, 0, -2, 0, 0])
    assert q.degree == 2 and q(2.0) == -7.0
    assert q.derivative() == UnivariatePoly([0, -4])
    assert UnivariatePoly().is_zero()
