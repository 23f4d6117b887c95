"""The damping polynomial phi and the fields derived from it.

The system studied throughout is ``x' = y, y' = -x - y * phi(x, y)``.
"""

from dataclasses import dataclass, field

from .poly import BivariatePoly, parse_phi, partial

ETBA_TEMPLATE = "eps*(x^2 + x*y + y^2 - 1)"
QPOLY_SOURCE = "-1 + (x^2+x*y+y^2) - (x^2+x*y+y^2)^2 + (x^2+x*y+y^2)^3"


@dataclass(frozen=True)
class PhiModel:
    """phi with its partial derivatives, radial derivative and divergence.

    ``S = x * dphi/dx + y * dphi/dy`` and ``div_poly = -phi - y * dphi/dy``
    are exact polynomial identities. Compiled scalar callables for the hot
    paths are attached after construction.
    """

    phi: BivariatePoly
    dphi_dx: BivariatePoly
    dphi_dy: BivariatePoly
    S: BivariatePoly
    div_poly: BivariatePoly
    source: str = ""
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        phi, S, div = self.phi, self.S, self.div_poly

        def rhs(t, u):
            x, y = u[0], u[1]
            return (y, -x - y * phi(x, y))

        def rhs_aug(t, u):
            # state, then integrands of the nu and divergence quadratures
            x, y = u[0], u[1]
            return (y, -x - y * phi(x, y), -y * y * S(x, y), div(x, y))

        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "rhs_augmented", rhs_aug)


def build_model(phi, source="", params=None):
    """Derive every polynomial the certificates and dynamics need from ``phi``."""
    dx = partial(phi, "x")
    dy = partial(phi, "y")
    X, Y = BivariatePoly.x(), BivariatePoly.y()
    S = X * dx + Y * dy
    div_poly = -phi - Y * dy
    return PhiModel(phi, dx, dy, S, div_poly, source=source or str(phi),
                    params=dict(params or {}))


def model_from_source(src, params=None):
    return build_model(parse_phi(src, params), source=src, params=params)


def etba(eps=1.0):
    """phi = eps * (x^2 + x*y + y^2 - 1)."""
    return model_from_source(ETBA_TEMPLATE, {"eps": eps})


def qpoly():
    """phi = -1 + Q - Q^2 + Q^3 with Q = x^2 + x*y + y^2."""
    return model_from_source(QPOLY_SOURCE)


def euler_family(M=1.0, n=3):
    """phi = -M + sum_{k=1..n} Q^k, each Q^k homogeneous of degree 2k."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    terms = " + ".join(f"(x^2+x*y+y^2)^{k}" for k in range(1, n + 1))
    src = f"-M + {terms}"
    return build_model(parse_phi(src, {"M": M}), source=src, params={"M": M, "n": n})


BUILTIN_MODELS = {
    "etba": (ETBA_TEMPLATE, {"eps": 1.0}),
    "qpoly": (QPOLY_SOURCE, {}),
    "euler-family": (None, {"M": 1.0, "n": 3}),
}


def builtin_model(name, params=None):
    """Instantiate a named model; ``params`` override the defaults."""
    if name not in BUILTIN_MODELS:
        raise ValueError(f"unknown model {name!r}; choose from {sorted(BUILTIN_MODELS)}")
    merged = dict(BUILTIN_MODELS[name][1])
    merged.update(params or {})
    if name == "etba":
        return etba(merged["eps"])
    if name == "qpoly":
        return qpoly()
    return euler_family(merged["M"], merged["n"])
