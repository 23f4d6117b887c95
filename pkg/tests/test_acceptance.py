"""Acceptance suite: eleven criteria, each with its tolerance and runtime bound.

Run with ``pytest tests/test_acceptance.py`` or ``python3 tests/test_acceptance.py``;
either way one PASS/FAIL line per criterion is printed at the end.

Oracles are independent of the package: exact polynomial identities built
from a hand-written ``Q``, the smallest eigenvalue of ``Q``'s matrix for the
trapping radius, first-order averaging for the small-eps cycle, and the
harmonic oscillator for conservation and the order ladder.
"""

import io
import json
import math
import sys
import time
from contextlib import redirect_stdout

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from limcyc.certify import (
    Method,
    Status,
    VerdictKind,
    certify_star_shape,
    trapping_radius,
)
from limcyc.cli import main as cli_main
from limcyc.cycle import find_cycle, return_map_slope
from limcyc.dynamics import IntegratorOptions, State, integrate, solve
from limcyc.model import etba, euler_family, model_from_source, qpoly
from limcyc.pipeline import analyze
from limcyc.poly import homogeneous_decompose, parse_phi
from limcyc.verify import origin_instability_check, trapping_check, uniqueness_sweep

TWO_PI = 2 * math.pi
Q = parse_phi("x^2 + x*y + y^2")
SIGMA_ORACLE = math.sqrt(1.0 / np.linalg.eigvalsh([[1.0, 0.5], [0.5, 1.0]])[0])


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def criterion(number, title):
    return pytest.mark.criterion(number, title)


@criterion(1, "ETBA certificate: S = 2(x^2+xy+y^2), StrictPositive, ExistsUnique")
def test_c01_etba_certificate():
    buf = io.StringIO()
    with Timer() as t, redirect_stdout(buf):
        code = cli_main(["certify", "--model", "etba", "--param", "eps=1"])
    d = json.loads(buf.getvalue())
    assert code == 0
    assert d["certificate"]["status"] == "StrictPositive"
    assert d["verdict"]["kind"] == "ExistsUnique"
    assert etba(1.0).S == 2.0 * Q
    assert t.elapsed < 1.0


@criterion(2, "Q-polynomial: S = 2Q - 4Q^2 + 6Q^3, discriminant -32")
def test_c02_qpoly_discriminant():
    with Timer() as t:
        m = qpoly()
        c = certify_star_shape(m)
    assert m.S == 2.0 * Q - 4.0 * Q ** 2 + 6.0 * Q ** 3
    assert c.status is Status.STRICT_POSITIVE
    assert c.details["discriminant"] == -32.0
    assert t.elapsed < 1.0


@criterion(3, "Euler family: EulerStructured, parts equal 2k Q^k")
def test_c03_euler_family():
    with Timer() as t:
        for M in (0.5, 1.0, 2.0):
            m = euler_family(M, 3)
            c = certify_star_shape(m)
            assert c.status is Status.STRICT_POSITIVE
            assert c.method is Method.EULER_STRUCTURED
            parts = homogeneous_decompose(m.S)
            assert [p.degree for p in parts] == [2, 4, 6]
            for k, p in enumerate(parts, start=1):
                assert p.poly == (2.0 * k) * Q ** k
    assert t.elapsed < 1.0


@criterion(4, "Trapping radius sqrt(2) for Q - 1 and ETBA")
def test_c04_trapping_radius():
    with Timer() as t:
        sigmas = [trapping_radius(model_from_source("x^2 + x*y + y^2 - 1")).sigma]
        sigmas += [trapping_radius(etba(eps)).sigma for eps in (0.01, 1.0, 7.5)]
    for s in sigmas:
        assert abs(s - SIGMA_ORACLE) <= 1e-6
    assert t.elapsed < 1.0


@criterion(5, "Small-eps cycle: amplitude and period match averaging")
def test_c05_small_eps_cycle():
    def balance(r):
        return quad(lambda s: math.sin(s) ** 2 * ((r * r) * (1 - math.sin(s) * math.cos(s)) - 1),
                    0, TWO_PI)[0]
    r_avg = brentq(balance, 0.1, 3.0)
    with Timer() as t:
        c = find_cycle(etba(0.01), 1.0)
    assert abs(c.x_star - r_avg) < 0.005 and abs(c.x_star - 1.0) < 0.005
    assert abs(c.period - TWO_PI) < 0.01
    assert t.elapsed < 10.0


@criterion(6, "Stability coherence: nu < 0, multiplier in (0,1), slope agreement")
def test_c06_stability_coherence():
    with Timer() as t:
        for eps in (0.1, 1.0):
            m = etba(eps)
            c = find_cycle(m, 1.0)
            slope = return_map_slope(m, c.x_star)
            assert c.nu_integral < 0
            assert 0 < c.floquet_multiplier < 1
            assert abs(c.floquet_multiplier - slope) / c.floquet_multiplier <= 1e-3
    assert t.elapsed < 30.0


@criterion(7, "Uniqueness sweep: 16 log-spaced seeds converge to one cycle")
def test_c07_uniqueness_sweep():
    sigma = SIGMA_ORACLE
    # the Q-polynomial grows like r^6, so seeds far outside its cycle are
    # stiff for an explicit integrator; its seeds span [0.2, 3] instead
    cases = [(etba(0.1), np.geomspace(sigma / 20, 8 * sigma, 16)),
             (etba(1.0), np.geomspace(sigma / 20, 8 * sigma, 16)),
             (qpoly(), np.geomspace(0.2, 3.0, 16))]
    with Timer() as t:
        for m, radii in cases:
            rep = uniqueness_sweep(m, radii)
            assert len(rep.entries) == 16
            assert all(e.outcome == "Converged" for e in rep.entries), [e.message for e in rep.entries]
            xs = [e.x_star for e in rep.entries]
            assert max(xs) - min(xs) <= 1e-6 * (1 + rep.consensus_x_star)
    assert t.elapsed < 120.0


@criterion(8, "Trapping disk is entered and never left")
def test_c08_trapping_check():
    with Timer() as t:
        for eps in (0.1, 1.0):
            for k in (2, 8):
                res = trapping_check(etba(eps), SIGMA_ORACLE, k * SIGMA_ORACLE)
                assert res.entered_at is not None and res.stayed
                assert res.max_V_after_entry <= 0.5 * SIGMA_ORACLE ** 2 * (1 + 1e-6)
    assert t.elapsed < 30.0


@criterion(9, "Origin is negatively asymptotically stable")
def test_c09_origin_reverse_time():
    with Timer() as t:
        for eps in (0.1, 1.0):
            m = etba(eps)
            assert origin_instability_check(m, 0.05)
            # and directly: a reverse run from radius 0.05 reaches 5e-4
            tr = integrate(m, State(0.05, 0.0), IntegratorOptions(t_end=1e3, direction="reverse"),
                           stop=lambda s: math.hypot(*s.u) <= 5e-4)
            assert math.hypot(*tr.final) <= 5e-4
    assert t.elapsed < 10.0


@criterion(10, "Negative controls: van der Pol, positive damping, harmonic")
def test_c10_negative_controls():
    with Timer() as t:
        c = certify_star_shape(model_from_source("x^2 - 1"))
        assert c.status is Status.NON_STRICT
        assert c.witnesses and all(abs(w[0]) < 1e-12 for w in c.witnesses)

        rep = analyze(model_from_source("1"))
        assert rep.verdict.kind is VerdictKind.HYPOTHESES_FAILED
        assert rep.sweep.consensus_x_star is None
        assert not [e for e in rep.sweep.entries if e.outcome == "Converged"]

        tr = integrate(model_from_source("0"), State(1.0, 0.0), IntegratorOptions(t_end=10 * TWO_PI))
        V = 0.5 * (tr.u[:, 0] ** 2 + tr.u[:, 1] ** 2)
        assert np.max(np.abs(V - 0.5)) <= 1e-9
    assert t.elapsed < 10.0


@criterion(11, "Integrator order ladder >= 4.5")
def test_c11_order_ladder():
    def f(t, u):
        return (u[1], -u[0])

    with Timer() as t:
        pts = []
        for tol in (1e-6, 1e-8, 1e-10):
            tr = solve(f, 0.0, [1.0, 0.0], 10 * TWO_PI, tol, tol)
            err = math.hypot(tr.final[0] - math.cos(10 * TWO_PI), tr.final[1] + math.sin(10 * TWO_PI))
            pts.append((tr.stats["accepted"], err))
    for (n1, e1), (n2, e2) in zip(pts, pts[1:]):
        assert -math.log(e2 / e1) / math.log(n2 / n1) >= 4.5
    assert t.elapsed < 5.0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
