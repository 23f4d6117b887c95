"""Analysis reports and the pipeline that fills them."""

import json
import math

import pytest

from limcyc import __version__
from limcyc.model import etba, euler_family, model_from_source, qpoly
from limcyc.pipeline import analyze, certify_report, cycle_seed
from limcyc.report import AnalysisReport


@pytest.mark.parametrize("m", [etba(1.0), qpoly(), euler_family(1.0, 3), model_from_source("x^2-1")])
def test_certify_report_round_trip(m):
    rep = certify_report(m)
    back = AnalysisReport.loads(rep.dumps())
    assert back == rep
    assert back.tool_version == __version__ and back.schema_version == 1
    assert "certificates" in rep.timings


def test_no_timings_dump_is_deterministic():
    a = certify_report(etba(0.5)).dumps(include_timings=False)
    b = certify_report(etba(0.5)).dumps(include_timings=False)
    assert a == b


def test_schema_version_checked():
    d = certify_report(etba(1.0)).to_json()
    d["schema_version"] = 2
    with pytest.raises(ValueError, match="schema_version"):
        AnalysisReport.from_json(d)


def test_cycle_seed():
    assert cycle_seed(certify_report(etba(1.0)).trapping) == pytest.approx(math.sqrt(2))
    assert cycle_seed(certify_report(model_from_source("1")).trapping) == 1.0


def test_analyze_full_report_round_trip():
    rep = analyze(etba(0.1))
    assert rep.cycle is not None and rep.sweep is not None
    assert rep.sweep.consensus_x_star == pytest.approx(rep.cycle.x_star, abs=1e-6)
    assert AnalysisReport.loads(rep.dumps()) == rep
    json.loads(rep.dumps())


def test_analyze_forced_cycle_for_failed_hypotheses():
    # van der Pol form: hypotheses fail, yet a cycle exists and can be requested
    rep = analyze(model_from_source("x^2-1"), force_cycle=True, sweep=False)
    assert rep.verdict.kind.value == "HypothesesFailed"
    assert rep.cycle is not None and rep.cycle.x_star == pytest.approx(2.0, abs=0.05)
