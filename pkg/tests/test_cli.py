"""Command-line front end: subcommands, exit codes and output formats."""

import csv
import io
import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from limcyc.cli import main
from limcyc.report import AnalysisReport

TWO_PI = 2 * math.pi


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_rows(text):
    return [{k: float(v) for k, v in r.items()} for r in csv.DictReader(io.StringIO(text))]


# -- certify ---------------------------------------------------------------------------------

def test_certify_etba(capsys):
    code, out, _ = run(capsys, "certify", "--model", "etba", "--param", "eps=1")
    assert code == 0
    d = json.loads(out)
    assert d["certificate"]["status"] == "StrictPositive"
    assert d["verdict"]["kind"] == "ExistsUnique"
    assert d["trapping"]["sigma"] == pytest.approx(math.sqrt(2), abs=1e-6)


def test_certify_van_der_pol(capsys):
    code, out, _ = run(capsys, "certify", "--phi", "x^2-1")
    d = json.loads(out)
    assert code == 0
    assert d["certificate"]["status"] == "NonStrict"
    assert d["verdict"]["kind"] == "HypothesesFailed"
    assert any(abs(w[0]) < 1e-12 for w in d["certificate"]["witnesses"])


def test_certify_no_timings_is_byte_identical(capsys):
    argv = ("certify", "--model", "qpoly", "--no-timings")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b and json.loads(a)["timings"] == {}


def test_certify_writes_out_file(capsys, tmp_path):
    path = tmp_path / "cert.json"
    code, out, _ = run(capsys, "certify", "--model", "euler-family", "--param", "M=2", "--out", str(path))
    assert code == 0 and out == ""
    rep = AnalysisReport.loads(path.read_text())
    assert rep.certificate.method.value == "EulerStructured"


@pytest.mark.parametrize("argv", [
    ("certify", "--phi", "x/y"),
    ("certify", "--phi", "eps*x"),
    ("certify", "--phi", "x^2", "--param", "oops"),
    ("sweep", "--model", "qpoly", "--eps", "0.1"),
    ("sweep", "--eps", "0.1,abc"),
    ("plot", "--out", "x.svg"),
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("limcyc: ")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["certify", "--phi", "x", "--model", "etba"])
    assert exc.value.code == 2


# -- simulate --------------------------------------------------------------------------------

def test_simulate_harmonic_returns_home(capsys):
    code, out, _ = run(capsys, "simulate", "--phi", "0", "--x0", "1", "--t-end", str(TWO_PI))
    assert code == 0
    rows = read_rows(out)
    assert list(rows[0]) == ["t", "x", "y", "V", "Vdot"]
    assert rows[-1]["x"] == pytest.approx(1.0, abs=1e-8) and abs(rows[-1]["y"]) < 1e-8
    assert max(abs(r["V"] - 0.5) for r in rows) <= 1e-9


def test_simulate_enters_trapping_disk(capsys):
    code, out, _ = run(capsys, "simulate", "--model", "etba", "--param", "eps=1",
                       "--x0", "10", "--t-end", "100")
    last = read_rows(out)[-1]
    assert code == 0 and math.hypot(last["x"], last["y"]) <= math.sqrt(2) * (1 + 1e-3)


def test_simulate_leaves_origin(capsys):
    code, out, _ = run(capsys, "simulate", "--model", "etba", "--param", "eps=1",
                       "--x0", "0.01", "--t-end", "100")
    last = read_rows(out)[-1]
    assert code == 0 and math.hypot(last["x"], last["y"]) > 0.1


def test_simulate_reverse_blowup_exits_3_with_partial_csv(capsys):
    code, out, err = run(capsys, "simulate", "--model", "etba", "--param", "eps=1",
                         "--x0", "3", "--t-end", "50", "--reverse")
    assert code == 3 and "integration failed" in err
    rows = read_rows(out)
    assert len(rows) > 1 and rows[-1]["t"] < 0


def test_simulate_rejects_nonfinite(capsys):
    code, _, _ = run(capsys, "simulate", "--phi", "0", "--x0", "nan")
    assert code == 2


# -- cycle, analyze, sweep -----------------------------------------------------------------

def test_cycle_small_eps(capsys):
    code, out, _ = run(capsys, "cycle", "--model", "etba", "--param", "eps=0.01")
    d = json.loads(out)
    assert code == 0
    assert abs(d["cycle"]["x_star"] - 1.0) < 0.005
    assert abs(d["cycle"]["period"] - TWO_PI) < 0.01
    assert abs(d["cycle"]["floquet_multiplier"] - d["return_map_slope"]) <= 1e-3


def test_cycle_csv_format(capsys):
    code, out, _ = run(capsys, "cycle", "--model", "etba", "--param", "eps=1", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "t,x,y" and len(lines) > 512


def test_cycle_absent_exits_4(capsys):
    code, _, err = run(capsys, "cycle", "--phi", "1")
    assert code == 4 and "no cycle" in err


def test_analyze_etba_with_svg(capsys, tmp_path):
    svg = tmp_path / "a.svg"
    rep_path = tmp_path / "a.json"
    code, _, _ = run(capsys, "analyze", "--model", "etba", "--param", "eps=1", "--no-timings",
                     "--out", str(rep_path), "--svg", str(svg))
    assert code == 0
    rep = AnalysisReport.loads(rep_path.read_text())
    assert rep.verdict.kind.value == "ExistsUnique"
    assert rep.sweep.consensus_x_star == pytest.approx(rep.cycle.x_star, abs=1e-6)
    assert rep.checks["trapping"]["stayed"] is True
    assert rep.checks["origin_instability"]["reached"] is True
    root = ET.parse(svg).getroot()
    assert sum(1 for e in root.iter() if "limit-cycle" in e.get("class", "").split()) == 1
    # the same report re-plotted gives the same picture
    svg2 = tmp_path / "b.svg"
    assert run(capsys, "plot", "--report", str(rep_path), "--out", str(svg2))[0] == 0
    assert svg2.read_bytes() == svg.read_bytes()
    # and re-serialising the loaded report reproduces the file
    assert rep.dumps(include_timings=False) == rep_path.read_text()


def test_analyze_positive_constant(capsys):
    code, out, _ = run(capsys, "analyze", "--phi", "1", "--no-timings")
    d = json.loads(out)
    assert code == 0
    assert d["verdict"]["kind"] == "HypothesesFailed" and d["cycle"] is None
    assert d["sweep"]["consensus_x_star"] is None
    assert {e["outcome"] for e in d["sweep"]["entries"]} == {"NoBracket"}


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "--model", "etba", "--eps", "0.01,0.1,1", "--format", "csv")
    rows = read_rows(out)
    assert code == 0 and len(rows) == 3
    assert rows[0]["x_star"] > rows[1]["x_star"] > rows[2]["x_star"]


def test_sweep_json_reports_out_of_range(capsys):
    code, out, _ = run(capsys, "sweep", "--eps", "0.5,11")
    entries = json.loads(out)["entries"]
    assert code == 0 and entries[0]["cycle"] is not None and entries[1]["cycle"] is None


# -- plot ------------------------------------------------------------------------------------

def test_plot_two_trajectories(capsys, tmp_path):
    paths = []
    for k, x0 in enumerate(("0.1", "3")):
        p = tmp_path / f"t{k}.csv"
        run(capsys, "simulate", "--model", "etba", "--x0", x0, "--t-end", "30", "--out", str(p))
        paths += ["--trajectory", str(p)]
    out = tmp_path / "p.svg"
    assert run(capsys, "plot", *paths, "--out", str(out))[0] == 0
    classes = {e.get("class") for e in ET.parse(out).getroot().iter()}
    assert "trajectory trajectory-0" in classes and "trajectory trajectory-1" in classes


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "limcyc.cli", "--version"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.startswith("limcyc ")
