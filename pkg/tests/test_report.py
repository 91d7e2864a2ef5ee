from __future__ import annotations

import math

from swirlmhd.harness.report import Check, SuiteReport, SweepPoint, render_report, render_sweep, write_text


def test_check_constructors() -> None:
    assert Check.at_most("x", 0.5, 1.0).passed
    assert not Check.within("y", 2.0, 0.0, 1.0).passed
    assert not Check.finite("z", math.nan).passed
    assert Check.at_most("x", 0.5, 1.0).render() == "  [PASS] x = 5.000000e-01 (<= 1.000000e+00)"
    assert Check.finite("z", math.inf).render() == "  [FAIL] z = inf (finite)"


def test_report_lists_failures_and_overall_verdict() -> None:
    good = SuiteReport(suite="a", checks=(Check.at_most("x", 0.0, 1.0),))
    bad = SuiteReport(suite="b", checks=(Check.at_most("x", 0.0, 1.0), Check.within("y", 5.0, 0.0, 1.0)))
    assert good.passed
    assert bad.failed == ["y"]
    text = render_report([good, bad], seed=3)
    lines = text.splitlines()
    assert lines[0] == "swirlmhd verification report (seed 3)"
    assert "suite a: PASS (1 checks)" in lines
    assert "suite b: FAIL (2 checks)" in lines
    assert lines[-1] == "overall: FAIL"
    assert render_report([good], seed=3).endswith("overall: PASS\n")


def test_sweep_summary() -> None:
    points = [
        SweepPoint(value="0.01", final_M=0.5, max_M_over_M0=1.0, ledger_over_2M0=0.25, smallness_passed=True, blew_up=False),
        SweepPoint(
            value="10",
            final_M=math.nan,
            max_M_over_M0=math.nan,
            ledger_over_2M0=math.nan,
            smallness_passed=False,
            blew_up=True,
        ),
    ]
    assert render_sweep("initial.A_omega", points).splitlines() == [
        "initial.A_omega,final_M,max_M_over_M0,ledger_over_2M0,smallness_passed,blew_up",
        "0.01,0.5,1,0.25,true,false",
        "10,nan,nan,nan,false,true",
    ]


def test_write_text_creates_directories(tmp_path) -> None:
    path = write_text(tmp_path / "reports" / "r.txt", "hello\n")
    assert path.read_text() == "hello\n"
