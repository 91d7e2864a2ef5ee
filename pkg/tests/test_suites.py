from __future__ import annotations

import importlib
import pkgutil
from contextlib import nullcontext

import pytest

import swirlmhd
import swirlmhd.harness.suites as suites
from swirlmhd.exceptions import DomainError
from swirlmhd.harness.report import Check
from swirlmhd.harness.suites import REGISTRY, SuiteContext, SuiteRegistry

QUICK = SuiteContext(seed=7, quick=True)


def test_registry_order() -> None:
    assert REGISTRY.names == (
        "exponents",
        "operators",
        "elliptic",
        "conservation",
        "structure",
        "smalldata",
        "lp",
        "duhamel",
    )
    assert len(REGISTRY.resolve("all")) == len(REGISTRY.names)
    with pytest.raises(DomainError):
        REGISTRY.resolve("nope")


def test_failures_are_reported() -> None:
    registry = SuiteRegistry()

    @registry.register("broken", "always fails")
    def _broken(ctx: SuiteContext) -> list[Check]:
        return [Check.at_most("ok", 0.0, 1.0), Check.at_most("too big", 2.0, 1.0)]

    (report,) = registry.run("all", QUICK)
    assert report.suite == "broken"
    assert report.failed == ["too big"]


def test_reports_keep_registry_order() -> None:
    registry = SuiteRegistry()
    for name in ("first", "second", "third"):
        registry.register(name, name)(lambda ctx, name=name: [Check.finite(name, float(ctx.seed))])
    assert [report.suite for report in registry.run("all", QUICK)] == ["first", "second", "third"]


@pytest.mark.parametrize("name", ["exponents", "operators", "elliptic", "lp", "duhamel"])
def test_quick_suite_passes(name: str) -> None:
    (report,) = REGISTRY.run(name, QUICK)
    assert report.passed, report.render()


@pytest.mark.slow
@pytest.mark.parametrize("name", ["conservation", "structure", "smalldata"])
def test_evolution_suite_passes(name: str) -> None:
    (report,) = REGISTRY.run(name, QUICK)
    assert report.passed, report.render()


def test_every_module_imports() -> None:
    walked = pkgutil.walk_packages(swirlmhd.__path__, "swirlmhd.")
    names = [info.name for info in walked if not info.name.endswith("__main__")]
    assert "swirlmhd.harness.suites" in names
    for name in names:
        importlib.import_module(name)


def test_elliptic_suite_covers_every_exponent() -> None:
    (report,) = REGISTRY.run("elliptic", QUICK)
    names = {check.name for check in report.checks}
    for m in ("1.5", "2.5", "4.5"):
        assert f"max Biot-Savart ratio (m={m})" in names
        assert f"Biot-Savart ratio (m={m}) change under refinement" in names
    for label in ("q1", "3p"):
        assert f"max ||u^r/r||_{label} ratio" in names
        assert f"||u^r/r||_{label} ratio change under refinement" in names


def test_operators_suite_covers_advection_and_divergence() -> None:
    (report,) = REGISTRY.run("operators", QUICK)
    names = {check.name for check in report.checks}
    assert "advect error ratio (monotone region, max norm)" in names
    assert "div_weighted_residual error ratio" in names
    assert "curl_from_swirl (radial) error ratio" in names


def test_suites_open_a_verify_span(monkeypatch) -> None:
    opened: list[str] = []

    def record(name, *, attributes=None):
        opened.append(name)
        return nullcontext()

    monkeypatch.setattr(suites, "span_context", record)
    REGISTRY.run("exponents", QUICK)
    assert opened == ["swirlmhd.verify"]
