from __future__ import annotations

import math
from contextlib import nullcontext

import numpy as np
import pytest

import swirlmhd.evolve.runner as runner
from swirlmhd.evolve.primitive import step_primitive
from swirlmhd.evolve.runner import run, step_count
from swirlmhd.evolve.state import StepperConfig
from swirlmhd.exceptions import BlowUpError, StabilityError
from swirlmhd.grid import read_snapshot
from swirlmhd.harness.config import Formulation, GridConfig, OutputConfig, RunConfig


def small_config(**stepper) -> RunConfig:
    return RunConfig(name="tiny", grid=GridConfig(Nr=16, Nz=16), stepper=StepperConfig(**stepper))


@pytest.mark.parametrize(
    ("t_end", "dt", "expected"),
    [(1.0, 0.3, (4, 0.25)), (0.0, 0.1, (0, 0.1)), (0.5, 0.1, (5, 0.1))],
)
def test_step_count_lands_on_t_end(t_end: float, dt: float, expected: tuple[int, float]) -> None:
    steps, dt_eff = step_count(t_end, dt)
    assert steps == expected[0]
    assert dt_eff == pytest.approx(expected[1])


def test_small_run_samples_every_step(tmp_path) -> None:
    csv = tmp_path / "tiny.csv"
    cfg = small_config(dt=0.01, t_end=0.05).model_copy(update={"output": OutputConfig(csv=str(csv))})
    result = run(cfg)
    assert result.steps == 5
    assert result.dt == pytest.approx(0.01)
    assert result.reform is None
    assert result.initial.smallness.passed
    np.testing.assert_allclose(result.trajectory.times, np.linspace(0.0, 0.05, 6))
    assert result.trajectory.times[-1] == 0.05
    assert result.max_swirl_increase <= 1e-12
    assert result.csv_path == csv
    assert csv.read_text() == result.trajectory.to_csv()
    assert csv.read_text().startswith("time,ru_theta_linf,")


def test_sample_every_keeps_the_last_step() -> None:
    result = run(small_config(dt=0.01, t_end=0.05, sample_every=2))
    np.testing.assert_allclose(result.trajectory.times, [0.0, 0.02, 0.04, 0.05])


def test_oversized_dt_is_refused() -> None:
    cfg = small_config(dt=1.0, t_end=1.0).model_copy(update={"formulation": Formulation.REFORM})
    with pytest.raises(StabilityError):
        run(cfg)


def test_both_formulations_are_compared() -> None:
    cfg = small_config(t_end=0.05, track_structure=True).model_copy(update={"formulation": Formulation.BOTH})
    result = run(cfg)
    assert result.primitive is not None
    assert result.reform is not None
    assert result.full_b is not None
    gap = result.trajectory.column("formulation_gap")
    assert 0.0 < gap[-1] < math.inf
    assert np.all(result.trajectory.column("structure_residual") == 0.0)


def test_snapshots_of_the_final_state(tmp_path) -> None:
    cfg = small_config(dt=0.01, t_end=0.02).model_copy(
        update={"output": OutputConfig(snapshots=str(tmp_path / "snaps"))}
    )
    result = run(cfg)
    paths = sorted((tmp_path / "snaps").glob("*.bin"))
    assert [p.name for p in paths] == [
        "tiny_b_theta_000002.bin",
        "tiny_omega_theta_000002.bin",
        "tiny_u_theta_000002.bin",
    ]
    field, time = read_snapshot(paths[-1])
    assert time == 0.02
    np.testing.assert_array_equal(field.values, result.primitive.u_theta.values)


def test_blow_up_flushes_rows_and_carries_them(tmp_path, monkeypatch) -> None:
    calls: list[float] = []

    def exploding(state, cfg):
        calls.append(state.time)
        if len(calls) > 1:
            raise BlowUpError("omega_theta", state.time + cfg.dt)
        return step_primitive(state, cfg)

    monkeypatch.setattr("swirlmhd.evolve.runner.step_primitive", exploding)
    csv = tmp_path / "tiny.csv"
    cfg = small_config(dt=0.01, t_end=0.05).model_copy(update={"output": OutputConfig(csv=str(csv))})
    with pytest.raises(BlowUpError) as info:
        run(cfg)
    assert info.value.exit_code == 3
    assert info.value.field == "omega_theta"
    assert len(info.value.trajectory) == 2
    assert len(csv.read_text().splitlines()) == 3


def test_a_run_opens_one_run_span(monkeypatch) -> None:
    opened: list[str] = []

    def record(name, *, attributes=None):
        opened.append(name)
        return nullcontext()

    monkeypatch.setattr(runner, "span_context", record)
    run(small_config(dt=0.01, t_end=0.02))
    assert opened == ["swirlmhd.run"]
