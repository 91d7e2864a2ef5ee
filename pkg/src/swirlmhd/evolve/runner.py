"""Integrate a configured run, sampling the diagnostics table as it goes."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import cast

from ..exceptions import BlowUpError, StabilityError
from ..exponents import ExponentSet, exponent_set
from ..functionals import DiagnosticsRow, columns, diagnostics_row
from ..grid import lp_norm, write_snapshot
from ..harness.config import Formulation, RunConfig
from ..harness.corpus import generate_initial_data
from ..littlewood_paley import besov_norm, embed_velocity
from ..recorder import CsvSink, Trajectory, TrajectoryRecorder
from ..telemetry import span_context
from .full_b import full_b_dt_bound, step_full_b
from .initial import InitialData
from .primitive import primitive_dt_bound, step_primitive
from .reform import reform_dt_bound, step_reform
from .state import (
    AxiState,
    FullBState,
    ReformState,
    StepperConfig,
    VelocityField,
    primitive_from_reform,
    reform_from_primitive,
    relative_gap,
)

__all__ = ["RunResult", "run", "step_count"]

_BOUND_SLACK = 1e-12


@dataclass(frozen=True, slots=True, eq=False)
class RunResult:
    """Outcome of :func:`run`.

    ``max_swirl_increase`` is the largest one-step increase of max |r u^theta| relative to its
    initial value; ``max_B_increase`` maps each decay exponent k to the largest one-step relative
    increase of ||B||_{L^k}.
    """

    config: RunConfig
    initial: InitialData
    trajectory: Trajectory
    dt: float
    steps: int
    max_swirl_increase: float
    max_B_increase: dict[float, float]
    primitive: AxiState | None
    reform: ReformState | None
    full_b: FullBState | None
    csv_path: Path | None


def step_count(t_end: float, dt: float) -> tuple[int, float]:
    """Number of steps and the equalized step so that n * dt_eff == t_end."""
    if t_end == 0.0:
        return 0, dt
    n = max(1, math.ceil(t_end / dt - 1e-12))
    return n, t_end / n


class _Runner:
    def __init__(self, cfg: RunConfig, data: InitialData) -> None:
        self.cfg = cfg
        self.exps: ExponentSet = exponent_set(cfg.p)
        self.epsilon = float(self.exps.epsilon)
        self.primitive = data.primitive if cfg.formulation is not Formulation.REFORM else None
        self.reform = data.reform if cfg.formulation is not Formulation.PRIMITIVE else None
        self.full_b = FullBState.pure_swirl(data.primitive.b_theta) if cfg.stepper.track_structure else None
        self.columns = columns(cfg.lp.enabled)
        self.swirl0 = lp_norm(data.primitive.u_theta, math.inf, 1.0)
        self.max_swirl_increase = 0.0
        self.max_B_increase = {float(k): 0.0 for k in self.exps.B_exponents}

    def bound(self) -> float:
        scheme = self.cfg.stepper.scheme
        bounds = [math.inf]
        if self.primitive is not None:
            bounds.append(primitive_dt_bound(self.primitive, scheme))
        if self.reform is not None:
            bounds.append(reform_dt_bound(self.reform, scheme))
        if self.full_b is not None:
            bounds.append(full_b_dt_bound(self._velocity_view(), scheme))
        return min(bounds)

    def _primitive_view(self) -> AxiState:
        if self.primitive is not None:
            return self.primitive
        return primitive_from_reform(cast(ReformState, self.reform))

    def _reform_view(self) -> ReformState:
        if self.reform is not None:
            return self.reform
        return reform_from_primitive(cast(AxiState, self.primitive), self.epsilon)

    def _velocity_view(self) -> VelocityField:
        if self.primitive is not None:
            return self.primitive.velocity()
        return cast(ReformState, self.reform).velocity()

    def _formulation_gap(self) -> float:
        if self.primitive is None or self.reform is None:
            return 0.0
        rebuilt = primitive_from_reform(self.reform)
        return max(
            relative_gap(self.primitive.u_theta, rebuilt.u_theta),
            relative_gap(self.primitive.b_theta, rebuilt.b_theta),
            relative_gap(self.primitive.omega_theta, rebuilt.omega_theta),
        )

    def row(self, time: float) -> DiagnosticsRow:
        primitive, reform = self._primitive_view(), self._reform_view()
        extra: dict[str, float] = {}
        if self.cfg.lp.enabled:
            velocity = embed_velocity(primitive.velocity(), self.cfg.lp.N, self.cfg.lp.L)
            extra = {
                "besov_u_m1": besov_norm(velocity, -1.0, math.inf, 1.0, physical=True),
                "besov_u_p1": besov_norm(velocity, 1.0, math.inf, 1.0, physical=True),
            }
        return diagnostics_row(
            time,
            primitive.u_theta,
            primitive.b_theta,
            primitive.omega_theta,
            primitive.u_r,
            primitive.u_z,
            reform.B,
            reform.eta,
            reform.V,
            self.exps,
            structure_residual=self.full_b.structure_residual() if self.full_b is not None else 0.0,
            formulation_gap=self._formulation_gap(),
            extra=extra,
        )

    def advance(self, step_cfg: StepperConfig) -> None:
        before_swirl = lp_norm(self._primitive_view().u_theta, math.inf, 1.0)
        before_B = {k: lp_norm(self._reform_view().B, k) for k in self.max_B_increase}
        velocity = self._velocity_view() if self.full_b is not None else None
        if self.primitive is not None:
            self.primitive = step_primitive(self.primitive, step_cfg)
        if self.reform is not None:
            self.reform = step_reform(self.reform, step_cfg)
        if self.full_b is not None:
            self.full_b = step_full_b(self.full_b, cast(VelocityField, velocity), step_cfg)
        after_swirl = lp_norm(self._primitive_view().u_theta, math.inf, 1.0)
        if self.swirl0 > 0.0:
            self.max_swirl_increase = max(self.max_swirl_increase, (after_swirl - before_swirl) / self.swirl0)
        reform = self._reform_view()
        for k, before in before_B.items():
            if before > 0.0:
                growth = (lp_norm(reform.B, k) - before) / before
                self.max_B_increase[k] = max(self.max_B_increase[k], growth)

    def write_snapshots(self, directory: Path, index: int, time: float) -> None:
        directory.mkdir(parents=True, exist_ok=True)
        primitive = self._primitive_view()
        for f in (primitive.u_theta, primitive.b_theta, primitive.omega_theta):
            write_snapshot(directory / f"{self.cfg.name}_{f.name}_{index:06d}.bin", f, time)


def run(cfg: RunConfig, *, initial: InitialData | None = None) -> RunResult:
    """Integrate ``cfg`` to ``stepper.t_end``.

    The step is ``stepper.dt`` or ``cfl_safety`` times the initial stability bound (capped by the
    mesh size), equalized so that a whole number of steps lands on ``t_end``. A blow-up aborts the
    run after the rows collected so far are flushed; the error carries them as ``trajectory``.
    """
    data = initial if initial is not None else generate_initial_data(cfg)
    runner = _Runner(cfg, data)
    stepper = cfg.stepper
    bound = runner.bound()
    if stepper.dt is None:
        dt = stepper.cfl_safety * min(bound, data.primitive.grid.h)
    elif stepper.dt > stepper.cfl_safety * bound * (1.0 + _BOUND_SLACK):
        raise StabilityError(stepper.dt, stepper.cfl_safety * bound)
    else:
        dt = stepper.dt
    steps, dt = step_count(stepper.t_end, dt)
    step_cfg = stepper.model_copy(update={"dt": dt})

    recorder = TrajectoryRecorder(runner.columns)
    sink = CsvSink(cfg.output.csv, runner.columns) if cfg.output.csv else None
    unsubscribe = recorder.subscribe(sink) if sink is not None else None
    snapshot_dir = Path(cfg.output.snapshots) if cfg.output.snapshots else None
    attributes = {"name": cfg.name, "Nr": cfg.grid.Nr, "Nz": cfg.grid.Nz, "dt": dt, "steps": steps}
    logging.info("run %s: %d steps of dt=%.6e (bound %.6e)", cfg.name, steps, dt, bound)
    try:
        with span_context("swirlmhd.run", attributes=attributes):
            recorder.apply(runner.row(0.0))
            samples = 1
            for step in range(1, steps + 1):
                runner.advance(step_cfg)
                if step % stepper.sample_every == 0 or step == steps:
                    time = stepper.t_end if step == steps else step * dt
                    row = runner.row(time)
                    recorder.apply(row)
                    logging.debug("run %s: step %d t=%.6g M=%.6e", cfg.name, step, time, row["M"])
                    samples += 1
                    if snapshot_dir is not None and cfg.output.snapshot_every and samples % cfg.output.snapshot_every == 0:
                        runner.write_snapshots(snapshot_dir, step, time)
            if snapshot_dir is not None:
                runner.write_snapshots(snapshot_dir, steps, stepper.t_end)
    except BlowUpError as error:
        logging.exception("run %s blew up in %s at t=%.6g", cfg.name, error.field, error.time)
        error.trajectory = recorder.snapshot() if len(recorder) else None
        raise
    finally:
        if unsubscribe is not None:
            unsubscribe()
        if sink is not None:
            sink.close()
    return RunResult(
        config=cfg,
        initial=data,
        trajectory=recorder.snapshot(),
        dt=dt,
        steps=steps,
        max_swirl_increase=runner.max_swirl_increase,
        max_B_increase=runner.max_B_increase,
        primitive=runner.primitive,
        reform=runner.reform,
        full_b=runner.full_b,
        csv_path=Path(cfg.output.csv) if cfg.output.csv else None,
    )
