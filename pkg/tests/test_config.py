from __future__ import annotations

from pathlib import Path

import pytest

from swirlmhd.evolve.state import Scheme, StepperConfig
from swirlmhd.exceptions import ConfigError
from swirlmhd.harness.config import (
    Formulation,
    GridConfig,
    LPConfig,
    RunConfig,
    dump_config,
    load_config,
    parse_config,
)

GOLDEN_DIR = Path(__file__).parent / "golden"


def test_default_config_matches_golden() -> None:
    assert dump_config(RunConfig()) == (GOLDEN_DIR / "default_config.txt").read_text()


def test_dumped_config_parses_back() -> None:
    cfg = RunConfig(
        name="wide-run",
        p=1.03,
        formulation=Formulation.BOTH,
        grid=GridConfig(Nr=48, Nz=96, Rmax=3.0, Lz=6.0),
        stepper=StepperConfig(dt=1e-3, scheme=Scheme.EXPLICIT_RK2, t_end=0.25, track_structure=True),
        lp=LPConfig(enabled=True, N=16, L=12.0),
    )
    assert parse_config(dump_config(cfg)) == cfg


def test_comments_blank_lines_and_none() -> None:
    cfg = parse_config("# header\n\nname = demo  # trailing\nstepper.dt = none\nlp.enabled = true\n")
    assert cfg.name == "demo"
    assert cfg.stepper.dt is None
    assert cfg.lp.enabled


def test_load_config(tmp_path) -> None:
    path = tmp_path / "run.cfg"
    path.write_text("formulation = reform\ngrid.Nr = 16\n")
    cfg = load_config(path)
    assert cfg.formulation is Formulation.REFORM
    assert cfg.grid.Nr == 16


@pytest.mark.parametrize(
    "text, line, key",
    [
        ("name = a\nnot a pair\n", 2, None),
        ("p = 1.02\np = 1.03\n", 2, "p"),
        ("mesh.Nr = 16\n", 1, "mesh.Nr"),
        ("name = a\ngrid.Nr = 4\n", 2, "grid.Nr"),
        ("name = a\n\np = 1.2\n", 3, "p"),
        ("bogus = 1\n", 1, "bogus"),
        ("name = a\nlp.L = 10.0\n", 2, "lp.L"),
        ("name = a\ninitial.margin = 0.5\ninitial.height_fraction = 0.5\ninitial.center_fraction = 0.4\n", 2, "initial"),
        ("lp.N = 24\n", 1, "lp"),
    ],
)
def test_invalid_configs_report_their_line(text: str, line: int, key: str | None) -> None:
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line
    assert info.value.key == key
    assert str(info.value).startswith(f"line {line}:")
    assert info.value.exit_code == 2


def test_p_above_the_admissible_range_is_rejected() -> None:
    with pytest.raises(ConfigError):
        parse_config("p = 1.05\n")
