from __future__ import annotations

import pytest

from swirlmhd.exceptions import BlowUpError
from swirlmhd.grid import write_snapshot
from swirlmhd.harness.cli import main

TINY = "name = tiny\ngrid.Nr = 16\ngrid.Nz = 16\nstepper.dt = 0.01\nstepper.t_end = 0.02\n"


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY)
    return path


def test_verify_writes_the_report(tmp_path, capsys) -> None:
    report = tmp_path / "report.txt"
    assert main(["verify", "exponents", "--quick", "--report", str(report)]) == 0
    out = capsys.readouterr().out
    assert out == report.read_text()
    assert out.splitlines()[-1] == "overall: PASS"


def test_invalid_config_exits_with_its_line(tmp_path, capsys) -> None:
    path = tmp_path / "bad.cfg"
    path.write_text("name = bad\np = 1.2\n")
    assert main(["simulate", str(path)]) == 2
    assert capsys.readouterr().err.startswith("swirlmhd: line 2:")


def test_simulate_writes_diagnostics(tiny_config, tmp_path, capsys) -> None:
    out = tmp_path / "out" / "tiny.csv"
    assert main(["simulate", str(tiny_config), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 4
    stdout = capsys.readouterr().out
    assert stdout.startswith("run tiny: 2 steps")
    assert "smallness: passed" in stdout


def test_simulate_reports_blow_up(tiny_config, tmp_path, monkeypatch, capsys) -> None:
    def exploding(state, cfg):
        raise BlowUpError("u_theta", state.time + cfg.dt)

    monkeypatch.setattr("swirlmhd.evolve.runner.step_primitive", exploding)
    assert main(["simulate", str(tiny_config), "--out", str(tmp_path / "tiny.csv")]) == 3
    assert "non-finite values in u_theta" in capsys.readouterr().err
    assert len((tmp_path / "tiny.csv").read_text().splitlines()) == 2


def test_norms_of_a_snapshot(bump_state, tmp_path, capsys) -> None:
    path = write_snapshot(tmp_path / "u.bin", bump_state.u_theta, 0.5)
    assert main(["norms", str(path), "--besov", "1,inf,1", "--N", "16"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("u_theta (odd) at t=0.5 on 32x32")
    assert "B^1_inf,1 = " in out
    assert "energy outside the band" in out


def test_norms_rejects_a_malformed_besov_triple(bump_state, tmp_path, capsys) -> None:
    path = write_snapshot(tmp_path / "u.bin", bump_state.u_theta, 0.0)
    assert main(["norms", str(path), "--besov", "1,2"]) == 2
    assert "--besov expects s,p,r" in capsys.readouterr().err


def test_sweep_summary(tiny_config, tmp_path) -> None:
    out = tmp_path / "sweep.csv"
    assert main(["sweep", str(tiny_config), "--param", "initial.A_omega", "--values", "0.001,0.002", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("initial.A_omega,final_M,")
    assert [line.split(",")[0] for line in lines[1:]] == ["0.001", "0.002"]
    assert all(line.endswith("true,false") for line in lines[1:])


def test_sweep_rejects_unknown_parameters(tiny_config, tmp_path, capsys) -> None:
    assert main(["sweep", str(tiny_config), "--param", "grid.Nx", "--values", "1", "--out", str(tmp_path / "s.csv")]) == 2
    assert "unknown parameter 'grid.Nx'" in capsys.readouterr().err
