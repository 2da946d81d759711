from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adaptive_pi.cli import main
from adaptive_pi.config import ConfigError, ExperimentConfig, dump_config, load_config, parse_config
from adaptive_pi.io import read_csv, write_csv

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _write(tmp_path, text, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_default_config_round_trip():
    cfg = ExperimentConfig()
    assert parse_config(dump_config(cfg)) == cfg


@given(n=st.integers(1, 10**5), eps=st.floats(1e-12, 1e3), cfl=st.floats(1e-6, 1.0), auto=st.booleans(),
       left=st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=5), scheme=st.sampled_from(["upwind", "lf", "force"]))
def test_config_round_trip(n, eps, cfl, auto, left, scheme):
    cfg = ExperimentConfig()
    cfg.grid.n_cells = n
    cfg.relaxation.eps_r = eps
    cfg.scheme.cfl = cfl
    cfg.scheme.type = scheme
    cfg.integrator.auto = auto
    cfg.integrator.delta_t = eps
    cfg.initial.left = left
    assert parse_config(dump_config(cfg)) == cfg


@pytest.mark.parametrize("text,where,what", [
    ("grid.n_cells = 10\nmodel.type = plasma\n", ":2:", "model.type"),
    ("grid.cells = 10\n", ":1:", "unknown key"),
    ("mesh.n_cells = 10\n", ":1:", "unknown section"),
    ("# comment\n\nscheme.cfl = 2\n", ":3:", "scheme.cfl"),
    ("grid.n_cells = ten\n", ":1:", "int"),
    ("grid.n_cells = 1\ngrid.n_cells = 2\n", ":2:", "duplicate"),
    ("integrator.auto = false\nintegrator.type = pfe\n", "<default>", "delta_t"),
    ("just words\n", ":1:", "section.key"),
])
def test_config_errors_are_located(tmp_path, text, where, what):
    with pytest.raises(ConfigError) as exc:
        load_config(_write(tmp_path, text))
    assert where in str(exc.value) and what in str(exc.value)


def test_missing_config_file(tmp_path):
    assert main(["spectrum", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) == 2


def test_spectrum_command(tmp_path, capsys):
    assert main(["spectrum", "--config", str(CONFIGS / "fig1_force.cfg"), "--out", str(tmp_path)]) == 0
    assert "contained = true" in capsys.readouterr().out
    header, rows = read_csv(tmp_path / "eigenvalues.csv")
    assert header == ["re", "im"] and len(rows) == 500
    header, rows = read_csv(tmp_path / "clusters.csv")
    assert header == ["center_re", "center_im", "radius"]


def test_spectrum_rejects_nonlinear_model(tmp_path):
    cfg = _write(tmp_path, "model.type = hme\nmodel.m = 5\n")
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_transition_commands(tmp_path, capsys):
    for name in ("fe", "pfe", "afe", "apfe", "appfe"):
        assert main(["transition", "--config", str(CONFIGS / f"fig6_{name}.cfg"), "--out", str(tmp_path)]) == 0
    unstable = _write(tmp_path, (CONFIGS / "fig6_fe.cfg").read_text() + "transition.inflate = 2\n", "x.cfg")
    assert main(["transition", "--config", str(unstable), "--out", str(tmp_path)]) == 3
    assert "exceeds 1" in capsys.readouterr().err


def test_transition_zero_matrix_is_identity(tmp_path):
    cfg = _write(tmp_path, "model.type = scalar\nmodel.a = 0\nrelaxation.eps_l = inf\nrelaxation.eps_r = inf\n"
                           "grid.n_cells = 5\nintegrator.auto = false\nintegrator.dt = 0.1\n")
    assert main(["transition", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    _, rows = read_csv(tmp_path / "transition_eigs.csv")
    np.testing.assert_allclose(rows, [[1.0, 0.0]] * 5)


def test_unconditionally_unstable_exits_3(tmp_path):
    cfg = _write(tmp_path, "grid.n_cells = 10\nscheme.type = lf\n")
    assert main(["transition", "--config", str(cfg), "--out", str(tmp_path)]) == 3


def test_stability_command(tmp_path, capsys):
    cfg = _write(tmp_path, "grid.n_cells = 20\nintegrator.type = apfe\n")
    assert main(["stability", "--config", str(cfg), "--out", str(tmp_path), "--seed", "4"]) == 0
    out = capsys.readouterr().out
    assert "stable = True" in out and "disagreements = 0" in out
    header, rows = read_csv(tmp_path / "stability_map_left.csv")
    assert header == ["lambda_re", "lambda_im", "stable"] and {r[2] for r in rows} == {0.0, 1.0}


def test_simulate_equilibrium_and_round_trip(tmp_path):
    text = ("model.type = hme\nmodel.m = 5\nmodel.vel = 0\ngrid.n_cells = 30\ninitial.type = equilibrium\n"
            "scheme.type = force\nscheme.cfl = 0.5\nintegrator.type = apfe\nintegrator.auto = false\n"
            "integrator.delta_t = 1e-4\nintegrator.k = 2\nboundary.type = zero_gradient\nrun.end_time = 0.01\n")
    cfg = _write(tmp_path, text)
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    header, rows = read_csv(tmp_path / "a" / "solution_t0.010000.csv")
    assert header == ["x", "rho", "u", "theta", "f3", "f4", "f5", "p", "Q"]
    np.testing.assert_allclose(np.array(rows)[:, 1:4], [[1, 0, 1]] * 30, atol=1e-12)
    assert load_config(tmp_path / "a" / "run.cfg") == load_config(cfg)
    assert main(["simulate", "--config", str(tmp_path / "a" / "run.cfg"), "--out", str(tmp_path / "b")]) == 0
    for f in ("solution_t0.010000.csv", "solution_t0.000000.csv", "run_meta.txt"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_speedup_command_is_deterministic(tmp_path):
    assert main(["speedup", "--out", str(tmp_path / "a")]) == 0
    assert main(["speedup", "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "table1.csv").read_bytes() == (tmp_path / "b" / "table1.csv").read_bytes()
    assert "833.8" in (tmp_path / "a" / "table1.md").read_text()


def test_atomic_write_leaves_no_temp_files(tmp_path):
    write_csv(tmp_path / "x.csv", ("a", "b"), [(1, 0.1), (2, 1 / 3)])
    assert [p.name for p in tmp_path.iterdir()] == ["x.csv"]
    assert (tmp_path / "x.csv").read_text() == "a,b\n1,0.10000000000000001\n2,0.33333333333333331\n"
