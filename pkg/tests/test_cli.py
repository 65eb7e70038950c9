import csv
from pathlib import Path

import numpy as np
import pytest

from tunneltime.cli import main
from tunneltime.config import ConfigValidationError, build, tomllib

DEMOS = Path(__file__).resolve().parents[1] / "demos" / "configs"

BASE = """
barrier.kind = "rectangular"
barrier.v0 = 1.0
barrier.width = 2.0
packet.p0 = 1.0
packet.q0 = -60.0
packet.dp0 = 0.02
"""


def _write(tmp_path, text, name="c.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def _read(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_list_experiments(capsys):
    assert main(["list-experiments"]) == 0
    out = capsys.readouterr().out
    for name in ("amplitudes", "times", "propagator", "distribution", "oracle-compare", "shift-sweep"):
        assert name in out


def test_validate_ok_and_errors(tmp_path, capsys):
    ok = _write(tmp_path, 'experiment.kind = "times"\n' + BASE)
    assert main(["validate", str(ok)]) == 0
    bad_syntax = _write(tmp_path, "experiment.kind = \n", "bad.toml")
    assert main(["validate", str(bad_syntax)]) == 2
    missing = _write(tmp_path, 'experiment.kind = "times"\n', "m.toml")
    assert main(["validate", str(missing)]) == 3
    assert "barrier.v0" in capsys.readouterr().err
    wrong = _write(tmp_path, 'experiment.kind = "times"\n' + BASE.replace("0.02", "0.5"), "w.toml")
    assert main(["validate", str(wrong)]) == 3
    assert main(["validate", str(tmp_path / "nope.toml")]) == 2


@pytest.mark.parametrize(
    "extra, key",
    [
        ('barrier.width = -1.0', "barrier.width"),
        ('grid.n_kappa = 3', "grid.n_kappa"),
        ('reference.kappa0 = [1.0, "x"]', "reference.kappa0[1]"),
        ('grid.kappa_min = 0.5', "grid.kappa_max"),
        ('packet.kind = "cloud"', "packet.kind"),
    ],
)
def test_validation_key_paths(extra, key):
    text = 'experiment.kind = "times"\n' + BASE
    lines = [ln for ln in text.splitlines() if not ln.startswith(extra.split("=")[0].strip())]
    d = tomllib.loads("\n".join(lines + [extra]))
    with pytest.raises(ConfigValidationError) as err:
        build(d)
    assert err.value.key == key


def test_oracle_needs_free_space_start(tmp_path):
    text = 'experiment.kind = "oracle-compare"\n' + BASE.replace("-60.0", "-20.0")
    assert main(["validate", str(_write(tmp_path, text))]) == 3


def test_free_barrier_amplitudes(tmp_path):
    cfg = _write(tmp_path, 'experiment.kind = "amplitudes"\n' + BASE.replace("v0 = 1.0", "v0 = 0.0"))
    assert main(["run", str(cfg), "-o", str(tmp_path / "out")]) == 0
    header, data = _read(tmp_path / "out" / "amplitudes.csv")
    assert header == ["kappa", "re_A", "im_A", "abs_A", "arg_A_unwrapped", "re_B", "im_B"]
    assert np.all(data[:, 1] == 1.0) and np.all(data[:, 2] == 0.0)
    assert (tmp_path / "out" / "summary.txt").exists()


def test_numerical_error_exit_code(tmp_path):
    text = ('experiment.kind = "amplitudes"\n' + BASE.replace("width = 2.0", "width = 400.0")
            .replace("v0 = 1.0", "v0 = 0.01")
            + "grid.n_kappa = 20\ngrid.kappa_min = 0.5\ngrid.kappa_max = 3.0\n")
    assert main(["run", str(_write(tmp_path, text)), "-o", str(tmp_path / "o")]) == 4


def test_shift_sweep_sign_change(tmp_path):
    out = tmp_path / "sweep"
    assert main(["run", str(DEMOS / "shift_sweep.toml"), "-o", str(out)]) == 0
    header, data = _read(out / "shift_sweep.csv")
    assert header[:4] == ["t", "tau0", "zeta", "delta_q_peak"]
    dq = data[:, 3]
    assert dq[0] < 0 < dq[-1]
    assert np.count_nonzero(np.diff(np.sign(dq))) == 1
    assert "t_star_predicted" in (out / "summary.txt").read_text()


def test_threads_do_not_change_output(tmp_path, monkeypatch):
    cfg = DEMOS / "times.toml"
    assert main(["run", str(cfg), "-o", str(tmp_path / "a")]) == 0
    monkeypatch.setenv("TUNNELTIME_THREADS", "4")
    assert main(["run", str(cfg), "-o", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "times.csv").read_bytes()
    assert a == (tmp_path / "b" / "times.csv").read_bytes()
    monkeypatch.setenv("TUNNELTIME_THREADS", "zero")
    assert main(["run", str(cfg), "-o", str(tmp_path / "c")]) == 3


@pytest.mark.parametrize("name", ["amplitudes", "times", "propagator", "distribution", "double_barrier"])
def test_demo_configs_run(tmp_path, name):
    assert main(["run", str(DEMOS / f"{name}.toml"), "-o", str(tmp_path)]) == 0
    text = (tmp_path / "summary.txt").read_text()
    assert "[" in text and "FAIL" not in text


def test_oracle_compare_with_snapshot(tmp_path):
    text = ('experiment.kind = "oracle-compare"\n' + BASE.replace("dp0 = 0.02", "dq0 = 10.0")
            .replace("-60.0", "-50.0") + "oracle.t_final = 105.0\noracle.snapshot = true\n")
    out = tmp_path / "o"
    assert main(["run", str(_write(tmp_path, text)), "-o", str(out)]) == 0
    header, data = _read(out / "oracle.csv")
    assert header == ["t_final", "transmission", "peak_q", "half_height_q", "variance"]
    _, snap = _read(out / "oracle_snapshot.csv")
    assert np.sum(snap[:, 1]) * (snap[1, 0] - snap[0, 0]) == pytest.approx(1.0, abs=1e-9)
    summary = (out / "summary.txt").read_text()
    assert "PASS peak_advance_relative_deviation" in summary
