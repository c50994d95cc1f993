import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from fracchenlee.cli import main
from fracchenlee.integrator import IntegratorConfig, simulate
from fracchenlee.reporting import (
    REPORT_HEADER,
    build_run_config,
    parse_config_text,
    read_trajectory,
    write_trajectory,
)
from fracchenlee.errors import ConfigError
from fracchenlee.systems import SystemSpec


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_report(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    return rows


# -- analyze ------------------------------------------------------------------


def test_analyze_text(capsys):
    code, out, _ = run(capsys, "analyze", "-a", "-2", "-c", "1", "-k", "-0.8", "-m", "1", "-q", "0.9")
    assert code == 0
    assert "verdict  AsymptoticallyStable" in out


def test_analyze_json_and_out(capsys, tmp_path):
    path = tmp_path / "row.csv"
    code, out, _ = run(capsys, "--json", "analyze", "-a", "2", "-c", "1", "-k", "-2",
                       "-m", "2.6457513", "-q", "0.25", "--out", str(path))
    assert code == 0
    rec = json.loads(out)
    assert rec["verdict"] == "AsymptoticallyStable"
    assert rec["q2"] == pytest.approx(0.3333, abs=1e-4)
    assert rec["agree"] is True
    rows = read_report(path.read_text())
    assert len(rows) == 1 and rows[0]["verdict"] == "AsymptoticallyStable"
    assert path.read_text().splitlines()[0] == ",".join(REPORT_HEADER)


@pytest.mark.parametrize("argv", [
    ["-a", "1", "-c", "1", "-k", "0", "-m", "1", "-q", "0.5"],
    ["-a", "0", "-c", "1", "-k", "-1", "-m", "1", "-q", "0.5"],
    ["-a", "-1", "-c", "1", "-k", "-1", "-m", "1", "-q", "1.5"],
    ["-a", "-1", "-c", "1", "-k", "-1", "-m", "1", "-q", "0"],
    ["-a", "-1", "-c", "1"],
])
def test_analyze_rejects_bad_parameters(capsys, argv):
    code, _, err = run(capsys, "analyze", *argv)
    assert code == 2 and err


def test_analyze_origin(capsys):
    code, out, _ = run(capsys, "--json", "analyze", "-a", "0.5", "-c", "0.8", "-k", "-0.75", "-m", "0", "-q", "0.5")
    rec = json.loads(out)
    assert code == 0 and rec["verdict"] == "Unstable" and rec["clause"] == "T3.1(ii)"


# -- simulate -----------------------------------------------------------------


def write_config(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return path


def test_simulate_example3(capsys, tmp_path):
    cfg = write_config(tmp_path, "# convergence run\nq = 0.55\nN = 500\nt = 502\n")
    out_path = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "simulate", str(cfg), "--out", str(out_path))
    assert code == 0
    text = out_path.read_bytes()
    assert b"\r" not in text
    j, t, x, dist = read_trajectory(io.StringIO(text.decode()))
    assert len(j) == 501
    assert dist[-1] < dist[0]
    assert "tail_nonincreasing  true" in out


def test_simulate_from_equilibrium(capsys, tmp_path):
    cfg = write_config(tmp_path, "N = 1\nepsilon = 0\n")
    out_path = tmp_path / "traj.csv"
    assert run(capsys, "simulate", str(cfg), "--out", str(out_path))[0] == 0
    lines = out_path.read_text().splitlines()
    assert len(lines) == 3
    assert lines[1].split(",")[2:] == lines[2].split(",")[2:]


def test_simulate_classical_matches_forward_euler(capsys, tmp_path):
    cfg = write_config(tmp_path, "q = 1\nrho = 0\nN = 100\n")
    out_path = tmp_path / "traj.csv"
    assert run(capsys, "simulate", str(cfg), "--out", str(out_path))[0] == 0
    _, _, x, _ = read_trajectory(io.StringIO(out_path.read_text()))
    a, c, k = -2.0, 1.0, -0.8
    ref = [(0.01, 1.01, 0.01)]
    for _ in range(100):
        x1, x2, x3 = ref[-1]
        ref.append((x1 + 0.01 * (a * x1 - x2 * x3), x2 + 0.01 * (x1 * x3 + k * (x2 - 1.0)),
                    x3 + 0.01 * (x1 * x2 / 3 - c * x3)))
    assert np.max(np.abs(x - np.array(ref))) <= 1e-14


def test_simulate_json_summary_to_stderr_when_streaming(capsys, tmp_path):
    cfg = write_config(tmp_path, "N = 10\n")
    code, out, err = run(capsys, "--json", "simulate", str(cfg))
    assert code == 0
    assert out.splitlines()[0] == "j,t,x1,x2,x3,dist" and len(out.splitlines()) == 12
    assert json.loads(err)["rows"] == 11


def test_simulate_divergence_exit_code(capsys, tmp_path):
    cfg = write_config(tmp_path, "q = 1\nrho = 0\nh = 0.1\nN = 5000\nepsilon = 1\nkernel_mode = time-consistent\n"
                                 "a = 3\nc = -2\nk = 2\nx_e = 0, 0, 0\n")
    out_path = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "simulate", str(cfg), "--out", str(out_path))
    assert code == 3
    assert "diverged            true" in out
    assert 2 < len(out_path.read_text().splitlines()) < 5002


@pytest.mark.parametrize("text", ["bogus = 1\n", "q = 2\n", "N = 2.5\n", "q 0.5\n", "a = 0\n",
                                  "kernel_mode = weird\n", "x_e = 1, 1, 1\n", "q = 0.5\nq = 0.6\n"])
def test_simulate_config_errors(capsys, tmp_path, text):
    cfg = write_config(tmp_path, text)
    assert run(capsys, "simulate", str(cfg))[0] == 2


def test_simulate_missing_config(capsys, tmp_path):
    assert run(capsys, "simulate", str(tmp_path / "nope.cfg"))[0] == 2


def test_config_defaults():
    run_cfg = build_run_config(parse_config_text(""))
    cfg = run_cfg.integrator
    assert (cfg.q, cfg.h, cfg.N, cfg.rho, cfg.epsilon, cfg.t_kernel) == (0.9, 0.01, 500, 0.01, 0.01, 502.0)
    assert cfg.kernel_mode.value == "paper-literal" and cfg.control_mode.value == "eq15-offset"
    assert tuple(run_cfg.x_e) == (0.0, 1.0, 0.0)
    with pytest.raises(ConfigError):
        parse_config_text("t_kernel = 3\n")


def test_trajectory_csv_round_trip():
    cfg = IntegratorConfig(q=0.55, kernel_mode="time-consistent", N=300)
    sys_ = SystemSpec.controlled(-2, 1, -0.8, anchor=(0, 1, 0))
    traj = simulate(cfg, sys_, (0, 1, 0))
    buf = io.StringIO()
    write_trajectory(traj, (0, 1, 0), buf)
    j, t, x, _ = read_trajectory(io.StringIO(buf.getvalue()))
    assert np.array_equal(j, traj.j)
    assert np.array_equal(t, traj.t)
    assert np.array_equal(x, traj.x)


# -- sweep --------------------------------------------------------------------


def test_sweep_q_flips_at_critical_order(capsys):
    code, out, _ = run(capsys, "--strict", "sweep", "--vary", "q", "--range", "0.05", "0.95", "--steps", "19",
                       "-a", "2", "-c", "1", "-k", "-2", "-m", str(math.sqrt(7)))
    assert code == 0
    rows = read_report(out)
    assert len(rows) == 19
    verdicts = [(float(r["q"]), r["verdict"]) for r in rows]
    stable = [q for q, v in verdicts if v == "AsymptoticallyStable"]
    unstable = [q for q, v in verdicts if v == "Unstable"]
    assert max(stable) == pytest.approx(0.30) and min(unstable) == pytest.approx(0.35)
    assert all(r["agree"] == "true" for r in rows)


def test_sweep_m_band(capsys, tmp_path):
    path = tmp_path / "m.csv"
    code, _, _ = run(capsys, "--strict", "sweep", "--vary", "m", "--range", "0.1", "3", "--steps", "30",
                     "-a", "-2", "-c", "1", "-k", "-0.8", "-q", "0.9", "--out", str(path))
    assert code == 0
    rows = read_report(path.read_text())
    edge = math.sqrt(3) / 2 * abs(-2 + 1)
    for r in rows:
        m = float(r["m"])
        assert (r["clause"] == "T4.1(i)") == (m > edge)
        assert r["agree"] == "true"
    # every point is stable: below the band the real pair is negative as well
    assert {r["verdict"] for r in rows} == {"AsymptoticallyStable"}


def test_sweep_k_marks_zero_gain_invalid(capsys):
    code, out, _ = run(capsys, "sweep", "--vary", "k", "--range", "-1", "1", "--steps", "21",
                       "-a", "-2", "-c", "1", "-m", "1", "-q", "0.9")
    rows = read_report(out)
    assert code == 0 and len(rows) == 21
    zero = [r for r in rows if float(r["k"]) == 0.0]
    assert len(zero) == 1 and zero[0]["verdict"] == "Invalid" and zero[0]["agree"] == ""


def test_sweep_parallel_order_is_deterministic(capsys):
    argv = ["sweep", "--vary", "m", "--range", "-3", "3", "--steps", "41", "-a", "2", "-c", "-1", "-k", "-1", "-q", "0.6"]
    _, serial, _ = run(capsys, *argv)
    _, parallel, _ = run(capsys, *argv, "--jobs", "3")
    assert serial == parallel


@pytest.mark.parametrize("argv", [
    ["--vary", "q", "--range", "0", "0.5", "--steps", "5", "-a", "1", "-c", "2", "-k", "-1", "-m", "1"],
    ["--vary", "q", "--range", "0.5", "1.5", "--steps", "5", "-a", "1", "-c", "2", "-k", "-1", "-m", "1"],
    ["--vary", "m", "--range", "2", "1", "--steps", "5", "-a", "1", "-c", "2", "-k", "-1", "-q", "0.5"],
    ["--vary", "m", "--range", "1", "2", "--steps", "0", "-a", "1", "-c", "2", "-k", "-1", "-q", "0.5"],
    ["--vary", "m", "--range", "1", "2", "--steps", "5", "-a", "1", "-c", "2", "-q", "0.5"],
    ["--vary", "x", "--range", "1", "2", "--steps", "5", "-a", "1", "-c", "2", "-k", "-1", "-q", "0.5"],
])
def test_sweep_rejects_bad_ranges(capsys, argv):
    assert run(capsys, "sweep", *argv)[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fracchenlee", "analyze", "-a", "-0.25", "-c", "1",
                           "-k", "-0.25", "-m", "0", "-q", "0.5", "--json"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "AsymptoticallyStable"
