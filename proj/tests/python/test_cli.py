import json
import os
import subprocess

import pytest

CLI = os.environ.get("ASYNCQP_CLI")

pytestmark = pytest.mark.skipif(not CLI, reason="ASYNCQP_CLI not set")


def run_cli(*args, expect=0):
    result = subprocess.run([CLI, *args], capture_output=True, text=True)
    assert result.returncode == expect, result.stderr
    return result


def write_config(path, **overrides):
    config = {
        "format_version": 1,
        "problem": {
            "generate": {
                "n": 12,
                "agents": 4,
                "norm2": 10.0,
                "cond": 8.0,
                "r_norm": 0.5,
                "seed": 7,
            }
        },
        "schedule": {"mode": "bernoulli", "p_update": 0.5, "p_transmit": 0.5, "seed": 1},
        "delay": {"mode": "fixed", "d": 1},
        "horizon": 300,
        "stepsize": {"mode": "sample", "seed": 3},
        "init": {"mode": "shared-random", "seed": 4, "radius": 3.0},
        "output": {"trace": str(path.parent / "trace.csv")},
    }
    config.update(overrides)
    path.write_text(json.dumps(config))
    return config


def test_generate_plan_run_plot_pipeline(tmp_path):
    config_path = tmp_path / "config.json"
    write_config(config_path)

    problem_path = tmp_path / "problem.json"
    out = run_cli("generate", "--config", str(config_path), "--out", str(problem_path))
    assert problem_path.exists()
    assert "wrote" in out.stdout

    plan = run_cli("plan", "--config", str(config_path)).stdout
    fields = dict(line.split("=", 1) for line in plan.strip().splitlines())
    assert float(fields["gamma_lo"]) < float(fields["gamma_hi"])
    assert fields["spectrum_is_bound"] == "0"

    trace_path = tmp_path / "out.csv"
    summary = run_cli("run", "--config", str(config_path), "--out", str(trace_path)).stdout
    assert trace_path.exists()
    sfields = dict(line.split("=", 1) for line in summary.strip().splitlines())
    assert float(sfields["final_dist2_max"]) < float(sfields["initial_dist2_max"])
    assert float(sfields["q"]) < 1.0

    svg_path = tmp_path / "fig.svg"
    run_cli("plot", str(trace_path), "--epsilon", "0.1", "--out", str(svg_path))
    svg = svg_path.read_text()
    assert svg.startswith("<svg")
    assert "trace-line" in svg
    assert "epsilon-line" in svg


def test_plan_with_regularization_reproduces_intervals(tmp_path):
    config_path = tmp_path / "config.json"
    write_config(
        config_path,
        problem={
            "generate": {
                "n": 100,
                "agents": 25,
                "norm2": 100.0,
                "cond": 100.0,
                "r_norm": 0.105,
                "seed": 1,
            }
        },
        regularization={"mode": "sample", "epsilon": 0.1, "k_D": 10.0, "seed": 2},
    )
    plan = run_cli("plan", "--config", str(config_path)).stdout
    fields = dict(line.split("=", 1) for line in plan.strip().splitlines())
    assert float(fields["gamma_lo"]) == pytest.approx(0.009, abs=1e-9)
    assert float(fields["gamma_hi"]) == pytest.approx(0.011, abs=1e-9)
    assert float(fields["alpha_lo"]) == pytest.approx(11.0, abs=1e-6)
    assert float(fields["alpha_hi"]) == pytest.approx(20.0, abs=1e-6)


def test_exit_codes(tmp_path):
    # 2: config error (unparseable json)
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    run_cli("run", "--config", str(bad), expect=2)

    # 2: missing required option
    run_cli("run", expect=2)

    # 3: planner infeasibility (epsilon beyond the reachable error cap)
    infeasible = tmp_path / "infeasible.json"
    write_config(
        infeasible,
        problem={
            "generate": {
                "n": 100,
                "agents": 25,
                "norm2": 100.0,
                "cond": 100.0,
                "r_norm": 0.105,
                "seed": 1,
            }
        },
        regularization={"mode": "sample", "epsilon": 0.2, "k_D": 10.0, "seed": 2},
    )
    result = run_cli("plan", "--config", str(infeasible), expect=3)
    assert "epsilon" in result.stderr

    # 4: I/O error (missing trace file for plot)
    run_cli("plot", str(tmp_path / "missing.csv"), expect=4)

    # 4: config file missing entirely
    run_cli("run", "--config", str(tmp_path / "nope.json"), expect=4)


def test_seed_override_determinism(tmp_path):
    config_path = tmp_path / "config.json"
    write_config(config_path)
    t1, t2, t3 = (tmp_path / name for name in ("a.csv", "b.csv", "c.csv"))
    run_cli("run", "--config", str(config_path), "--seed", "42", "--out", str(t1))
    run_cli("run", "--config", str(config_path), "--seed", "42", "--out", str(t2))
    run_cli("run", "--config", str(config_path), "--seed", "43", "--out", str(t3))
    assert t1.read_bytes() == t2.read_bytes()
    assert t1.read_bytes() != t3.read_bytes()
