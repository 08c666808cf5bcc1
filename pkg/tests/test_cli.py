import json

import numpy as np
import pytest

from levylab import cli


def run_cli(args):
    return cli.main([str(a) for a in args])


def read_csv(path):
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("# ")
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return lines[0], header, rows


# ---------------------------------------------------------------------------
# parse_range
# ---------------------------------------------------------------------------

def test_parse_range_forms():
    assert cli.parse_range("1:6") == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    grid = cli.parse_range("0:3:0.1")
    assert len(grid) == 31
    assert grid[0] == 0.0 and grid[-1] == pytest.approx(3.0)
    assert cli.parse_range("0.5,1,2") == [0.5, 1.0, 2.0]
    assert cli.parse_range("2.5") == [2.5]


def test_parse_range_errors():
    import argparse

    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_range("0.5:1.5")  # non-integer two-part range
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_range("3:1:0.5")


# ---------------------------------------------------------------------------
# cf
# ---------------------------------------------------------------------------

def test_cf_brownian_matches_sech_within_tail_bound(tmp_path):
    assert run_cli(["cf", "--kernel", "brownian", "--t", "0:3:0.1", "--out", tmp_path]) == 0
    _, header, rows = read_csv(tmp_path / "cf.csv")
    assert header == ["t", "re", "im", "tail_bound"]
    assert len(rows) == 31
    for t_s, re_s, im_s, tb_s in rows:
        t, re, im, tb = map(float, (t_s, re_s, im_s, tb_s))
        assert abs(re - 1.0 / np.cosh(t)) <= max(tb, 1e-12)
        assert abs(im) <= 1e-12


def test_cf_weighted_kernel(tmp_path):
    assert run_cli([
        "cf", "--kernel", "kind=weighted weight=poly degree=1", "--t", "3", "--out", tmp_path,
    ]) == 0
    _, _, rows = read_csv(tmp_path / "cf.csv")
    assert float(rows[0][1]) == pytest.approx(1.0 / np.cosh(1.0), abs=1e-12)


def test_cf_fbm_spectrum_route(tmp_path):
    assert run_cli([
        "cf", "--kernel", "fbm", "--hurst", 0.4, "--t", "0,1", "--level", 5, "--out", tmp_path,
    ]) == 0
    _, _, rows = read_csv(tmp_path / "cf.csv")
    assert float(rows[0][1]) == 1.0
    assert 0.0 < float(rows[1][1]) < 1.0


# ---------------------------------------------------------------------------
# pvar
# ---------------------------------------------------------------------------

def test_pvar_auto_exponent(tmp_path):
    assert run_cli([
        "pvar", "--kernel", "fbm", "--hurst", 0.35, "--p", "auto", "--out", tmp_path,
    ]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["p"] == pytest.approx(1.0 / 0.7)
    assert summary["verdict"] == "Stabilizing"
    _, header, rows = read_csv(tmp_path / "pvar.csv")
    assert header == ["level", "estimate", "verdict"]
    assert rows[-1][0] == "10" and rows[-1][2] == "Stabilizing"


def test_pvar_growing_at_p1(tmp_path):
    assert run_cli([
        "pvar", "--kernel", "kind=fbm hurst=0.35", "--p", "1", "--out", tmp_path,
    ]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["verdict"] == "Growing"


# ---------------------------------------------------------------------------
# cauchy
# ---------------------------------------------------------------------------

def test_cauchy_brownian_slope(tmp_path):
    assert run_cli([
        "cauchy", "--kernel1", "brownian", "--kernel2", "brownian",
        "--levels", "1:6", "--out", tmp_path,
    ]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["slope"] == pytest.approx(-1.0, abs=0.05)
    assert summary["flag"] == "covered"
    _, header, rows = read_csv(tmp_path / "cauchy.csv")
    assert header == ["n", "m", "norm_sq", "refine", "flag"]
    assert len(rows) == 5
    assert float(rows[0][2]) == pytest.approx(0.125, abs=1e-12)


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def test_spectrum_classical(tmp_path):
    assert run_cli(["spectrum", "--kernel", "brownian", "--grid", 128, "--out", tmp_path]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["symmetry_ok"] is True
    assert summary["spectral_radius"] == pytest.approx(1.0 / np.pi, rel=0.01)
    _, header, rows = read_csv(tmp_path / "spectrum.csv")
    assert header == ["alpha", "multiplicity"]
    assert all(int(m) == 2 for _, m in rows)


def test_spectrum_numerical_error_exit_code(tmp_path):
    table = tmp_path / "neg.csv"
    nodes = np.linspace(0, 1, 5)
    lines = ["s,t,value"] + [f"{s},{t},{-s * t}" for s in nodes for t in nodes]
    table.write_text("\n".join(lines) + "\n")
    code = run_cli([
        "spectrum", "--kernel", f"kind=tabulated path={table}", "--level", 3, "--out", tmp_path,
    ])
    assert code == 3


# ---------------------------------------------------------------------------
# simulate + determinism
# ---------------------------------------------------------------------------

def test_simulate_artifacts_and_echo(tmp_path):
    assert run_cli([
        "simulate", "--kernel", "brownian", "--level", 5, "--samples", 400,
        "--seed", 21, "--t", "0,1", "--emit-samples", "--out", tmp_path,
    ]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["seed"] == 21
    assert summary["kernel1"] == "kind=brownian"
    assert summary["schema_version"] == 1
    assert 0.5 < summary["variance"] < 1.5
    comment, header, rows = read_csv(tmp_path / "cf.csv")
    assert "seed=21" in comment
    assert header == ["t", "re", "im", "stderr"]
    assert float(rows[0][1]) == 1.0  # CF at t=0
    _, _, sample_rows = read_csv(tmp_path / "samples.csv")
    assert len(sample_rows) == 400


def test_simulate_threads_bit_identical(tmp_path):
    a_dir = tmp_path / "a"
    b_dir = tmp_path / "b"
    base = [
        "simulate", "--kernel", "brownian", "--level", 4, "--samples", 9000,
        "--seed", 5, "--t", "0:2:0.5", "--emit-samples",
    ]
    assert run_cli(base + ["--threads", 1, "--out", a_dir]) == 0
    assert run_cli(base + ["--threads", 4, "--out", b_dir]) == 0
    for name in ("cf.csv", "samples.csv", "summary.json"):
        assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes()


def test_config_file_with_flag_override(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text("kernel=brownian\nseed=1\nsamples=50\nlevel=3\nt=0,1\n")
    out1 = tmp_path / "o1"
    assert run_cli(["simulate", "--config", config, "--out", out1]) == 0
    s1 = json.loads((out1 / "summary.json").read_text())
    assert s1["seed"] == 1 and s1["samples"] == 50

    out2 = tmp_path / "o2"
    assert run_cli(["simulate", "--config", config, "--seed", 2, "--out", out2]) == 0
    s2 = json.loads((out2 / "summary.json").read_text())
    assert s2["seed"] == 2


def test_usage_error_exit_code(tmp_path):
    assert run_cli(["cf", "--kernel", "kind=sinusoid", "--out", tmp_path]) == 2
    assert run_cli(["pvar", "--kernel", "brownian", "--p", "0.5", "--out", tmp_path]) == 2


def test_json_format(tmp_path):
    assert run_cli([
        "cf", "--kernel", "brownian", "--t", "0,1", "--format", "json", "--out", tmp_path,
    ]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["cf"][0]["re"] == 1.0
    assert not (tmp_path / "cf.csv").exists()


def test_threads_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("LEVY_LAB_THREADS", "3")
    a_dir = tmp_path / "env"
    assert run_cli([
        "simulate", "--kernel", "brownian", "--level", 4, "--samples", 5000,
        "--seed", 5, "--t", "0,1", "--emit-samples", "--out", a_dir,
    ]) == 0
    monkeypatch.delenv("LEVY_LAB_THREADS")
    b_dir = tmp_path / "noenv"
    assert run_cli([
        "simulate", "--kernel", "brownian", "--level", 4, "--samples", 5000,
        "--seed", 5, "--t", "0,1", "--emit-samples", "--out", b_dir,
    ]) == 0
    assert (a_dir / "samples.csv").read_bytes() == (b_dir / "samples.csv").read_bytes()


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def test_check_command_passes(capsys):
    assert run_cli(["check"]) == 0
    out = capsys.readouterr().out
    assert "PASS covariance.rect-additivity" in out
    assert "FAIL" not in out


def test_check_command_failure_exit_code(capsys, monkeypatch):
    from levylab import checks

    monkeypatch.setattr(
        checks, "run_all", lambda: [("synthetic.broken", False, "AssertionError: boom")]
    )
    assert run_cli(["check"]) == 1
    assert "FAIL synthetic.broken" in capsys.readouterr().out
