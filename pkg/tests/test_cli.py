import csv
import json
import math
import subprocess
import sys

import pytest

from moderate_waves import cli
from moderate_waves.experiments import initial_gap

SMALL_NONUNIFORM = {"n_list": [8, 16], "t_grid": [0.0, 0.5], "solver": {"n_modes": 128}}


def run(tmp_path, command, cfg=None, *extra):
    argv = [command, "--output", str(tmp_path / "out")]
    if cfg is not None:
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        argv += ["--config", str(path)]
    return cli.main(argv + list(extra))


def read_json(path):
    return json.loads(path.read_text())


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def walk_numbers(obj, path=""):
    """Yield (path, number) for every bare number outside provenance tags and config echoes."""
    if isinstance(obj, dict):
        if set(obj) == {"value", "provenance"}:
            return
        for k, v in obj.items():
            if k in ("config", "solver", "seed", "columns", "n_list", "t_grid", "verdicts", "steps", "s",
                     "horizon", "status_time", "sigma", "n", "t", "n_modes"):
                continue
            yield from walk_numbers(v, f"{path}.{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from walk_numbers(v, f"{path}[{i}]")
    elif isinstance(obj, (int, float)) and not isinstance(obj, bool):
        yield path, obj


class TestSimulate:
    def test_zero_data(self, tmp_path):
        cfg = {"initial": {"kind": "zero"}, "solver": {"n_modes": 32, "t_end": 0.1}}
        assert run(tmp_path, "simulate", cfg) == 0
        rows = read_csv(tmp_path / "out" / "trajectory.csv")
        assert rows and all(float(r[c]) == 0.0 for r in rows for c in ("h1", "hs", "min_slope"))
        assert read_json(tmp_path / "out" / "summary.json")["status"] == "completed"
        assert (tmp_path / "out" / "plot_trajectory.py").exists()

    def test_approx_drift(self, tmp_path):
        cfg = {"initial": {"kind": "approx", "omega": 1, "n": 16, "s": 2}, "solver": {"n_modes": 256}}
        assert run(tmp_path, "simulate", cfg) == 0
        summary = read_json(tmp_path / "out" / "summary.json")
        assert summary["h1_drift"]["value"] <= 1e-8
        assert summary["h1_drift"]["provenance"] == "measured"
        assert summary["t_final"]["value"] == 1.0

    def test_breakdown_exit(self, tmp_path):
        cfg = {"initial": {"kind": "modes", "modes": [[1, 0.0, -0.25]]},
               "solver": {"n_modes": 64, "breakdown_slope": 0.6}}
        assert run(tmp_path, "simulate", cfg) == 3
        summary = read_json(tmp_path / "out" / "summary.json")
        assert summary["status"] == "breakdown"
        assert (tmp_path / "out" / "trajectory.csv").exists()

    @pytest.mark.parametrize(
        "cfg",
        [
            {"initial": {"kind": "zero"}, "solvr": {}},
            {"initial": {"kind": "zero"}, "solver": {"n_mode": 64}},
            {"initial": {"kind": "approx", "omega": 2}},
            {"initial": {"kind": "approx", "n": 64}, "solver": {"n_modes": 256}},
            {"initial": {"kind": "modes", "modes": [[30, 1, 0]]}, "solver": {"n_modes": 64}},
            {"initial": {"kind": "wave"}},
            {"solver": {"dt": -1}},
        ],
    )
    def test_config_errors_leave_no_artifacts(self, tmp_path, cfg):
        assert run(tmp_path, "simulate", cfg) == 2
        assert not (tmp_path / "out").exists()


class TestResidual:
    @pytest.mark.parametrize("s,slope", [(2.0, -2.0), (1.75, -1.5)])
    def test_theoretical_slope(self, tmp_path, s, slope):
        assert run(tmp_path, "residual", {"s": s}) == 0
        fit = read_json(tmp_path / "out" / "rate_fit.json")
        assert fit["theoretical_slope"] == {"value": slope, "provenance": "paper-bound"}
        assert abs(fit["slope"]["value"] - slope) <= 0.2
        rows = read_csv(tmp_path / "out" / "residual.csv")
        assert [int(r["n"]) for r in rows] == [8, 16, 32, 64, 128]

    def test_single_n(self, tmp_path, capsys):
        assert run(tmp_path, "residual", {"n_list": [16]}) == 2
        assert "need >= 3" in capsys.readouterr().err
        assert not (tmp_path / "out").exists()

    def test_resolution(self, tmp_path):
        assert run(tmp_path, "residual", {"n_list": [8, 16, 32], "n_modes": 128}) == 2

    def test_bad_sigma(self, tmp_path):
        assert run(tmp_path, "residual", {"sigma": 0.3}) == 2


class TestRates:
    def test_small_run(self, tmp_path):
        cfg = {"n_list": [4, 8, 16], "t_probe": [0.25, 0.5], "solver": {"n_modes": 256}}
        assert run(tmp_path, "rates", cfg) == 0
        fit = read_json(tmp_path / "out" / "rate_fit.json")
        assert fit["theoretical_slope"]["value"] == -2.0
        assert fit["solver"]["n_modes"] == 256

    @pytest.mark.parametrize(
        "cfg",
        [
            {"n_list": [8, 16]},
            {"s": 2.0, "sigma": 0.7},
            {"t_probe": [0.0, 0.5]},
            {"n_list": [8, 16, 128], "solver": {"n_modes": 512}},
            {"n_list": [8, 16.5, 32]},
        ],
    )
    def test_config_errors(self, tmp_path, cfg):
        assert run(tmp_path, "rates", cfg) == 2
        assert not (tmp_path / "out").exists()


class TestNonuniform:
    def test_small(self, tmp_path):
        assert run(tmp_path, "nonuniform", SMALL_NONUNIFORM) == 0
        report = read_json(tmp_path / "out" / "report.json")
        assert all(v["holds"] for v in report["verdicts"])
        rows = read_csv(tmp_path / "out" / "gaps.csv")
        assert len(rows) == 4
        for r in rows:
            if float(r["t"]) == 0.0:
                assert abs(float(r["gap"]) - initial_gap(int(r["n"]), 2.0)) <= 1e-12

    def test_resolution_error(self, tmp_path, capsys):
        cfg = {**SMALL_NONUNIFORM, "n_list": [8, 32]}
        assert run(tmp_path, "nonuniform", cfg) == 2
        assert "resolution" in capsys.readouterr().err

    def test_bad_s(self, tmp_path):
        assert run(tmp_path, "nonuniform", {**SMALL_NONUNIFORM, "s": 1.5}) == 2

    def test_deterministic_with_threads(self, tmp_path):
        outs = []
        for i, threads in enumerate((1, 1, 2)):
            d = tmp_path / f"run{i}"
            cfg_path = tmp_path / "cfg.json"
            cfg_path.write_text(json.dumps(SMALL_NONUNIFORM))
            assert cli.main(["nonuniform", "--config", str(cfg_path), "--output", str(d),
                             "--threads", str(threads)]) == 0
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        assert outs[0] == outs[1] == outs[2]


class TestCheck:
    def test_fresh_build_passes(self, tmp_path):
        assert run(tmp_path, "check") == 0
        report = read_json(tmp_path / "out" / "check.json")
        assert report["passed"] and report["first_failure"] is None
        assert len(report["results"]) == 5

    def test_seed_variation_same_verdict(self, tmp_path):
        assert run(tmp_path, "check", None, "--seed", "17") == 0

    def test_sign_flip_is_named(self, tmp_path, monkeypatch, capsys):
        import moderate_waves.model as model

        original = model.r_of_u
        monkeypatch.setattr(model, "r_of_u", lambda u: -original(u))
        assert run(tmp_path, "check") == 1
        report = read_json(tmp_path / "out" / "check.json")
        assert report["first_failure"] == "local_nonlocal_consistency"
        assert "local_nonlocal_consistency" in capsys.readouterr().err

    def test_rejects_keys(self, tmp_path):
        assert run(tmp_path, "check", {"extra": 1}) == 2


class TestProvenance:
    @pytest.mark.parametrize(
        "command,cfg,artifact",
        [
            ("simulate", {"solver": {"n_modes": 32, "t_end": 0.1}}, "summary.json"),
            ("residual", {"n_list": [8, 16, 32]}, "rate_fit.json"),
            ("nonuniform", SMALL_NONUNIFORM, "report.json"),
            ("check", None, "check.json"),
        ],
    )
    def test_every_number_tagged(self, tmp_path, command, cfg, artifact):
        run(tmp_path, command, cfg)
        payload = read_json(tmp_path / "out" / artifact)
        assert list(walk_numbers(payload)) == []
        text = json.dumps(payload)
        assert '"provenance"' in text

    def test_columns_labelled(self, tmp_path):
        run(tmp_path, "nonuniform", SMALL_NONUNIFORM)
        report = read_json(tmp_path / "out" / "report.json")
        header = (tmp_path / "out" / "gaps.csv").read_text().splitlines()[0].split(",")
        assert set(report["columns"]) == set(header)
        assert set(report["columns"].values()) <= {"measured", "closed-form", "paper-bound"}


def test_write_json_nan_is_null(tmp_path):
    cli.write_json(tmp_path / "x.json", {"a": math.nan, "b": [1.0, math.inf]})
    assert read_json(tmp_path / "x.json") == {"a": None, "b": [1.0, None]}


def test_tag_rejects_unknown():
    with pytest.raises(ValueError):
        cli.tag(1.0, "guessed")


def test_unreadable_config(tmp_path):
    assert cli.main(["simulate", "--config", str(tmp_path / "missing.json"), "--output", str(tmp_path)]) == 2


def test_threads_must_be_positive(tmp_path):
    assert cli.main(["check", "--threads", "0", "--output", str(tmp_path / "o")]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "moderate_waves", "simulate", "--output", str(tmp_path / "o")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "o" / "summary.json").exists()
