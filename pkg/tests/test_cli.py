"""CLI tests: subcommand contracts, exit codes, file determinism."""

import csv
import json

import numpy as np
import pytest

from courtlift import calibration_to_json_dict, make_camera, project, WorldPoint
from courtlift.cli import main


@pytest.fixture(scope="module")
def dataset_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("ds") / "synthetic.jsonl"
    rc = main(
        ["synth", "--n", "300", "--arenas", "6", "--seed", "21", "--out", str(path)]
    )
    assert rc == 0
    return path


@pytest.fixture(scope="module")
def side_cal_file(tmp_path_factory):
    cal = make_camera(
        center=(0.0, -20.0, 1.5),
        look_at=(0.0, 0.0, 1.5),
        focal=2000.0,
        image_width=4500.0,
        image_height=1500.0,
    )
    path = tmp_path_factory.mktemp("cal") / "side.json"
    path.write_text(json.dumps(calibration_to_json_dict(cal)))
    return path, cal


class TestSynth:
    def test_writes_requested_record_count(self, dataset_file):
        lines = dataset_file.read_text().splitlines()
        assert len(lines) == 301  # header + samples
        header = json.loads(lines[0])
        assert header["schema_version"] == 1
        assert sum(len(v) for v in header["folds"].values()) == 6

    def test_same_flags_give_identical_files(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for out in (a, b):
            assert (
                main(["synth", "--n", "40", "--arenas", "3", "--seed", "8", "--out", str(out)])
                == 0
            )
        assert a.read_bytes() == b.read_bytes()

    def test_zero_samples_is_usage_error(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["synth", "--n", "0", "--out", str(tmp_path / "x.jsonl")])
        assert exc.value.code == 2


class TestEvaluate:
    def test_oracle_metrics_are_exact(self, dataset_file, tmp_path):
        out = tmp_path / "oracle"
        rc = main(
            [
                "evaluate",
                "--dataset",
                str(dataset_file),
                "--predictor",
                "oracle",
                "--out",
                str(out),
                "--threads",
                "2",
            ]
        )
        assert rc == 0
        payload = json.loads((tmp_path / "oracle.json").read_text())
        for name in ("mae_px", "mape_m", "mdnape_m", "ma3de_m", "mdna3de_m"):
            assert payload["aggregate"]["mean"][name] < 1e-6
        assert payload["repeats"][0]["n_failed"] == 0

    def test_diameter_method_reports_no_height_mae(self, dataset_file, tmp_path):
        out = tmp_path / "diam"
        rc = main(
            [
                "evaluate",
                "--dataset",
                str(dataset_file),
                "--method",
                "diameter",
                "--predictor",
                "gaussian",
                "--sigma",
                "0.05",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        payload = json.loads((tmp_path / "diam.json").read_text())
        assert payload["aggregate"]["mean"]["mae_px"] is None
        assert payload["aggregate"]["mean"]["mape_m"] > 0

    def test_fold_restriction_shrinks_sample_count(self, dataset_file, tmp_path):
        out_all = tmp_path / "all"
        out_fold = tmp_path / "fold"
        main(["evaluate", "--dataset", str(dataset_file), "--out", str(out_all)])
        rc = main(
            ["evaluate", "--dataset", str(dataset_file), "--fold", "A", "--out", str(out_fold)]
        )
        assert rc == 0
        n_all = json.loads((tmp_path / "all.json").read_text())["repeats"][0]["n_samples"]
        n_fold = json.loads((tmp_path / "fold.json").read_text())["repeats"][0]["n_samples"]
        assert 0 < n_fold < n_all

    def test_unknown_fold_is_runtime_error(self, dataset_file, tmp_path, capsys):
        rc = main(
            ["evaluate", "--dataset", str(dataset_file), "--fold", "Z", "--out", str(tmp_path / "x")]
        )
        assert rc == 1
        assert "UnknownFold" in capsys.readouterr().err

    def test_synth_input_mode(self, tmp_path):
        out = tmp_path / "synth_mode"
        rc = main(
            [
                "evaluate",
                "--synth-n",
                "120",
                "--synth-arenas",
                "4",
                "--synth-seed",
                "11",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        payload = json.loads((tmp_path / "synth_mode.json").read_text())
        assert payload["repeats"][0]["n_samples"] == 120
        assert payload["config"]["dataset"] is None

    def test_thread_count_does_not_change_output(self, dataset_file, tmp_path):
        outs = []
        for threads in ("1", "3"):
            out = tmp_path / f"t{threads}"
            rc = main(
                [
                    "evaluate",
                    "--dataset",
                    str(dataset_file),
                    "--predictor",
                    "gaussian",
                    "--target-mae",
                    "34",
                    "--repeats",
                    "2",
                    "--out",
                    str(out),
                    "--threads",
                    threads,
                ]
            )
            assert rc == 0
            outs.append((out.with_suffix(".json").read_bytes(), out.with_suffix(".csv").read_bytes()))
        assert outs[0] == outs[1]


class TestReconstruct:
    def test_ground_pixel_has_zero_height_solution(self, side_cal_file, capsys):
        path, cal = side_cal_file
        ground = WorldPoint(1.0, 2.0, 0.0)
        px = project(cal, ground)
        rc = main(
            [
                "reconstruct",
                "--cal",
                str(path),
                "--x",
                str(px.x),
                "--y",
                str(px.y),
                "--height",
                "0",
            ]
        )
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        np.testing.assert_allclose(out["ball_3d"], [1.0, 2.0, 0.0], atol=1e-9)
        assert out["ground_projection"][2] == 0.0

    def test_horizon_pixel_exits_nonzero_with_named_error(self, side_cal_file, capsys):
        path, cal = side_cal_file
        rc = main(
            ["reconstruct", "--cal", str(path), "--x", "2250", "--y", str(cal.cy), "--height", "10"]
        )
        assert rc == 1
        err = capsys.readouterr().err
        assert "error:" in err and "RayParallelToPlane" in err


class TestThreadResolution:
    def test_env_var_fallback(self, monkeypatch):
        from courtlift.cli import _resolve_threads

        monkeypatch.setenv("COURTLIFT_THREADS", "3")
        assert _resolve_threads(None) == 3
        assert _resolve_threads(2) == 2  # flag wins over env
        monkeypatch.setenv("COURTLIFT_THREADS", "not-a-number")
        assert _resolve_threads(None) >= 1
        monkeypatch.delenv("COURTLIFT_THREADS")
        assert _resolve_threads(None) >= 1


class TestSweep:
    def test_monotone_grid(self, dataset_file, tmp_path):
        out = tmp_path / "sweep"
        rc = main(
            [
                "sweep",
                "--dataset",
                str(dataset_file),
                "--grid",
                "0,10,20,40",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        with open(tmp_path / "sweep.csv", newline="") as f:
            rows = list(csv.DictReader(f))
        mape = [float(r["mape_m"]) for r in rows]
        assert mape[0] < 1e-6  # zero offset reconstructs exactly
        assert mape == sorted(mape)
        assert mape[-1] > mape[0]
        payload = json.loads((tmp_path / "sweep.json").read_text())
        assert [lv["level_px"] for lv in payload["levels"]] == [0.0, 10.0, 20.0, 40.0]

    def test_empty_grid_is_usage_error(self, dataset_file, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(
                ["sweep", "--dataset", str(dataset_file), "--grid", ",", "--out", str(tmp_path / "s")]
            )
        assert exc.value.code == 2

    def test_missing_input_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--grid", "0,1", "--out", str(tmp_path / "s")])
        assert exc.value.code == 2
