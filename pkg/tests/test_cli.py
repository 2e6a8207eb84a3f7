import json
import shutil
from pathlib import Path

import pytest

from flowsentry._util import read_json
from flowsentry.cli import main

SCENARIO = """
[network]
grid_rows = 1
grid_cols = 1
lanes_per_approach = 4
default_arrival_rate = 0.15
seed = 5

[simulation]
duration = 1200

[[attacks]]
start = 600
end = 1200
target = "busiest"
mode = "ALL_RED"

[dataset]
rows = 9
seed = 5

[train]
epochs = 2
seed = 5
"""


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One fully executed run directory shared by the read-only checks."""
    root = tmp_path_factory.mktemp("cli")
    config = root / "scenario.toml"
    config.write_text(SCENARIO)
    out = root / "run"
    steps = [
        ["simulate", "--config", str(config), "--out", str(out)],
        ["dataset", "--config", str(config), "--out", str(out)],
        ["train", "--config", str(config), "--out", str(out)],
        ["eval", "--out", str(out)],
        ["explain", "occlusion", "--out", str(out)],
        ["explain", "lime", "--out", str(out), "--samples", "300", "--seed", "3"],
        ["explain", "shap", "--out", str(out), "--coalitions", "200", "--seed", "3"],
        ["triage", "--out", str(out), "--coalitions", "200"],
        ["pca", "--out", str(out)],
    ]
    for argv in steps:
        assert main(argv) == 0, f"step failed: {argv}"
    return out, config


class TestSimulate:
    def test_record_count_in_manifest(self, pipeline):
        out, _ = pipeline
        manifest = read_json(out / "records.json")
        # 1200 s / 10 s batches * 16 detectors on a 4-lane single intersection
        assert manifest["record_count"] == 1920
        assert manifest["attack_timeline"][0]["mode"] == "ALL_RED"

    def test_two_hour_mixed_scenario_record_count(self, tmp_path):
        config = tmp_path / "s.toml"
        config.write_text(
            """
            [network]
            grid_rows = 2
            grid_cols = 2
            approach_lanes = [5, 4, 5, 4]
            default_arrival_rate = 0.08
            seed = 1

            [simulation]
            duration = 7200

            [[attacks]]
            start = 3600
            end = 7200
            target = "busiest"
            """
        )
        assert main(["simulate", "--config", str(config), "--out", str(tmp_path / "o")]) == 0
        manifest = read_json(tmp_path / "o" / "records.json")
        # 18 detectors (5+4+5+4) reporting every 10 s for two hours
        assert manifest["record_count"] == 12960

    def test_same_seed_is_byte_identical(self, pipeline, tmp_path):
        out, config = pipeline
        assert main(["simulate", "--config", str(config), "--out", str(tmp_path)]) == 0
        assert (tmp_path / "records.csv").read_bytes() == (out / "records.csv").read_bytes()

    def test_missing_scenario_exits_2(self, tmp_path, capsys):
        code = main(["simulate", "--config", str(tmp_path / "nope.toml"),
                     "--out", str(tmp_path)])
        assert code == 2
        assert "not found" in capsys.readouterr().err


class TestDataset:
    def test_manifest_reflects_config_section(self, pipeline):
        out, _ = pipeline
        manifest = read_json(out / "dataset.json")
        assert manifest["rows"] == 9
        assert manifest["seed"] == 5
        assert manifest["smote_applied"] is True
        assert manifest["counts"]["train"]["hacked"] == manifest["counts"]["train"]["normal"]

    def test_requires_records(self, tmp_path, capsys):
        assert main(["dataset", "--out", str(tmp_path), "--rows", "9"]) == 2
        assert "simulate" in capsys.readouterr().err

    def test_rejects_unsupported_rows(self, pipeline, capsys):
        out, _ = pipeline
        assert main(["dataset", "--out", str(out), "--rows", "7"]) == 2

    def test_unknown_config_key_exits_2(self, pipeline, tmp_path, capsys):
        out, _ = pipeline
        config = tmp_path / "bad.toml"
        config.write_text("[dataset]\nwindow_size = 9\n")
        assert main(["dataset", "--config", str(config), "--out", str(out)]) == 2
        assert "window_size" in capsys.readouterr().err

    def test_tampered_records_fail_digest(self, pipeline, tmp_path, capsys):
        out, _ = pipeline
        work = tmp_path / "copy"
        shutil.copytree(out, work)
        blob = bytearray((work / "records.csv").read_bytes())
        blob[300] ^= 1
        (work / "records.csv").write_bytes(bytes(blob))
        assert main(["dataset", "--out", str(work), "--rows", "9"]) == 1
        assert "digest" in capsys.readouterr().err


class TestTrainEval:
    def test_model_manifest_links_dataset(self, pipeline):
        out, _ = pipeline
        model = read_json(out / "model.json")
        from flowsentry._util import sha256_file

        assert model["dataset_digest"] == sha256_file(out / "dataset.json")
        assert model["epochs"] == 2
        assert len(model["loss_history"]) == 2

    def test_eval_prints_metrics_table(self, pipeline, capsys):
        out, _ = pipeline
        assert main(["eval", "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "Positive class" in text
        assert "Accuracy (%)" in text
        assert "hacked-positive" in text

    def test_eval_rerun_is_byte_identical(self, pipeline):
        out, _ = pipeline
        before = (out / "metrics.json").read_bytes()
        assert main(["eval", "--out", str(out)]) == 0
        assert (out / "metrics.json").read_bytes() == before

    def test_tampered_model_fails_digest(self, pipeline, tmp_path, capsys):
        out, _ = pipeline
        work = tmp_path / "copy"
        shutil.copytree(out, work)
        blob = bytearray((work / "model.bin").read_bytes())
        blob[-5] ^= 1
        (work / "model.bin").write_bytes(bytes(blob))
        assert main(["eval", "--out", str(work)]) == 1
        assert "digest" in capsys.readouterr().err

    def test_rebuilt_dataset_invalidates_model(self, pipeline, tmp_path):
        out, _ = pipeline
        work = tmp_path / "copy"
        shutil.copytree(out, work)
        assert main(["dataset", "--out", str(work), "--rows", "9", "--seed", "99"]) == 0
        assert main(["eval", "--out", str(work)]) == 1


class TestExplain:
    def test_occlusion_grid_file(self, pipeline):
        out, _ = pipeline
        lines = (out / "xai" / "occlusion_0000.csv").read_text().splitlines()
        assert len(lines) == 1 + 9                     # header + one row per window row
        assert lines[0].startswith("sampledSeconds,")
        assert all(len(line.split(",")) == 23 for line in lines)
        scores = [float(v) for line in lines[1:] for v in line.split(",")]
        assert all(0.0 <= s <= 1.0 for s in scores)

    def test_lime_attribution_payload(self, pipeline):
        out, _ = pipeline
        payload = read_json(out / "xai" / "lime_0000.json")
        assert payload["method"] == "LIME"
        assert len(payload["ranked"]) <= 10
        for key, loc in payload["locations"].items():
            assert 0 <= loc["row"] < 9
            assert loc["feature"]

    def test_shap_attribution_payload(self, pipeline):
        out, _ = pipeline
        payload = read_json(out / "xai" / "shap_0000.json")
        assert payload["method"] == "SHAP"
        assert payload["base_value"] is not None
        names = {entry["feature"] for entry in payload["ranked"]}
        assert "meanVehicleNumber" in names or len(names) == 23

    def test_errors_mode_writes_one_file_per_case(self, pipeline, tmp_path):
        out, _ = pipeline
        work = tmp_path / "copy"
        shutil.copytree(out, work)
        for old in (work / "xai").glob("shap_*.json"):
            old.unlink()
        assert main(["explain", "shap", "--out", str(work), "--errors",
                     "--coalitions", "200"]) == 0
        report = read_json(work / "triage.json")
        assert len(list((work / "xai").glob("shap_*.json"))) == report["error_count"]

    def test_sample_out_of_range_exits_2(self, pipeline, capsys):
        out, _ = pipeline
        assert main(["explain", "shap", "--out", str(out), "--sample", "9999"]) == 2

    def test_unknown_method_exits_2(self, pipeline):
        out, _ = pipeline
        with pytest.raises(SystemExit) as exc:
            main(["explain", "gradcam", "--out", str(out)])
        assert exc.value.code == 2

    def test_repeatable_sample_flag(self, pipeline, tmp_path):
        out, _ = pipeline
        work = tmp_path / "copy"
        shutil.copytree(out, work)
        assert main(["explain", "occlusion", "--out", str(work),
                     "--sample", "1", "--sample", "2"]) == 0
        assert (work / "xai" / "occlusion_0001.csv").exists()
        assert (work / "xai" / "occlusion_0002.csv").exists()


class TestTriagePca:
    def test_triage_counts_sum(self, pipeline):
        out, _ = pipeline
        report = read_json(out / "triage.json")
        assert report["kind"] == "triage_report"
        assert sum(report["counts"].values()) == report["error_count"]
        assert report["test_count"] == read_json(out / "dataset.json")["counts"]["test"][
            "hacked"
        ] + read_json(out / "dataset.json")["counts"]["test"]["normal"]

    def test_triage_rerun_is_byte_identical(self, pipeline):
        out, _ = pipeline
        before = (out / "triage.json").read_bytes()
        assert main(["triage", "--out", str(out), "--coalitions", "200"]) == 0
        assert (out / "triage.json").read_bytes() == before

    def test_pca_scatter_has_both_labels(self, pipeline):
        out, _ = pipeline
        lines = (out / "pca.csv").read_text().splitlines()
        assert lines[0] == "pc1,pc2,label"
        labels = {line.rsplit(",", 1)[1] for line in lines[1:]}
        assert labels == {"0", "1"}

    def test_pca_metadata_ratios(self, pipeline):
        out, _ = pipeline
        meta = read_json(out / "pca.json")
        ratios = meta["explained_variance_ratio"]
        assert abs(sum(ratios) - 1.0) < 1e-9
        assert meta["components"] == 2
        assert 0.0 < meta["explained_variance_of_projection"] <= 1.0

    def test_run_manifest_tracks_stages(self, pipeline):
        out, _ = pipeline
        run = read_json(out / "run.json")
        stages = set(run["stages"])
        assert {"simulate", "dataset", "train", "eval", "triage", "pca"} <= stages
        assert "explain:occlusion" in stages
