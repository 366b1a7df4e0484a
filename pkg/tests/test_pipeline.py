import json
import shutil
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from invoicesynth.cli import main as cli_main
from invoicesynth.generation import mock_generate
from invoicesynth.layout import parse_layout
from invoicesynth.pipeline import (
    ConfigError,
    PipelineConfig,
    PipelineError,
    load_config,
    run_batch,
    run_single,
    verify_artifact,
)
from invoicesynth.planner import select_targets
from invoicesynth.raster import save_image

GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

ARTIFACT_NAMES = ("synthetic.png", "ground_truth.json", "annotations.json", "report.json")


def make_page(tmp_path, fragments, width=200, height=100, name="page"):
    """Write a white page image plus a matching layout; return the paths."""
    image_path = tmp_path / f"{name}.png"
    layout_path = tmp_path / f"{name}.layout.json"
    save_image(np.full((height, width, 3), 255, dtype=np.uint8), image_path)
    layout_path.write_text(
        json.dumps(
            {
                "page_width": width,
                "page_height": height,
                "source_image_ref": image_path.name,
                "fragments": fragments,
            }
        ),
        encoding="utf-8",
    )
    return image_path, layout_path


def fragment(idx, text, bbox, content_class="free_text", replace=True):
    x0, y0, x1, y1 = bbox
    return {
        "id": f"frag_{idx:03d}",
        "text": text,
        "bbox": {"x_min": x0, "y_min": y0, "x_max": x1, "y_max": y1},
        "content_class": content_class,
        "replace": replace,
    }


class TestRunSingle:
    def test_artifact_files_written(self, tmp_path, sample_image_path, sample_layout_path):
        config = PipelineConfig(sample_image_path, sample_layout_path, tmp_path / "out")
        artifact = run_single(config, 42)
        for name in ARTIFACT_NAMES:
            assert (artifact.output_dir / name).exists(), name
        assert artifact.run_report["seed"] == 42
        assert artifact.run_report["no_op"] is False

    def test_verifies_clean(self, tmp_path, sample_image_path, sample_layout_path, sample_doc):
        config = PipelineConfig(sample_image_path, sample_layout_path, tmp_path / "out")
        artifact = run_single(config, 42)
        assert verify_artifact(artifact, sample_doc) == []

    def test_matches_golden_bytes(self, tmp_path, sample_image_path, sample_layout_path):
        config = PipelineConfig(sample_image_path, sample_layout_path, tmp_path / "out")
        artifact = run_single(config, 42)
        for name in ("synthetic.png", "ground_truth.json", "annotations.json"):
            got = (artifact.output_dir / name).read_bytes()
            assert got == (GOLDEN_DIR / "variant_seed42" / name).read_bytes(), name

    def test_mock_map_matches_golden(self, sample_doc):
        plan = select_targets(sample_doc, [])
        assert mock_generate(plan, 42).to_json() == (GOLDEN_DIR / "map_seed42.json").read_text(
            encoding="utf-8"
        )

    def test_same_seed_bit_identical(self, tmp_path, sample_image_path, sample_layout_path):
        config = PipelineConfig(sample_image_path, sample_layout_path, tmp_path / "ignored")
        a = run_single(config, 7, tmp_path / "a")
        b = run_single(config, 7, tmp_path / "b")
        for name in ("synthetic.png", "ground_truth.json", "annotations.json"):
            assert (a.output_dir / name).read_bytes() == (b.output_dir / name).read_bytes()

    def test_different_seeds_differ(self, tmp_path, sample_image_path, sample_layout_path):
        config = PipelineConfig(sample_image_path, sample_layout_path, tmp_path / "ignored")
        a = run_single(config, 1, tmp_path / "a")
        b = run_single(config, 2, tmp_path / "b")
        fields_a = json.loads(a.ground_truth_path.read_text())["fields"]
        fields_b = json.loads(b.ground_truth_path.read_text())["fields"]
        assert fields_a != fields_b

    def test_no_op_when_nothing_selected(self, tmp_path, sample_image_path, sample_layout_path):
        # Strip every replace flag: with no rules and no flags the plan is
        # empty and the pipeline re-encodes the original untouched.
        raw = json.loads(sample_layout_path.read_text(encoding="utf-8"))
        for frag in raw["fragments"]:
            frag["replace"] = False
        layout_path = tmp_path / "flat.layout.json"
        layout_path.write_text(json.dumps(raw), encoding="utf-8")

        config = PipelineConfig(sample_image_path, layout_path, tmp_path / "out")
        artifact = run_single(config, 5)
        assert artifact.run_report["no_op"] is True
        assert [w["type"] for w in artifact.run_report["warnings"]] == ["no_op"]
        assert json.loads(artifact.ground_truth_path.read_text()) == {"fields": {}, "roles": {}}
        from invoicesynth.raster import load_image

        assert np.array_equal(load_image(artifact.image_path), load_image(sample_image_path))

    def test_fit_warning_renders_at_min_size(self, tmp_path):
        image_path, layout_path = make_page(
            tmp_path,
            [
                fragment(0, "an extremely long line of text", (10, 10, 40, 24)),
                fragment(1, "ok", (10, 40, 120, 60)),
            ],
        )
        config = PipelineConfig(image_path, layout_path, tmp_path / "out")
        artifact = run_single(config, 3)
        warns = [w for w in artifact.run_report["warnings"] if w["type"] == "fit_warning"]
        assert len(warns) == 1
        assert warns[0]["fragment_id"] == "frag_000"
        by_id = {f["id"]: f for f in artifact.run_report["fragments"]}
        assert by_id["frag_000"]["size"] == config.font.min_size
        assert by_id["frag_001"]["size"] > config.font.min_size

    def test_page_size_mismatch_rejected(self, tmp_path, sample_image_path):
        _, layout_path = make_page(tmp_path, [fragment(0, "x", (5, 5, 50, 20))], 111, 99)
        config = PipelineConfig(sample_image_path, layout_path, tmp_path / "out")
        with pytest.raises(PipelineError, match="does not match"):
            run_single(config, 0)

    def test_failed_run_leaves_no_partial_output(self, tmp_path, sample_image_path):
        _, layout_path = make_page(tmp_path, [fragment(0, "x", (5, 5, 50, 20))], 111, 99)
        out_dir = tmp_path / "out"
        config = PipelineConfig(sample_image_path, layout_path, out_dir)
        with pytest.raises(PipelineError):
            run_single(config, 0)
        assert not out_dir.exists()

    def test_color_override_applied(self, tmp_path, sample_image_path, sample_layout_path):
        config = PipelineConfig(
            sample_image_path, sample_layout_path, tmp_path / "out",
            color_override=(200, 10, 10),
        )
        artifact = run_single(config, 42)
        colors = {tuple(f["color"]) for f in artifact.run_report["fragments"]}
        assert colors == {(200, 10, 10)}

    def test_dump_mask(self, tmp_path, sample_image_path, sample_layout_path):
        config = PipelineConfig(
            sample_image_path, sample_layout_path, tmp_path / "out", dump_mask=True
        )
        artifact = run_single(config, 42)
        assert (artifact.output_dir / "mask.png").exists()


class TestRunBatch:
    def test_variant_directories_and_seeds(self, tmp_path, sample_image_path, sample_layout_path):
        config = PipelineConfig(
            sample_image_path, sample_layout_path, tmp_path / "out",
            variants=3, base_seed=10,
        )
        artifacts, failures = run_batch(config)
        assert failures == []
        assert [a.output_dir.name for a in artifacts] == [
            "variant_000", "variant_001", "variant_002",
        ]
        assert [a.run_report["seed"] for a in artifacts] == [10, 11, 12]

    def test_variants_pairwise_distinct(self, tmp_path, sample_image_path, sample_layout_path):
        config = PipelineConfig(
            sample_image_path, sample_layout_path, tmp_path / "out", variants=4
        )
        artifacts, failures = run_batch(config)
        assert failures == []
        payloads = [json.loads(a.ground_truth_path.read_text())["fields"] for a in artifacts]
        for i in range(len(payloads)):
            for j in range(i + 1, len(payloads)):
                assert payloads[i] != payloads[j]

    def test_equal_seeds_bit_identical(self, tmp_path, sample_image_path, sample_layout_path):
        config = PipelineConfig(
            sample_image_path, sample_layout_path, tmp_path / "out",
            variants=3, base_seed=42,
        )
        artifacts, failures = run_batch(config, equal_seeds=True)
        assert failures == []
        reference = {
            name: (artifacts[0].output_dir / name).read_bytes()
            for name in ("synthetic.png", "ground_truth.json", "annotations.json")
        }
        for artifact in artifacts[1:]:
            for name, blob in reference.items():
                assert (artifact.output_dir / name).read_bytes() == blob


class TestVerify:
    @pytest.fixture
    def artifact(self, tmp_path, sample_image_path, sample_layout_path):
        config = PipelineConfig(sample_image_path, sample_layout_path, tmp_path / "out")
        return run_single(config, 42)

    def test_clean_artifact(self, artifact, sample_doc):
        assert verify_artifact(artifact.output_dir, sample_doc) == []

    def test_tampered_ground_truth_value(self, artifact, sample_doc):
        gt = json.loads(artifact.ground_truth_path.read_text())
        key = sorted(gt["fields"])[0]
        gt["fields"][key] = gt["fields"][key] + "X"
        artifact.ground_truth_path.write_text(json.dumps(gt), encoding="utf-8")
        violations = verify_artifact(artifact.output_dir, sample_doc)
        assert {v.rule for v in violations} == {"value_mismatch"}
        assert all(v.fragment_id == key for v in violations)

    def test_tampered_annotation_bbox(self, artifact, sample_doc):
        ann = json.loads(artifact.annotations_path.read_text())
        ann["fragments"][0]["bbox"]["x_min"] += 2
        artifact.annotations_path.write_text(json.dumps(ann), encoding="utf-8")
        violations = verify_artifact(artifact.output_dir, sample_doc)
        assert [v.rule for v in violations] == ["bbox_mismatch"]

    def test_dropped_ground_truth_key(self, artifact, sample_doc):
        gt = json.loads(artifact.ground_truth_path.read_text())
        key = sorted(gt["fields"])[0]
        del gt["fields"][key]
        artifact.ground_truth_path.write_text(json.dumps(gt), encoding="utf-8")
        violations = verify_artifact(artifact.output_dir, sample_doc)
        assert any(v.rule == "gt_keys" and v.fragment_id == key for v in violations)

    def test_missing_files_raise(self, tmp_path, sample_doc):
        with pytest.raises(PipelineError, match="cannot read"):
            verify_artifact(tmp_path, sample_doc)


class TestLoadConfig:
    def test_round_trip(self, make_config):
        config = load_config(make_config())
        assert config.variants == 1
        assert config.base_seed == 42
        assert config.generator.mode == "mock"

    def test_relative_paths_resolve_against_config_dir(
        self, tmp_path, sample_image_path, sample_layout_path
    ):
        shutil.copy(sample_image_path, tmp_path / "img.png")
        shutil.copy(sample_layout_path, tmp_path / "layout.json")
        config_path = tmp_path / "config.json"
        config_path.write_text(
            json.dumps(
                {
                    "input_image": "img.png",
                    "input_layout": "layout.json",
                    "output_dir": "out",
                }
            ),
            encoding="utf-8",
        )
        config = load_config(config_path)
        assert config.input_image == tmp_path / "img.png"
        assert config.output_dir == tmp_path / "out"

    def test_overrides_win(self, make_config):
        config = load_config(make_config(), variants=5, base_seed=9)
        assert config.variants == 5
        assert config.base_seed == 9

    def test_selection_rules_parsed(self, make_config):
        path = make_config(
            selection_rules=[
                {"kind": "by_class", "payload": "date", "role": "issue_date"},
                {"kind": "by_id", "payload": ["frag_001"], "action": "exclude"},
            ]
        )
        config = load_config(path)
        assert len(config.selection_rules) == 2
        assert config.selection_rules[0].role == "issue_date"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "absent.json")

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="malformed"):
            load_config(path)

    def test_non_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(path)

    def test_missing_required_key(self, tmp_path):
        path = tmp_path / "partial.json"
        path.write_text(json.dumps({"input_image": "a.png"}), encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_bad_generator_mode(self, make_config):
        with pytest.raises(ConfigError, match="mode"):
            load_config(make_config(generator={"mode": "psychic"}))

    def test_zero_variants_rejected(self, make_config):
        with pytest.raises(ConfigError, match="variants"):
            load_config(make_config(variants=0))


class TestCli:
    def test_generate_success(self, make_config, tmp_path):
        runner = CliRunner()
        result = runner.invoke(cli_main, ["generate", "--config", str(make_config())])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "out" / "variant_000" / "synthetic.png").exists()

    def test_generate_with_verify_and_variants(self, make_config, tmp_path):
        runner = CliRunner()
        result = runner.invoke(
            cli_main,
            ["generate", "--config", str(make_config()), "--variants", "2", "--verify"],
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "out" / "variant_001" / "ground_truth.json").exists()

    def test_generate_dump_mask(self, make_config, tmp_path):
        runner = CliRunner()
        result = runner.invoke(
            cli_main, ["generate", "--config", str(make_config()), "--dump-mask"]
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "out" / "variant_000" / "mask.png").exists()

    def test_generate_missing_config_exits_2(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(
            cli_main, ["generate", "--config", str(tmp_path / "none.json")]
        )
        assert result.exit_code == 2

    def test_generate_bad_layout_exits_2(self, make_config, tmp_path):
        bad_layout = tmp_path / "bad.json"
        bad_layout.write_text("{}", encoding="utf-8")
        runner = CliRunner()
        result = runner.invoke(
            cli_main,
            ["generate", "--config", str(make_config(input_layout=str(bad_layout)))],
        )
        assert result.exit_code == 2

    def test_verify_command_ok_then_tampered(self, make_config, tmp_path, sample_layout_path):
        runner = CliRunner()
        result = runner.invoke(cli_main, ["generate", "--config", str(make_config())])
        assert result.exit_code == 0, result.output
        variant = tmp_path / "out" / "variant_000"

        result = runner.invoke(
            cli_main,
            ["verify", "--artifact-dir", str(variant), "--layout", str(sample_layout_path)],
        )
        assert result.exit_code == 0
        assert "ok" in result.output

        gt_path = variant / "ground_truth.json"
        gt = json.loads(gt_path.read_text())
        key = sorted(gt["fields"])[0]
        gt["fields"][key] += "!"
        gt_path.write_text(json.dumps(gt), encoding="utf-8")
        result = runner.invoke(
            cli_main,
            ["verify", "--artifact-dir", str(variant), "--layout", str(sample_layout_path)],
        )
        assert result.exit_code == 1
        assert "value_mismatch" in result.output
