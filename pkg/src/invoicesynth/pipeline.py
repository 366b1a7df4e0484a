"""End-to-end orchestration: load, plan, generate, inpaint, render, emit.

Each run turns one (image, layout) pair plus a seed into a variant
directory holding the synthetic page, its ground truth, box-level
annotations, and a machine-readable run report. The contract throughout:
every ground-truth value is byte-identical to the string rendered on the
image, and annotation boxes equal the source layout boxes.
"""

from __future__ import annotations

import dataclasses
import json
import shutil
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fonts import FontSpec, MissingGlyphWarning, default_font_path
from .generation import GenerationError, GeneratorConfig, generate
from .inpaint import InpaintError, InpaintParams, inpaint
from .layout import BBox, LayoutDocument, LayoutError, parse_layout
from .planner import PlanError, ReplacementPlan, RuleAction, RuleKind, SelectionRule, select_targets
from .raster import RasterError, build_mask, load_image, save_image, save_mask
from .render import CannotFitError, estimate_text_color, fit_font_size, render_fragment

__all__ = [
    "PipelineConfig",
    "PipelineError",
    "ConfigError",
    "GenerationArtifact",
    "ArtifactViolation",
    "run_single",
    "run_batch",
    "verify_artifact",
    "load_config",
]


class PipelineError(RuntimeError):
    """A stage failed; carries the stage name and fragment context."""

    def __init__(self, stage: str, message: str, fragment_id: str | None = None):
        context = f" ({fragment_id})" if fragment_id else ""
        super().__init__(f"[{stage}]{context} {message}")
        self.stage = stage
        self.fragment_id = fragment_id


class ConfigError(ValueError):
    """The pipeline configuration file is unusable."""


@dataclass(frozen=True)
class PipelineConfig:
    input_image: Path
    input_layout: Path
    output_dir: Path
    variants: int = 1
    base_seed: int = 0
    selection_rules: tuple[SelectionRule, ...] = ()
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    inpaint: InpaintParams = field(default_factory=InpaintParams)
    font: FontSpec = field(default_factory=lambda: FontSpec(default_font_path()))
    color_override: tuple[int, int, int] | None = None
    dump_mask: bool = False

    def __post_init__(self):
        if self.variants < 1:
            raise ConfigError("variants must be >= 1")
        if not (0 <= int(self.base_seed) < 2**64):
            raise ConfigError("base_seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "input_image", Path(self.input_image))
        object.__setattr__(self, "input_layout", Path(self.input_layout))
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        object.__setattr__(self, "selection_rules", tuple(self.selection_rules))


def load_config(path: str | Path, **overrides) -> PipelineConfig:
    """Load a pipeline config file (canonical JSON dialect, keys matching
    PipelineConfig fields). Relative paths resolve against the file's
    directory; absent sections take their defaults."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    base = path.parent

    def _path(value, fallback=None):
        if value is None:
            return fallback
        p = Path(value)
        return p if p.is_absolute() else base / p

    try:
        rules = tuple(
            SelectionRule(
                kind=RuleKind(r["kind"]),
                payload=r["payload"],
                action=RuleAction(r.get("action", "include")),
                role=r.get("role"),
            )
            for r in raw.get("selection_rules", [])
        )
        gen_raw = dict(raw.get("generator", {}))
        font_raw = dict(raw.get("font", {}))
        font_file = _path(font_raw.pop("font_file_ref", None), default_font_path())
        color = raw.get("color_override")
        kwargs = dict(
            input_image=_path(raw["input_image"]),
            input_layout=_path(raw["input_layout"]),
            output_dir=_path(raw["output_dir"]),
            variants=raw.get("variants", 1),
            base_seed=raw.get("base_seed", 0),
            selection_rules=rules,
            generator=GeneratorConfig(**gen_raw),
            inpaint=InpaintParams(**raw.get("inpaint", {})),
            font=FontSpec(font_file, **font_raw),
            color_override=tuple(color) if color is not None else None,
            dump_mask=raw.get("dump_mask", False),
        )
        kwargs.update(overrides)
        return PipelineConfig(**kwargs)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid config {path}: {exc}") from exc


@dataclass(frozen=True)
class GenerationArtifact:
    output_dir: Path
    image_path: Path
    ground_truth_path: Path
    annotations_path: Path
    report_path: Path
    run_report: dict


@dataclass(frozen=True)
class ArtifactViolation:
    fragment_id: str | None
    rule: str
    message: str


def _bbox_json(box: BBox) -> dict:
    def num(v):
        return int(v) if float(v).is_integer() else v

    return {
        "x_min": num(box.x_min),
        "y_min": num(box.y_min),
        "x_max": num(box.x_max),
        "y_max": num(box.y_max),
    }


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def run_single(
    config: PipelineConfig, seed: int, out_dir: Path | None = None
) -> GenerationArtifact:
    """Produce one synthetic variant into out_dir (default: output_dir).

    Stage order: parse layout, select targets, generate replacements,
    estimate ink colors from the original, mask + inpaint, render in
    document order, emit the artifact triple plus report. Any stage error
    aborts the run and removes partial outputs.
    """
    out_dir = Path(out_dir) if out_dir is not None else config.output_dir
    created = not out_dir.exists()
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        return _run_single_inner(config, seed, out_dir)
    except Exception:
        if created:
            shutil.rmtree(out_dir, ignore_errors=True)
        else:
            for name in ("synthetic.png", "ground_truth.json", "annotations.json", "report.json", "mask.png"):
                (out_dir / name).unlink(missing_ok=True)
        raise


def _run_single_inner(config: PipelineConfig, seed: int, out_dir: Path) -> GenerationArtifact:
    timings: dict[str, float] = {}
    run_warnings: list[dict] = []

    t0 = time.perf_counter()
    try:
        doc = parse_layout(config.input_layout.read_text(encoding="utf-8"))
    except OSError as exc:
        raise PipelineError("load", f"cannot read layout: {exc}") from exc
    except LayoutError as exc:
        raise PipelineError("load", str(exc), exc.fragment_id) from exc
    try:
        original = load_image(config.input_image)
    except OSError as exc:
        raise PipelineError("load", f"cannot read image: {exc}") from exc
    height, width = original.shape[:2]
    if (width, height) != (doc.page_width, doc.page_height):
        raise PipelineError(
            "load",
            f"layout page {doc.page_width}x{doc.page_height} does not match "
            f"image {width}x{height}",
        )
    timings["load"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    try:
        plan = select_targets(doc, list(config.selection_rules))
    except PlanError as exc:
        raise PipelineError("plan", str(exc)) from exc
    timings["plan"] = time.perf_counter() - t0

    fragments_out: list[dict] = []
    fields: dict[str, str] = {}
    roles: dict[str, str] = {}

    if len(plan) == 0:
        composed = original
        run_warnings.append({"type": "no_op", "message": "empty replacement plan"})
        timings["generate"] = timings["inpaint"] = timings["render"] = 0.0
    else:
        t0 = time.perf_counter()
        generator = dataclasses.replace(config.generator, seed=seed)
        try:
            mapping = generate(plan, generator)
        except GenerationError as exc:
            raise PipelineError("generate", str(exc)) from exc
        timings["generate"] = time.perf_counter() - t0

        # Ink colors come from the pre-inpaint image; sampling afterwards
        # would estimate background, not ink.
        colors = {
            e.fragment_id: (
                config.color_override
                if config.color_override is not None
                else estimate_text_color(original, doc.fragment_by_id(e.fragment_id).bbox)
            )
            for e in plan
        }

        t0 = time.perf_counter()
        boxes = [doc.fragment_by_id(e.fragment_id).bbox for e in plan]
        try:
            mask = build_mask(width, height, boxes, pad=config.inpaint.mask_pad)
            composed = inpaint(original, mask, config.inpaint)
        except (RasterError, InpaintError) as exc:
            raise PipelineError("inpaint", str(exc)) from exc
        if config.dump_mask:
            save_mask(mask, out_dir / "mask.png")
        timings["inpaint"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        for entry in plan:
            frag = doc.fragment_by_id(entry.fragment_id)
            text = mapping[entry.fragment_id]
            try:
                size = fit_font_size(text, frag.bbox, config.font)
            except CannotFitError as exc:
                size = config.font.min_size
                run_warnings.append(
                    {
                        "type": "fit_warning",
                        "fragment_id": entry.fragment_id,
                        "message": exc.reason,
                        "rendered_at_min_size": size,
                    }
                )
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", MissingGlyphWarning)
                composed, rendered = render_fragment(
                    composed, frag.bbox, text, config.font, size,
                    colors[entry.fragment_id], fragment_id=entry.fragment_id,
                )
            for warning in caught:
                if issubclass(warning.category, MissingGlyphWarning):
                    run_warnings.append(
                        {
                            "type": "missing_glyph",
                            "fragment_id": entry.fragment_id,
                            "message": str(warning.message),
                        }
                    )
            fields[entry.fragment_id] = text
            if entry.role:
                roles[entry.role] = text
            fragments_out.append(
                {
                    "id": entry.fragment_id,
                    "original_text": entry.original_text,
                    "rendered_text": rendered.text,
                    "content_class": entry.content_class.value,
                    "size": rendered.size,
                    "color": list(colors[entry.fragment_id]),
                }
            )
        timings["render"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    image_path = out_dir / "synthetic.png"
    ground_truth_path = out_dir / "ground_truth.json"
    annotations_path = out_dir / "annotations.json"
    report_path = out_dir / "report.json"

    save_image(composed, image_path)
    _write_json(ground_truth_path, {"fields": fields, "roles": roles})
    _write_json(
        annotations_path,
        {
            "fragments": [
                {
                    "id": e.fragment_id,
                    "text": fields[e.fragment_id],
                    "bbox": _bbox_json(doc.fragment_by_id(e.fragment_id).bbox),
                    "content_class": e.content_class.value,
                }
                for e in plan
            ]
        },
    )
    timings["emit"] = time.perf_counter() - t0
    report = {
        "seed": seed,
        "generator_mode": config.generator.mode,
        "no_op": len(plan) == 0,
        "warnings": run_warnings,
        "fragments": fragments_out,
        "timings": {k: round(v, 6) for k, v in timings.items()},
    }
    _write_json(report_path, report)

    return GenerationArtifact(
        output_dir=out_dir,
        image_path=image_path,
        ground_truth_path=ground_truth_path,
        annotations_path=annotations_path,
        report_path=report_path,
        run_report=report,
    )


def run_batch(
    config: PipelineConfig, equal_seeds: bool = False
) -> tuple[list[GenerationArtifact], list[tuple[int, Exception]]]:
    """Generate `variants` outputs into numbered subdirectories.

    Seeds are base_seed, base_seed+1, ... (or all base_seed when
    equal_seeds is set, for determinism checks). Individual failures are
    recorded and skipped; callers decide the exit status.
    """
    artifacts: list[GenerationArtifact] = []
    failures: list[tuple[int, Exception]] = []
    for i in range(config.variants):
        seed = config.base_seed if equal_seeds else config.base_seed + i
        out_dir = config.output_dir / f"variant_{i:03d}"
        try:
            artifacts.append(run_single(config, seed, out_dir))
        except Exception as exc:  # noqa: BLE001 - recorded, not swallowed
            failures.append((i, exc))

    if config.generator.mode == "mock" and not equal_seeds:
        _assert_diversity(artifacts)
    return artifacts, failures


def _assert_diversity(artifacts: list[GenerationArtifact]) -> None:
    payloads = []
    for artifact in artifacts:
        fields = json.loads(artifact.ground_truth_path.read_text())["fields"]
        if fields:
            payloads.append((artifact.output_dir.name, fields))
    for i in range(len(payloads)):
        for j in range(i + 1, len(payloads)):
            if payloads[i][1] == payloads[j][1]:
                raise PipelineError(
                    "batch",
                    f"variants {payloads[i][0]} and {payloads[j][0]} produced "
                    "identical ground truth",
                )


def verify_artifact(
    artifact: GenerationArtifact | Path, layout: LayoutDocument
) -> list[ArtifactViolation]:
    """Check the pairing guarantee of an emitted artifact.

    (a) ground-truth keys equal the planned fragment IDs, (b) annotation
    boxes equal the source layout boxes, (c) report rendered strings equal
    ground-truth values. Empty list iff all hold.
    """
    if isinstance(artifact, GenerationArtifact):
        out_dir = artifact.output_dir
    else:
        out_dir = Path(artifact)
    try:
        ground_truth = json.loads((out_dir / "ground_truth.json").read_text(encoding="utf-8"))
        annotations = json.loads((out_dir / "annotations.json").read_text(encoding="utf-8"))
        report = json.loads((out_dir / "report.json").read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise PipelineError("verify", f"cannot read artifact files: {exc}") from exc

    violations: list[ArtifactViolation] = []
    fields = ground_truth.get("fields", {})
    ann_by_id = {a["id"]: a for a in annotations.get("fragments", [])}
    report_by_id = {f["id"]: f for f in report.get("fragments", [])}

    planned = set(report_by_id)
    if set(fields) != planned:
        for missing in sorted(planned - set(fields)):
            violations.append(
                ArtifactViolation(missing, "gt_keys", f"{missing} planned but absent from ground truth")
            )
        for extra in sorted(set(fields) - planned):
            violations.append(
                ArtifactViolation(extra, "gt_keys", f"{extra} in ground truth but not planned")
            )
    if set(ann_by_id) != planned:
        violations.append(
            ArtifactViolation(None, "annotation_keys", "annotation IDs differ from planned IDs")
        )

    layout_by_id = {f.id: f for f in layout.fragments}
    for fragment_id, ann in ann_by_id.items():
        frag = layout_by_id.get(fragment_id)
        if frag is None:
            violations.append(
                ArtifactViolation(fragment_id, "unknown_fragment", f"{fragment_id} not in layout")
            )
            continue
        expected = _bbox_json(frag.bbox)
        got = ann.get("bbox")
        if {k: float(v) for k, v in expected.items()} != {k: float(v) for k, v in (got or {}).items()}:
            violations.append(
                ArtifactViolation(
                    fragment_id, "bbox_mismatch",
                    f"annotation bbox {got} != layout bbox {expected}",
                )
            )

    for fragment_id, entry in report_by_id.items():
        if fragment_id in fields and entry.get("rendered_text") != fields[fragment_id]:
            violations.append(
                ArtifactViolation(
                    fragment_id, "value_mismatch",
                    f"rendered {entry.get('rendered_text')!r} != "
                    f"ground truth {fields[fragment_id]!r}",
                )
            )
    for fragment_id, ann in ann_by_id.items():
        if fragment_id in fields and ann.get("text") != fields[fragment_id]:
            violations.append(
                ArtifactViolation(
                    fragment_id, "value_mismatch",
                    f"annotation text {ann.get('text')!r} != "
                    f"ground truth {fields[fragment_id]!r}",
                )
            )
    return violations
