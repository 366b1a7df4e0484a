#!/usr/bin/env python3
"""Regenerate the frozen golden outputs under tests/golden/.

Run only when an intentional behavior change invalidates the goldens;
the diff is the review artifact.
"""

import shutil
from pathlib import Path

from invoicesynth.generation import mock_generate
from invoicesynth.layout import parse_layout
from invoicesynth.pipeline import PipelineConfig, run_single
from invoicesynth.planner import select_targets

ROOT = Path(__file__).resolve().parent.parent
SAMPLE = ROOT / "src" / "invoicesynth" / "assets" / "sample"
GOLDEN = ROOT / "tests" / "golden"


def main():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    doc = parse_layout((SAMPLE / "seed_invoice.layout.json").read_text(encoding="utf-8"))
    plan = select_targets(doc, [])
    (GOLDEN / "map_seed42.json").write_text(mock_generate(plan, 42).to_json(), encoding="utf-8")

    variant_dir = GOLDEN / "variant_seed42"
    if variant_dir.exists():
        shutil.rmtree(variant_dir)
    config = PipelineConfig(
        input_image=SAMPLE / "seed_invoice.png",
        input_layout=SAMPLE / "seed_invoice.layout.json",
        output_dir=variant_dir,
    )
    artifact = run_single(config, 42)
    # Timings vary run to run; the report is not part of the golden set.
    artifact.report_path.unlink()
    print(f"froze goldens under {GOLDEN}")


if __name__ == "__main__":
    main()
