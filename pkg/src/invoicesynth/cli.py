"""Command-line entry points.

Exit codes: 0 success, 1 at least one variant failed, 2 config/IO error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .layout import LayoutError, parse_layout
from .pipeline import ConfigError, PipelineError, load_config, run_batch, verify_artifact


@click.group()
def main():
    """Synthetic invoice generation with layout-preserving replacement."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=False))
@click.option("--variants", type=int, default=None, help="Override variant count.")
@click.option("--seed", type=int, default=None, help="Override base seed.")
@click.option("--mock", is_flag=True, help="Force the offline mock generator.")
@click.option("--dump-mask", is_flag=True, help="Write the inpainting mask per variant.")
@click.option("--verify", "do_verify", is_flag=True, help="Verify each artifact after generation.")
@click.option(
    "--equal-seeds", is_flag=True,
    help="Run every variant with the base seed (determinism checks).",
)
def generate(config_path, variants, seed, mock, dump_mask, do_verify, equal_seeds):
    """Generate synthetic variants from a source image + layout."""
    try:
        overrides = {}
        if variants is not None:
            overrides["variants"] = variants
        if seed is not None:
            overrides["base_seed"] = seed
        if dump_mask:
            overrides["dump_mask"] = True
        config = load_config(config_path, **overrides)
        if mock and config.generator.mode != "mock":
            import dataclasses

            config = dataclasses.replace(
                config, generator=dataclasses.replace(config.generator, mode="mock")
            )
        layout_doc = parse_layout(config.input_layout.read_text(encoding="utf-8"))
    except (ConfigError, LayoutError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    artifacts, failures = run_batch(config, equal_seeds=equal_seeds)
    for artifact in artifacts:
        click.echo(f"wrote {artifact.output_dir}")
        if do_verify:
            violations = verify_artifact(artifact, layout_doc)
            for v in violations:
                click.echo(f"  violation [{v.rule}] {v.message}", err=True)
            if violations:
                failures.append((-1, PipelineError("verify", "artifact failed verification")))
    for index, exc in failures:
        click.echo(f"variant {index} failed: {exc}", err=True)
    sys.exit(1 if failures else 0)


@main.command()
@click.option("--artifact-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--layout", "layout_path", required=True, type=click.Path(exists=True, dir_okay=False))
def verify(artifact_dir, layout_path):
    """Verify the pairing guarantee of an emitted artifact directory."""
    try:
        layout_doc = parse_layout(Path(layout_path).read_text(encoding="utf-8"))
        violations = verify_artifact(Path(artifact_dir), layout_doc)
    except (LayoutError, PipelineError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    for v in violations:
        click.echo(f"violation [{v.rule}] {v.message}")
    if violations:
        sys.exit(1)
    click.echo("ok")
    sys.exit(0)


if __name__ == "__main__":
    main()
