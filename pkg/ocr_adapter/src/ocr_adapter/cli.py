"""Command-line entry point. Exit codes: 0 success, 2 input/engine error."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .adapter import AdapterError, extract_layout
from .engine import GRANULARITIES, EngineError, TemplateEngine, default_engine


@click.group()
def main():
    """OCR wrapper emitting canonical layout files."""


@main.command()
@click.option("--image", "image_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--min-confidence", type=float, default=0.3, show_default=True)
@click.option(
    "--granularity", type=click.Choice(GRANULARITIES), default="line", show_default=True
)
@click.option(
    "--engine", "engine_name", type=click.Choice(["auto", "template"]), default="auto",
    show_default=True, help="auto prefers doctr when installed.",
)
def extract(image_path, out_path, min_confidence, granularity, engine_name):
    """Extract a canonical layout file from a page image."""
    try:
        engine = TemplateEngine() if engine_name == "template" else default_engine()
        text = extract_layout(
            image_path, min_confidence=min_confidence, granularity=granularity, engine=engine
        )
        Path(out_path).write_text(text, encoding="utf-8")
    except (AdapterError, EngineError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
