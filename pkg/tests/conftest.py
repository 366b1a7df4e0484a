import json
from pathlib import Path

import pytest

from invoicesynth.fonts import FontSpec, default_font_path
from invoicesynth.layout import parse_layout

SAMPLE_DIR = Path(__file__).resolve().parent.parent / "src" / "invoicesynth" / "assets" / "sample"
RESOURCE_DIR = Path(__file__).resolve().parent / "resources"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def sample_image_path():
    return SAMPLE_DIR / "seed_invoice.png"


@pytest.fixture(scope="session")
def sample_layout_path():
    return SAMPLE_DIR / "seed_invoice.layout.json"


@pytest.fixture(scope="session")
def sample_layout_text(sample_layout_path):
    return sample_layout_path.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def sample_doc(sample_layout_text):
    return parse_layout(sample_layout_text)


@pytest.fixture(scope="session")
def fixture_font():
    return FontSpec(RESOURCE_DIR / "fixture_metrics.ttf")


@pytest.fixture(scope="session")
def real_font():
    return FontSpec(default_font_path())


@pytest.fixture
def make_config(tmp_path, sample_image_path, sample_layout_path):
    """Write a pipeline config file pointing at the bundled sample."""

    def _make(**overrides):
        payload = {
            "input_image": str(sample_image_path),
            "input_layout": str(sample_layout_path),
            "output_dir": str(tmp_path / "out"),
            "variants": 1,
            "base_seed": 42,
            "generator": {"mode": "mock"},
        }
        payload.update(overrides)
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        return config_path

    return _make
