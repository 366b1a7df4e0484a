from pathlib import Path

import pytest

import invoicesynth


@pytest.fixture(scope="session")
def sample_image_path():
    return Path(invoicesynth.__file__).parent / "assets" / "sample" / "seed_invoice.png"


@pytest.fixture(scope="session")
def bundled_font_path():
    return Path(__file__).resolve().parent.parent / "src" / "ocr_adapter" / "assets" / "DejaVuSans.ttf"
