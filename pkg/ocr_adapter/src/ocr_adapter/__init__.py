"""OCR adapter: engine wrapper emitting canonical layout files."""

from .adapter import AdapterError, classify_text, extract_layout
from .engine import DoctrEngine, EngineError, EngineRun, TemplateEngine, default_engine

__all__ = [
    "AdapterError",
    "DoctrEngine",
    "EngineError",
    "EngineRun",
    "TemplateEngine",
    "classify_text",
    "default_engine",
    "extract_layout",
]

__version__ = "0.1.0"
