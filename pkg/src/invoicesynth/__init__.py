"""Layout-preserving synthetic invoice generation.

Pipeline: parse an OCR-derived layout file, pick replacement targets,
generate class-preserving synthetic text (remote endpoint or seeded
mock), erase the originals by fast-marching inpainting, render the
replacements centered in the original boxes, and emit the image paired
with matching structured ground truth.
"""

from .fonts import FontSpec, measure_text
from .generation import GeneratorConfig, ReplacementMap, generate, mock_generate
from .inpaint import InpaintParams, inpaint
from .layout import (
    BBox,
    ContentClass,
    LayoutDocument,
    TextFragment,
    parse_layout,
    serialize_layout,
    validate_layout,
)
from .pipeline import (
    GenerationArtifact,
    PipelineConfig,
    run_batch,
    run_single,
    verify_artifact,
)
from .planner import ReplacementPlan, SelectionRule, classify_fragment, select_targets
from .raster import build_mask, load_image, save_image
from .render import estimate_text_color, fit_font_size, render_fragment

__version__ = "0.1.0"
