"""flashguard: photosensitive-epilepsy flash trigger detection and removal.

Detects potentially harmful flashing in uncompressed video against the
broadcast guideline thresholds (opposing luminance changes of 20 cd/m2
over at least 25% of the screen, faster than 3 Hz), reports triggers with
timestamps as stable JSON, and emits a sanitized cut of the video.
"""

__version__ = "0.1.0"

from .flashdetect import (
    AnalysisConfig,
    ScanResult,
    TrendExtremes,
    accumulate_trend,
    frame_delta,
    harmful_extremes,
    min_flash_pixels,
    scan_sets,
)
from .frameio import (
    FrameGeometry,
    RgbFrame,
    VideoFormatError,
    VideoStream,
    downscale_area,
    parse_raw_rgb24,
    parse_y4m,
    read_ppm_sequence,
    write_video,
)
from .photometry import (
    DiffFrame,
    LuminanceFrame,
    lum_diff,
    luminance_frame,
    luminance_lut,
    luminance_of_mean,
)
from .pipeline import analyze_stream, frame_deltas
from .reporting import (
    AnalysisReport,
    ExtremeMark,
    cache_lookup,
    cache_store,
    default_cache_dir,
    from_json,
    source_digest,
    to_json,
)
from .sanitizer import (
    CutPlan,
    IntervalOutOfRange,
    SanitizeConfig,
    SanitizeResult,
    apply_cuts,
    group_intervals,
    plan_cuts,
    removal_windows,
    sanitize_iterative,
)
from .synthgen import StrobeSpec, expected_triggers, gen_strobe
from .triggerscore import TriggerSummary, possible_triggers, summarize

__all__ = [
    "AnalysisConfig",
    "AnalysisReport",
    "CutPlan",
    "DiffFrame",
    "ExtremeMark",
    "FrameGeometry",
    "IntervalOutOfRange",
    "LuminanceFrame",
    "RgbFrame",
    "SanitizeConfig",
    "SanitizeResult",
    "ScanResult",
    "StrobeSpec",
    "TrendExtremes",
    "TriggerSummary",
    "VideoFormatError",
    "VideoStream",
    "accumulate_trend",
    "analyze_stream",
    "apply_cuts",
    "cache_lookup",
    "cache_store",
    "default_cache_dir",
    "downscale_area",
    "expected_triggers",
    "frame_delta",
    "frame_deltas",
    "from_json",
    "gen_strobe",
    "group_intervals",
    "harmful_extremes",
    "lum_diff",
    "luminance_frame",
    "luminance_lut",
    "luminance_of_mean",
    "min_flash_pixels",
    "parse_raw_rgb24",
    "parse_y4m",
    "plan_cuts",
    "possible_triggers",
    "read_ppm_sequence",
    "removal_windows",
    "sanitize_iterative",
    "scan_sets",
    "source_digest",
    "summarize",
    "to_json",
    "write_video",
]
