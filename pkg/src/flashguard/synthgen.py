"""Synthetic strobe videos with analytically known flash structure.

Generated streams make every detection claim checkable at desk scale: the
flashing rectangle's area, period and gray levels are exact, and
``expected_triggers`` labels a spec with the trigger count computed by the
independent reference route (never by the production pipeline).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .flashdetect import AnalysisConfig
from .frameio import FrameGeometry, RgbFrame, VideoStream
from .reference import reference_counts


@dataclass(frozen=True)
class StrobeSpec:
    """A periodic rectangular strobe.

    Frame k shows the flashing region at high_gray when floor(k / period)
    is odd, else low_gray; outside the region the frame is constant
    low_gray. The region covers exactly floor(region_fraction * pixels)
    pixels, laid out as full rows from the top plus a partial row.
    """

    geometry: FrameGeometry
    fps: Fraction
    duration_frames: int
    period_frames: int = 1
    low_gray: int = 0
    high_gray: int = 255
    region_fraction: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "fps", Fraction(self.fps))
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        if self.duration_frames < 2:
            raise ValueError(f"duration_frames must be at least 2, got {self.duration_frames}")
        if self.period_frames < 1:
            raise ValueError(f"period_frames must be at least 1, got {self.period_frames}")
        if not 0 <= self.low_gray < self.high_gray <= 255:
            raise ValueError(
                f"need 0 <= low_gray < high_gray <= 255, got {self.low_gray}/{self.high_gray}"
            )
        if not 0.0 < self.region_fraction <= 1.0:
            raise ValueError(f"region_fraction must be in (0, 1], got {self.region_fraction}")

    @property
    def region_pixels(self) -> int:
        return int(math.floor(self.region_fraction * self.geometry.pixel_count))


def gen_strobe(spec: StrobeSpec) -> VideoStream:
    """Generate the strobe stream; the two frame variants are shared."""
    height, width = spec.geometry.height, spec.geometry.width
    quiet = np.full((3, height, width), spec.low_gray, dtype=np.uint8)
    flashing = quiet.copy()
    pixels = spec.region_pixels
    full_rows, partial = divmod(pixels, width)
    flashing[:, :full_rows, :] = spec.high_gray
    if partial and full_rows < height:
        flashing[:, full_rows, :partial] = spec.high_gray
    quiet_frame = RgbFrame(spec.geometry, quiet)
    flash_frame = RgbFrame(spec.geometry, flashing)
    frames = [
        flash_frame if (k // spec.period_frames) % 2 == 1 else quiet_frame
        for k in range(spec.duration_frames)
    ]
    return VideoStream(spec.geometry, spec.fps, frames)


def expected_triggers(spec: StrobeSpec, cfg: AnalysisConfig = AnalysisConfig()) -> int:
    """Trigger count of the generated strobe per the reference route."""
    return reference_counts(gen_strobe(spec), cfg).num_triggers
