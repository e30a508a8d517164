"""RGB to luminance conversion and per-pixel frame differencing.

The display model maps the average RGB channel value of a pixel to screen
luminance in cd/m2:

    luminance = 413.435 * (0.002745 * mean + 0.0189623) ** 2.2

All math is float64. For uint8 frames the channel sum takes one of 766
integer values, so a lookup table indexed by R+G+B is the fast path; it is
bit-identical to direct evaluation because the division and power see the
same operands either way.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .frameio import FrameGeometry, GeometryMismatch, RgbFrame

LUMINANCE_SCALE = 413.435
LUMINANCE_GAIN = 0.002745
LUMINANCE_BIAS = 0.0189623
LUMINANCE_EXPONENT = 2.2


@dataclass(frozen=True, eq=False)
class LuminanceFrame:
    """Per-pixel luminance (cd/m2) of one frame, row-major float64."""

    geometry: FrameGeometry
    values: np.ndarray
    frame_index: int
    mean_cd_m2: float

    def __post_init__(self) -> None:
        expected = (self.geometry.height, self.geometry.width)
        if self.values.shape != expected:
            raise ValueError(f"value shape {self.values.shape} does not match geometry {expected}")


@dataclass(frozen=True, eq=False)
class DiffFrame:
    """Signed per-pixel luminance change from the preceding frame.

    ``frame_index`` is the index of the later frame (>= 1).
    ``darker_mean_cd_m2`` is the mean luminance of the darker of the two
    source frames, carried for the optional dark-scene gate.
    """

    geometry: FrameGeometry
    values: np.ndarray
    frame_index: int
    darker_mean_cd_m2: float | None = None

    def __post_init__(self) -> None:
        expected = (self.geometry.height, self.geometry.width)
        if self.values.shape != expected:
            raise ValueError(f"value shape {self.values.shape} does not match geometry {expected}")
        if self.frame_index < 1:
            raise ValueError("frame_index of a difference frame starts at 1")


@lru_cache(maxsize=1)
def luminance_lut() -> np.ndarray:
    """766-entry table of luminance by integer channel sum (0..765)."""
    sums = np.arange(766, dtype=np.float64)
    table = luminance_of_mean(sums / 3.0)
    table.setflags(write=False)
    return table


def luminance_of_mean(mean):
    """Direct evaluation of the display model for a channel mean in 0..255."""
    return LUMINANCE_SCALE * (LUMINANCE_GAIN * np.asarray(mean, dtype=np.float64) + LUMINANCE_BIAS) ** LUMINANCE_EXPONENT


def luminance_frame(frame: RgbFrame, *, frame_index: int = 0) -> LuminanceFrame:
    """Convert one RGB frame to per-pixel luminance.

    uint8 planes go through the channel-sum lookup table; float planes
    (unquantized downscales) are evaluated directly.
    """
    planes = frame.planes
    if planes.dtype == np.uint8:
        sums = planes[0].astype(np.uint16) + planes[1] + planes[2]
        values = luminance_lut()[sums]
    else:
        values = luminance_of_mean(planes.mean(axis=0))
    return LuminanceFrame(frame.geometry, values, frame_index, float(values.mean()))


def lum_diff(prev: LuminanceFrame, cur: LuminanceFrame) -> DiffFrame:
    """Pixelwise luminance change ``cur - prev`` for consecutive frames."""
    if prev.geometry != cur.geometry:
        raise GeometryMismatch(f"cannot diff {prev.geometry} against {cur.geometry}")
    if cur.frame_index != prev.frame_index + 1:
        raise ValueError(
            f"frames are not consecutive: {prev.frame_index} then {cur.frame_index}"
        )
    return DiffFrame(
        cur.geometry,
        cur.values - prev.values,
        cur.frame_index,
        min(prev.mean_cd_m2, cur.mean_cd_m2),
    )
