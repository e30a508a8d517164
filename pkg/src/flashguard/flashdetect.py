"""Flash detection: frame deltas, trend accumulation, harmful extremes.

Broadcast flash guidance (Ofcom, adopted by ITU-R) defines a potentially
harmful flash as a pair of opposing luminance changes of at least
20 cd/m2 covering at least a quarter of the screen. This module reduces
each per-pixel difference frame to one signed delta via an
area-thresholded scan of the largest changes, accumulates same-sign runs
of those deltas into local extremes, and marks extremes whose magnitude
reaches the flash threshold.

Two scan modes exist and genuinely differ:

* ``reference`` pads the positive/negative scan sets with zeros for
  non-qualifying pixels and always averages the top quarter, so a flash
  covering less than the area fraction is diluted but not discarded.
* ``strict`` zeroes an average outright when fewer pixels than the area
  minimum actually changed in that direction.

Sequencing quirks are load-bearing for cross-implementation parity and
must not be "fixed" silently: zero deltas classify as negative, and the
run still open at end of stream is dropped unless ``flush_trailing``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .photometry import DiffFrame

SCAN_MODES = ("reference", "strict")


@dataclass(frozen=True)
class AnalysisConfig:
    """Tunable constants for one analysis pass.

    area_fraction is the minimum share of the screen a flash must cover;
    flash_threshold is the harmful luminance change in cd/m2. The dark
    gate suppresses deltas when the darker frame of the pair averages at
    or above dark_gate_limit; it is off by default because the canonical
    pipeline omits it. downscale_width/height, when set, resize frames
    before photometry; quantize_downscale keeps the resize 8-bit.
    flush_trailing emits the final open run instead of dropping it.
    """

    area_fraction: float = 0.25
    flash_threshold: float = 20.0
    scan_mode: str = "reference"
    dark_gate_enabled: bool = False
    dark_gate_limit: float = 160.0
    flush_trailing: bool = False
    downscale_width: int | None = None
    downscale_height: int | None = None
    quantize_downscale: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.area_fraction <= 1.0:
            raise ValueError(f"area_fraction must be in (0, 1], got {self.area_fraction}")
        if self.flash_threshold <= 0:
            raise ValueError(f"flash_threshold must be positive, got {self.flash_threshold}")
        if self.scan_mode not in SCAN_MODES:
            raise ValueError(f"scan_mode must be one of {SCAN_MODES}, got {self.scan_mode!r}")
        if self.dark_gate_limit <= 0:
            raise ValueError(f"dark_gate_limit must be positive, got {self.dark_gate_limit}")
        if (self.downscale_width is None) != (self.downscale_height is None):
            raise ValueError("downscale_width and downscale_height must be set together")
        if self.downscale_width is not None and (self.downscale_width < 1 or self.downscale_height < 1):
            raise ValueError("downscale target must be at least 1x1")


@dataclass(frozen=True)
class ScanResult:
    """Outcome of scanning one difference frame.

    pos_avg/neg_avg are the averaged magnitudes of the scanned positive and
    negative change sets; delta is pos_avg when it wins, else -neg_avg
    (ties go negative). scanned_count_pos/neg count the bins scanned.
    """

    frame_index: int
    pos_avg: float
    neg_avg: float
    scanned_count_pos: int
    scanned_count_neg: int
    delta: float


@dataclass
class TrendExtremes:
    """Local extremes of the accumulated delta trend.

    fin holds the summed delta of each closed same-sign run; fin_frames
    holds the 1-based index of the run's final delta. Consecutive entries
    alternate in sign by construction.
    """

    fin: list[float] = field(default_factory=list)
    fin_frames: list[int] = field(default_factory=list)


def min_flash_pixels(pixel_count: int, area_fraction: float) -> int:
    """Minimum number of changed pixels for a flash: ceil(area * fraction)."""
    return math.ceil(pixel_count * area_fraction)


def scan_sets(diff: DiffFrame) -> tuple[np.ndarray, np.ndarray]:
    """Positive and negated-negative change sets, each sorted descending.

    Pixels that did not change in the respective direction contribute
    zeros, so both sets always have one entry per pixel.
    """
    values = diff.values.ravel()
    pos = np.where(values > 0.0, values, 0.0)
    neg = np.where(values < 0.0, -values, 0.0)
    pos[::-1].sort()
    neg[::-1].sort()
    return pos, neg


def _top_mean(magnitudes: np.ndarray, scan_bins: int) -> float:
    """Mean of the scan_bins largest entries, summed in descending order.

    Descending order matters: it keeps the pairwise summation identical to
    a full sort-and-slice of the same set, so results are bit-reproducible
    across both routes.
    """
    cut = magnitudes.size - scan_bins
    top = np.partition(magnitudes, cut)[cut:] if cut > 0 else magnitudes.copy()
    top[::-1].sort()
    return float(top.mean())


def frame_delta(diff: DiffFrame, cfg: AnalysisConfig) -> ScanResult:
    """Reduce one difference frame to a signed per-frame delta."""
    values = diff.values.ravel()
    scan_bins = min_flash_pixels(values.size, cfg.area_fraction)
    pos = np.where(values > 0.0, values, 0.0)
    neg = np.where(values < 0.0, -values, 0.0)
    qualifying_pos = int(np.count_nonzero(pos))
    qualifying_neg = int(np.count_nonzero(neg))
    pos_avg = _top_mean(pos, scan_bins)
    neg_avg = _top_mean(neg, scan_bins)
    if cfg.scan_mode == "strict":
        if qualifying_pos < scan_bins:
            pos_avg = 0.0
        if qualifying_neg < scan_bins:
            neg_avg = 0.0
        scanned_pos = min(scan_bins, qualifying_pos)
        scanned_neg = min(scan_bins, qualifying_neg)
    else:
        scanned_pos = scanned_neg = scan_bins
    delta = pos_avg if pos_avg > neg_avg else -neg_avg
    delta += 0.0  # normalize -0.0
    if cfg.dark_gate_enabled:
        if diff.darker_mean_cd_m2 is None:
            raise ValueError("dark gate enabled but the difference frame carries no darker-frame mean")
        if diff.darker_mean_cd_m2 >= cfg.dark_gate_limit:
            delta = 0.0
    return ScanResult(diff.frame_index, pos_avg, neg_avg, scanned_pos, scanned_neg, delta)


def _is_positive(value: float) -> bool:
    # Zero classifies as negative; run boundaries depend on this.
    return value > 0


def accumulate_trend(
    deltas: Sequence[ScanResult] | Sequence[float] | Iterable,
    *,
    flush_trailing: bool = False,
) -> TrendExtremes:
    """Accumulate same-sign runs of frame deltas into local extremes.

    Accepts ScanResults or bare delta values, ordered by frame index
    starting at 1. Each sign flip closes the open run: its summed delta and
    the 1-based index of its last element are appended, and accumulation
    restarts from the flipping delta. The run still open at the end of the
    sequence is dropped unless flush_trailing is set.
    """
    values = [float(getattr(d, "delta", d)) for d in deltas]
    if not values:
        raise ValueError("at least one frame delta is required")
    extremes = TrendExtremes()
    cum = values[0]
    run_end = 1
    for i in range(len(values) - 1):
        if _is_positive(values[i]) == _is_positive(values[i + 1]):
            cum += values[i + 1]
            run_end += 1
        else:
            extremes.fin.append(cum)
            extremes.fin_frames.append(run_end)
            cum = values[i + 1]
            run_end = i + 2
    if flush_trailing:
        extremes.fin.append(cum)
        extremes.fin_frames.append(run_end)
    return extremes


def harmful_extremes(trend: TrendExtremes, cfg: AnalysisConfig) -> tuple[list[int], list[int]]:
    """Mark extremes at or above the flash threshold.

    Returns (ep_frm, rem_frm): rem_frm carries the frame stamps of harmful
    extremes, ep_frm the gap from the previous harmful stamp (prefix sums
    of ep_frm reproduce rem_frm).
    """
    ep_frm: list[int] = []
    rem_frm: list[int] = []
    prev = 0
    for value, frame in zip(trend.fin, trend.fin_frames):
        if abs(value) >= cfg.flash_threshold:
            ep_frm.append(frame - prev)
            rem_frm.append(frame)
            prev = frame
    return ep_frm, rem_frm
