"""Removal-window planning, cut application, and iterative sanitization.

Harmful frame stamps expand into fixed-length removal windows (default
five seconds of frames each), overlapping windows merge, and the listed
frames are dropped by position. Cutting can itself splice new luminance
jumps together, so sanitization re-analyzes and re-cuts until the stream
is clean or the iteration budget runs out.

Cuts operate on frame indices; times appear only in the exported plan so
an external tool can cut the matching audio from the original timeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import count, groupby
from typing import Sequence

from .flashdetect import AnalysisConfig
from .frameio import VideoStream
from .pipeline import analyze_stream
from .reporting import AnalysisReport, _Real, encode_document


class IntervalOutOfRange(ValueError):
    """A cut plan references frames or times beyond the stream."""


@dataclass(frozen=True)
class SanitizeConfig:
    """level_seconds sizes each removal window; max_iterations caps passes."""

    level_seconds: float = 5.0
    max_iterations: int = 3

    def __post_init__(self) -> None:
        if self.level_seconds <= 0:
            raise ValueError(f"level_seconds must be positive, got {self.level_seconds}")
        if not 1 <= self.max_iterations <= 5:
            raise ValueError(f"max_iterations must be between 1 and 5, got {self.max_iterations}")


@dataclass
class CutPlan:
    """Frames to drop plus the same cuts as [start, end] second pairs."""

    removal_frames: list[int] = field(default_factory=list)
    intervals_s: list[tuple[float, float]] = field(default_factory=list)

    def to_json(self) -> bytes:
        document = {
            "removal_frames": list(self.removal_frames),
            "intervals_s": [[_Real(t1), _Real(t2)] for t1, t2 in self.intervals_s],
        }
        return encode_document(document)


@dataclass
class SanitizeResult:
    """Final stream, per-iteration reports, and the composed original-timeline plan."""

    stream: VideoStream
    reports: list[AnalysisReport]
    cut_plan: CutPlan


def removal_windows(rem_frm: Sequence[int], fps: float, cfg: SanitizeConfig) -> list[int]:
    """Expand harmful stamps into merged removal windows of frame indices.

    Each stamp past the covered region opens a window of
    floor(fps * level_seconds) frames; stamps already inside a window add
    nothing. Output is sorted and duplicate-free.
    """
    if list(rem_frm) != sorted(rem_frm):
        raise ValueError("rem_frm must be sorted ascending")
    window = int(fps * cfg.level_seconds)
    frames: list[int] = []
    covered_end = -1
    for stamp in rem_frm:
        if stamp > covered_end:
            frames.extend(range(stamp, stamp + window))
            covered_end = stamp + window - 1
    return frames


def group_intervals(frames: Sequence[int], fps: float) -> list[tuple[float, float]]:
    """Collapse consecutive frame runs into [first/fps, last/fps] pairs."""
    if fps <= 0:
        raise ValueError(f"fps must be positive, got {fps}")
    out: list[tuple[float, float]] = []
    counter = count()
    for _, group in groupby(frames, key=lambda frame: frame - next(counter)):
        block = list(group)
        out.append((block[0] / fps, block[-1] / fps))
    return out


def plan_cuts(
    rem_frm: Sequence[int], fps: float, cfg: SanitizeConfig, frame_count: int
) -> CutPlan:
    """Removal windows clamped to the stream, as a ready-to-apply plan."""
    frames = [f for f in removal_windows(rem_frm, fps, cfg) if f < frame_count]
    return CutPlan(frames, group_intervals(frames, fps))


def apply_cuts(stream: VideoStream, plan: CutPlan) -> VideoStream:
    """Drop the planned frame positions; order and rate are preserved."""
    total = len(stream.frames)
    removal = set(plan.removal_frames)
    if removal and (min(removal) < 0 or max(removal) >= total):
        raise IntervalOutOfRange(
            f"plan frames {min(removal)}..{max(removal)} exceed stream of {total} frames"
        )
    duration = stream.duration_s
    for t1, t2 in plan.intervals_s:
        if t1 < 0 or t2 > duration:
            raise IntervalOutOfRange(f"interval [{t1}, {t2}] outside 0..{duration:.6f}s")
    kept = [frame for index, frame in enumerate(stream.frames) if index not in removal]
    return VideoStream(stream.geometry, stream.fps, kept)


def sanitize_iterative(
    stream: VideoStream,
    acfg: AnalysisConfig = AnalysisConfig(),
    scfg: SanitizeConfig = SanitizeConfig(),
) -> SanitizeResult:
    """Analyze-and-cut until clean or out of iterations.

    Every pass appends its report; a pass reporting zero triggers stops the
    loop. Trigger counts are not guaranteed monotone between passes (cut
    boundaries can splice new flashes; that is why iteration exists). The
    returned cut plan lists removed frames in original-stream indices.
    """
    current = stream
    kept = list(range(len(stream.frames)))
    removed: list[int] = []
    reports: list[AnalysisReport] = []
    for _ in range(scfg.max_iterations):
        report = analyze_stream(current, acfg)
        reports.append(report)
        if report.num_triggers == 0:
            break
        plan = plan_cuts(report.harmful_frames, float(current.fps), scfg, len(current.frames))
        dropped = set(plan.removal_frames)
        removed.extend(kept[i] for i in plan.removal_frames)
        kept = [original for position, original in enumerate(kept) if position not in dropped]
        current = apply_cuts(current, plan)
    removed.sort()
    composed = CutPlan(removed, group_intervals(removed, float(stream.fps)))
    return SanitizeResult(stream=current, reports=reports, cut_plan=composed)
