"""End-to-end analysis: stream in, trigger report out.

Frames stream through photometry one at a time, so memory stays at two
luminance frames regardless of video length. The optional downscale to an
analysis resolution happens per frame before photometry.
"""

from __future__ import annotations

import time

from .flashdetect import (
    AnalysisConfig,
    ScanResult,
    TrendExtremes,
    accumulate_trend,
    frame_delta,
    harmful_extremes,
)
from .frameio import FrameGeometry, RgbFrame, VideoStream, downscale_area
from .photometry import LuminanceFrame, lum_diff, luminance_frame
from .reporting import AnalysisReport, build_report, source_digest
from .triggerscore import summarize


def _analysis_frame(frame: RgbFrame, cfg: AnalysisConfig) -> RgbFrame:
    if cfg.downscale_width is None:
        return frame
    target = FrameGeometry(cfg.downscale_width, cfg.downscale_height)
    return downscale_area(frame, target, quantize=cfg.quantize_downscale)


def frame_deltas(stream: VideoStream, cfg: AnalysisConfig) -> list[ScanResult]:
    """Per-frame signed deltas for a stream; N frames yield N-1 results."""
    deltas: list[ScanResult] = []
    prev: LuminanceFrame | None = None
    for index, frame in enumerate(stream.frames):
        lum = luminance_frame(_analysis_frame(frame, cfg), frame_index=index)
        if prev is not None:
            deltas.append(frame_delta(lum_diff(prev, lum), cfg))
        prev = lum
    return deltas


def analyze_stream(
    stream: VideoStream,
    cfg: AnalysisConfig = AnalysisConfig(),
    *,
    digest: str | None = None,
) -> AnalysisReport:
    """Run the full detection pipeline and assemble a report.

    A precomputed ``digest`` skips rehashing the stream (the CLI hashes
    once for the cache lookup). Streams with fewer than two frames carry no
    luminance change and report zero triggers.
    """
    start = time.perf_counter()
    if digest is None:
        digest = source_digest(stream)
    deltas = frame_deltas(stream, cfg)
    if deltas:
        trend = accumulate_trend(deltas, flush_trailing=cfg.flush_trailing)
    else:
        trend = TrendExtremes()
    ep_frm, rem_frm = harmful_extremes(trend, cfg)
    summary = summarize(rem_frm, ep_frm, float(stream.fps))
    marks = [
        (frame, abs(value))
        for value, frame in zip(trend.fin, trend.fin_frames)
        if abs(value) >= cfg.flash_threshold
    ]
    runtime_ms = int(round((time.perf_counter() - start) * 1000))
    return build_report(stream, cfg, summary, marks, runtime_ms, digest=digest)
