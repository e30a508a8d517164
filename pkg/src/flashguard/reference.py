"""Whole-array reference implementation of the detection pipeline.

This is the deliberately naive comparison route: it materializes the full
luminance volume, fully sorts every difference frame, and walks the trend
with plain loops. Tests hold the streaming production pipeline to exact
equality with it on trigger counts, harmful stamps and gaps; the `gen`
command uses it to label synthetic videos. Production analysis code never
calls into this module.

Memory is O(frames * pixels); keep inputs at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .flashdetect import AnalysisConfig
from .frameio import VideoStream


@dataclass
class ReferenceCounts:
    num_triggers: int
    rem_frm: list[int]
    ep_frm: list[int]


def luminance_volume(stream: VideoStream) -> np.ndarray:
    """(frames, height, width) luminance volume from stacked RGB frames."""
    stack = np.stack([frame.planes for frame in stream.frames]).astype(np.float64)
    mean = stack.mean(axis=1)
    return 413.435 * (0.002745 * mean + 0.0189623) ** 2.2


def frame_deltas(stream: VideoStream, cfg: AnalysisConfig) -> np.ndarray:
    """Signed per-frame deltas; entry i belongs to frame index i+1."""
    volume = luminance_volume(stream)
    change = volume[1:] - volume[:-1]
    flat = change.reshape(change.shape[0], -1)

    pos = flat.copy()
    pos[pos < 0] = 0
    pos.sort(axis=1)
    pos = np.flip(pos, axis=1)
    neg = -flat.copy()
    neg[neg < 0] = 0
    neg.sort(axis=1)
    neg = np.flip(neg, axis=1)

    scan_bins = math.ceil(flat.shape[1] * cfg.area_fraction)
    pos_avg = pos[:, :scan_bins].mean(axis=1)
    neg_avg = neg[:, :scan_bins].mean(axis=1)
    if cfg.scan_mode == "strict":
        pos_avg[(pos > 0).sum(axis=1) < scan_bins] = 0
        neg_avg[(neg > 0).sum(axis=1) < scan_bins] = 0

    table = pos_avg - neg_avg
    table[table > 0] = pos_avg[table > 0]
    table[table <= 0] = -neg_avg[table <= 0]

    if cfg.dark_gate_enabled:
        frame_means = volume.mean(axis=(1, 2))
        darker = np.minimum(frame_means[:-1], frame_means[1:])
        table[darker >= cfg.dark_gate_limit] = 0
    return table


def run_extremes(table, flush_trailing: bool = False) -> tuple[list[int], list[int | float]]:
    """Close same-sign runs into (fin_frames, fin); zero counts as negative."""

    def sign(x) -> str:
        return "pos" if x > 0 else "neg"

    fin: list = []
    fin_frames: list[int] = []
    cum = table[0]
    fin_frame = 1
    for change in range(len(table) - 1):
        if sign(table[change]) == sign(table[change + 1]):
            cum += table[change + 1]
            fin_frame += 1
        else:
            fin.append(cum)
            fin_frames.append(fin_frame)
            cum = table[change + 1]
            fin_frame = change + 2
    if flush_trailing:
        fin.append(cum)
        fin_frames.append(fin_frame)
    return fin_frames, fin


def harmful_marks(fin_frames, fin, threshold: float = 20.0) -> tuple[list[int], list[int]]:
    ep_frm: list[int] = []
    rem_frm: list[int] = []
    prev = 0
    for x in range(len(fin)):
        if abs(fin[x]) >= threshold:
            frame_inc = fin_frames[x] - prev
            prev = fin_frames[x]
            rem_frm.append(fin_frames[x])
            ep_frm.append(frame_inc)
    return ep_frm, rem_frm


def trigger_count(ep_frm, fps: float) -> int:
    ext = 0
    score = 0
    hits = 0
    for a in range(len(ep_frm)):
        if score < fps:
            score += ep_frm[a]
            hits += 1
        else:
            if hits > 3:
                ext += 1
            score = 0
            hits = 0
    return ext


def reference_counts(stream: VideoStream, cfg: AnalysisConfig = AnalysisConfig()) -> ReferenceCounts:
    """Full pipeline on the naive route (native resolution only)."""
    if cfg.downscale_width is not None:
        raise ValueError("the reference route analyzes at native resolution; downscale first")
    if len(stream.frames) < 2:
        return ReferenceCounts(0, [], [])
    table = frame_deltas(stream, cfg)
    fin_frames, fin = run_extremes(table, flush_trailing=cfg.flush_trailing)
    ep_frm, rem_frm = harmful_marks(fin_frames, fin, cfg.flash_threshold)
    return ReferenceCounts(trigger_count(ep_frm, float(stream.fps)), rem_frm, ep_frm)
