"""Trigger counting from harmful-extreme spacing.

A trigger is a roughly one-second window containing more than 3 harmful
flashes (the >3 Hz guideline rate). The window walk is intentionally
preserved exactly: the closing comparison consumes the current gap
without adding it, and the final partial window is never flushed, so a
video ending mid-strobe can undercount by at most one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence


@dataclass
class TriggerSummary:
    """Trigger count plus the harmful frame stamps and their timestamps."""

    num_triggers: int
    harmful_frames: list[int] = field(default_factory=list)
    timestamps_s: list[float] = field(default_factory=list)


def possible_triggers(ep_frm: Sequence[int], fps: float) -> int:
    """Count >3 Hz flash windows from gaps between harmful extremes.

    Walk the gaps with a running (score, hits) pair: while score < fps the
    gap is added and counts as a hit; once score reaches fps the window
    closes, scoring one trigger iff it held more than 3 hits, and the walk
    restarts from zero.
    """
    if fps <= 0:
        raise ValueError(f"fps must be positive, got {fps}")
    triggers = 0
    score = 0.0
    hits = 0
    for gap in ep_frm:
        if score < fps:
            score += gap
            hits += 1
        else:
            if hits > 3:
                triggers += 1
            score = 0.0
            hits = 0
    return triggers


def summarize(rem_frm: Sequence[int], ep_frm: Sequence[int], fps: float) -> TriggerSummary:
    """Build the human-facing summary; timestamps keep full precision."""
    if len(rem_frm) != len(ep_frm):
        raise ValueError(
            f"rem_frm and ep_frm length mismatch: {len(rem_frm)} vs {len(ep_frm)}"
        )
    if fps <= 0:
        raise ValueError(f"fps must be positive, got {fps}")
    return TriggerSummary(
        num_triggers=possible_triggers(ep_frm, fps),
        harmful_frames=list(rem_frm),
        timestamps_s=[frame / fps for frame in rem_frm],
    )
