"""Shared builders for frames, streams, and the randomized corpus."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from flashguard import FrameGeometry, RgbFrame, StrobeSpec, VideoStream, gen_strobe
from flashguard.photometry import DiffFrame

GEOMETRY_SMALL = FrameGeometry(8, 6)
GEOMETRY_CORPUS = FrameGeometry(64, 48)


def gray_frame(geometry: FrameGeometry, value: int) -> RgbFrame:
    return RgbFrame(geometry, np.full((3, geometry.height, geometry.width), value, dtype=np.uint8))


def gray_stream(values, geometry: FrameGeometry = GEOMETRY_SMALL, fps=30) -> VideoStream:
    """One constant-gray frame per value."""
    return VideoStream(geometry, Fraction(fps), [gray_frame(geometry, v) for v in values])


def frame_from_gray_pixels(pixels: np.ndarray) -> RgbFrame:
    """R=G=B frame from a (height, width) uint8 array."""
    geometry = FrameGeometry(pixels.shape[1], pixels.shape[0])
    return RgbFrame(geometry, np.ascontiguousarray(np.broadcast_to(pixels, (3, *pixels.shape)).copy()))


def diff_frame(values, frame_index: int = 1, darker_mean: float | None = None) -> DiffFrame:
    array = np.asarray(values, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(1, -1)
    geometry = FrameGeometry(array.shape[1], array.shape[0])
    return DiffFrame(geometry, array, frame_index, darker_mean)


def random_gray_noise_stream(rng: np.random.Generator, frames: int,
                             geometry: FrameGeometry = GEOMETRY_CORPUS, fps=30) -> VideoStream:
    """Per-pixel gray noise; rich scan-set distributions, lossless in Y4M."""
    out = []
    for _ in range(frames):
        out.append(frame_from_gray_pixels(rng.integers(0, 256, (geometry.height, geometry.width), dtype=np.uint8)))
    return VideoStream(geometry, Fraction(fps), out)


def random_strobe_spec(rng: np.random.Generator, geometry: FrameGeometry = GEOMETRY_CORPUS) -> StrobeSpec:
    low = int(rng.integers(0, 128))
    high = int(rng.integers(low + 32, 256))
    return StrobeSpec(
        geometry=geometry,
        fps=Fraction(int(rng.choice([24, 25, 30, 50, 60]))),
        duration_frames=int(rng.integers(30, 301)),
        period_frames=int(rng.integers(1, 21)),
        low_gray=low,
        high_gray=high,
        region_fraction=float(rng.uniform(0.05, 1.0)),
    )


def random_mixed_stream(rng: np.random.Generator, frames: int,
                        geometry: FrameGeometry = GEOMETRY_CORPUS, fps=30) -> VideoStream:
    """Gray noise background with a periodically flashing rectangle on top."""
    period = int(rng.integers(1, 16))
    high = int(rng.integers(160, 256))
    rows = int(rng.integers(1, geometry.height + 1))
    out = []
    for k in range(frames):
        pixels = rng.integers(0, 120, (geometry.height, geometry.width), dtype=np.uint8)
        if (k // period) % 2 == 1:
            pixels[:rows, :] = high
        out.append(frame_from_gray_pixels(pixels))
    return VideoStream(geometry, Fraction(fps), out)


def build_corpus(seed: int, count: int) -> list[VideoStream]:
    """Randomized desk-scale corpus: strobes, gray noise, and mixtures."""
    rng = np.random.default_rng(seed)
    corpus: list[VideoStream] = []
    for index in range(count):
        kind = index % 3
        if kind == 0:
            corpus.append(gen_strobe(random_strobe_spec(rng)))
        elif kind == 1:
            corpus.append(random_gray_noise_stream(rng, int(rng.integers(30, 301))))
        else:
            corpus.append(random_mixed_stream(rng, int(rng.integers(30, 301))))
    return corpus


@pytest.fixture(scope="session")
def corpus() -> list[VideoStream]:
    return build_corpus(seed=20240811, count=50)
