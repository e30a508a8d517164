"""Uncompressed video I/O and analysis-resolution downscaling.

Supported containers are deliberately codec-free so every sample is
bit-exact and testable:

* Y4M (YUV4MPEG2), 4:4:4 planar only, converted to RGB with the BT.601
  full-range matrix.
* PPM sequences: binary P6 files with zero-padded numeric names plus a
  ``meta.json`` sidecar carrying the frame rate.
* Raw RGB24: headerless packed ``width*height*3`` bytes per frame;
  geometry and rate must be supplied out of band.

Compressed formats are out of scope; pipe through an external decoder.
"""

from __future__ import annotations

import io
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import BinaryIO

import numpy as np


class VideoFormatError(ValueError):
    """Base class for malformed or unsupported video input."""


class MalformedHeader(VideoFormatError):
    pass


class UnsupportedColorspace(VideoFormatError):
    pass


class TruncatedFrame(VideoFormatError):
    pass


class BadMagic(VideoFormatError):
    pass


class EmptyDirectory(VideoFormatError):
    pass


class GeometryMismatch(VideoFormatError):
    pass


class UpscaleRequested(VideoFormatError):
    pass


class MissingFrameRate(VideoFormatError):
    pass


@dataclass(frozen=True)
class FrameGeometry:
    """Pixel dimensions of a frame; ``pixel_count`` is the screen area."""

    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"geometry must be at least 1x1, got {self.width}x{self.height}")

    @property
    def pixel_count(self) -> int:
        return self.width * self.height

    def __str__(self) -> str:
        return f"{self.width}x{self.height}"


@dataclass(frozen=True, eq=False)
class RgbFrame:
    """One video picture as three planar channels (R, G, B), row-major.

    Planes are ``(3, height, width)``. uint8 is the normal sample type;
    float64 planes (still ranged 0..255) occur only when downscaling was
    asked to skip quantization for precision studies. Planes are frozen
    read-only on construction so frames can be shared freely.
    """

    geometry: FrameGeometry
    planes: np.ndarray

    def __post_init__(self) -> None:
        if self.planes.dtype not in (np.uint8, np.float64):
            raise ValueError(f"unsupported plane dtype {self.planes.dtype}")
        expected = (3, self.geometry.height, self.geometry.width)
        if self.planes.shape != expected:
            raise ValueError(f"plane shape {self.planes.shape} does not match geometry {expected}")
        self.planes.setflags(write=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RgbFrame):
            return NotImplemented
        return self.geometry == other.geometry and np.array_equal(self.planes, other.planes)

    def sample_bytes(self) -> bytes:
        """Planar R,G,B payload; only defined for uint8 frames."""
        if self.planes.dtype != np.uint8:
            raise ValueError("sample_bytes requires uint8 planes")
        return self.planes.tobytes()


@dataclass(eq=False)
class VideoStream:
    """An ordered frame sequence with shared geometry and a rational rate."""

    geometry: FrameGeometry
    fps: Fraction
    frames: list[RgbFrame] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.fps = Fraction(self.fps)
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        for frame in self.frames:
            if frame.geometry != self.geometry:
                raise GeometryMismatch(
                    f"frame geometry {frame.geometry} differs from stream geometry {self.geometry}"
                )

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def duration_s(self) -> float:
        return len(self.frames) / float(self.fps)

    def sample_equal(self, other: "VideoStream") -> bool:
        return (
            self.geometry == other.geometry
            and self.fps == other.fps
            and len(self.frames) == len(other.frames)
            and all(a == b for a, b in zip(self.frames, other.frames))
        )


# ---------------------------------------------------------------------------
# Y4M (YUV4MPEG2)

_Y4M_SIGNATURE = b"YUV4MPEG2"


def _read_line(stream: BinaryIO, *, what: str) -> bytes | None:
    """Read bytes up to (excluding) the next LF. None on clean EOF at start."""
    chunks = bytearray()
    while True:
        byte = stream.read(1)
        if byte == b"":
            if not chunks:
                return None
            raise MalformedHeader(f"unterminated {what} line")
        if byte == b"\n":
            return bytes(chunks)
        chunks += byte


def _parse_y4m_header(line: bytes) -> tuple[FrameGeometry, Fraction]:
    tokens = line.split(b" ")
    if tokens[0] != _Y4M_SIGNATURE:
        raise MalformedHeader("missing YUV4MPEG2 signature")
    width = height = None
    fps: Fraction | None = None
    colorspace = None
    for token in tokens[1:]:
        if not token:
            continue
        kind, value = token[:1], token[1:]
        if kind == b"W":
            if width is not None:
                raise MalformedHeader("duplicate W token")
            width = _int_token(value, "W")
        elif kind == b"H":
            if height is not None:
                raise MalformedHeader("duplicate H token")
            height = _int_token(value, "H")
        elif kind == b"F":
            if fps is not None:
                raise MalformedHeader("duplicate F token")
            match = re.fullmatch(rb"(\d+):(\d+)", value)
            if not match or int(match.group(2)) == 0:
                raise MalformedHeader(f"bad F token {token!r}")
            fps = Fraction(int(match.group(1)), int(match.group(2)))
        elif kind == b"C":
            colorspace = value
        # I (interlacing), A (aspect) and X (extensions) are ignored.
    if width is None or height is None or fps is None:
        raise MalformedHeader("header must carry W, H and F tokens")
    if colorspace is None:
        raise UnsupportedColorspace("no C token; only C444 input is supported")
    if colorspace != b"444":
        raise UnsupportedColorspace(f"only C444 input is supported, got C{colorspace.decode(errors='replace')}")
    if fps <= 0:
        raise MalformedHeader("frame rate must be positive")
    return FrameGeometry(width, height), fps


def _int_token(value: bytes, name: str) -> int:
    if not re.fullmatch(rb"\d+", value) or int(value) == 0:
        raise MalformedHeader(f"bad {name} token value {value!r}")
    return int(value)


def _ycbcr444_to_rgb(payload: bytes, geometry: FrameGeometry) -> RgbFrame:
    h, w = geometry.height, geometry.width
    raw = np.frombuffer(payload, dtype=np.uint8).reshape(3, h, w).astype(np.float64)
    y = raw[0]
    cb = raw[1] - 128.0
    cr = raw[2] - 128.0
    r = y + 1.402 * cr
    g = y - 0.344136 * cb - 0.714136 * cr
    b = y + 1.772 * cb
    return RgbFrame(geometry, _quantize_u8(np.stack([r, g, b])))


def _rgb_to_ycbcr444(frame: RgbFrame) -> bytes:
    r, g, b = (plane.astype(np.float64) for plane in frame.planes)
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return _quantize_u8(np.stack([y, cb, cr])).tobytes()


def _quantize_u8(values: np.ndarray) -> np.ndarray:
    # Nearest integer, ties away from zero (values are non-negative after clip).
    return np.clip(np.floor(values + 0.5), 0.0, 255.0).astype(np.uint8)


def parse_y4m(source: bytes | BinaryIO) -> VideoStream:
    """Parse an uncompressed YUV4MPEG2 stream (C444 only) into RGB frames.

    Raises MalformedHeader, UnsupportedColorspace or TruncatedFrame on
    malformed input. Frame count equals the number of FRAME markers.
    """
    stream: BinaryIO = io.BytesIO(source) if isinstance(source, (bytes, bytearray)) else source
    header = _read_line(stream, what="header")
    if header is None:
        raise MalformedHeader("empty stream")
    geometry, fps = _parse_y4m_header(header)
    frame_size = 3 * geometry.pixel_count
    frames: list[RgbFrame] = []
    while True:
        marker = _read_line(stream, what="frame marker")
        if marker is None:
            break
        if not marker.startswith(b"FRAME"):
            raise MalformedHeader(f"expected FRAME marker, got {marker[:20]!r}")
        payload = stream.read(frame_size)
        if len(payload) < frame_size:
            raise TruncatedFrame(
                f"frame {len(frames)}: expected {frame_size} payload bytes, got {len(payload)}"
            )
        frames.append(_ycbcr444_to_rgb(payload, geometry))
    return VideoStream(geometry, fps, frames)


def write_y4m(stream: VideoStream, sink: BinaryIO) -> int:
    header = f"YUV4MPEG2 W{stream.geometry.width} H{stream.geometry.height} " \
             f"F{stream.fps.numerator}:{stream.fps.denominator} Ip A1:1 C444\n".encode()
    written = sink.write(header)
    for frame in stream.frames:
        written += sink.write(b"FRAME\n")
        written += sink.write(_rgb_to_ycbcr444(frame))
    return written


# ---------------------------------------------------------------------------
# PPM sequences

_PPM_NAME = re.compile(r"^(\d+)\.ppm$")
_META_NAME = "meta.json"


def _parse_ppm(data: bytes, path: Path) -> tuple[FrameGeometry, np.ndarray]:
    if not data.startswith(b"P6"):
        raise BadMagic(f"{path.name}: not a binary P6 file")
    pos = 2
    fields: list[int] = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and data[pos : pos + 1].isdigit():
            pos += 1
        if start == pos:
            raise MalformedHeader(f"{path.name}: bad P6 header")
        fields.append(int(data[start:pos]))
    width, height, maxval = fields
    if maxval != 255:
        raise VideoFormatError(f"{path.name}: only maxval 255 is supported, got {maxval}")
    pos += 1  # single whitespace byte after maxval
    payload = data[pos : pos + 3 * width * height]
    if len(payload) < 3 * width * height:
        raise TruncatedFrame(f"{path.name}: short pixel payload")
    geometry = FrameGeometry(width, height)
    interleaved = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3)
    return geometry, np.ascontiguousarray(interleaved.transpose(2, 0, 1))


def read_ppm_sequence(directory: str | Path, fps: Fraction | None = None) -> VideoStream:
    """Read a numbered ``*.ppm`` directory into a stream.

    Frames are ordered by their numeric filename index. The rate comes from
    the ``fps`` argument when given, else from the ``meta.json`` sidecar.
    """
    directory = Path(directory)
    entries = []
    for path in directory.iterdir():
        match = _PPM_NAME.match(path.name)
        if match:
            entries.append((int(match.group(1)), path))
    if not entries:
        raise EmptyDirectory(f"no numbered .ppm files in {directory}")
    entries.sort()
    if fps is None:
        meta_path = directory / _META_NAME
        if not meta_path.is_file():
            raise MissingFrameRate(f"no fps given and no {_META_NAME} in {directory}")
        meta = json.loads(meta_path.read_text())
        fps = Fraction(int(meta["fps_num"]), int(meta["fps_den"]))
    geometry: FrameGeometry | None = None
    frames: list[RgbFrame] = []
    for _, path in entries:
        frame_geometry, planes = _parse_ppm(path.read_bytes(), path)
        if geometry is None:
            geometry = frame_geometry
        elif frame_geometry != geometry:
            raise GeometryMismatch(f"{path.name}: {frame_geometry}, expected {geometry}")
        frames.append(RgbFrame(geometry, planes))
    assert geometry is not None
    return VideoStream(geometry, Fraction(fps), frames)


def write_ppm_sequence(stream: VideoStream, directory: str | Path) -> int:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = 0
    for index, frame in enumerate(stream.frames, start=1):
        header = f"P6\n{stream.geometry.width} {stream.geometry.height}\n255\n".encode()
        payload = np.ascontiguousarray(frame.planes.transpose(1, 2, 0)).tobytes()
        (directory / f"{index:06d}.ppm").write_bytes(header + payload)
        written += len(header) + len(payload)
    meta = json.dumps(
        {"fps_num": stream.fps.numerator, "fps_den": stream.fps.denominator}
    ).encode()
    (directory / _META_NAME).write_bytes(meta)
    return written + len(meta)


# ---------------------------------------------------------------------------
# Raw RGB24

def parse_raw_rgb24(source: bytes | BinaryIO, geometry: FrameGeometry, fps: Fraction) -> VideoStream:
    """Read headerless packed RGB24 frames until EOF."""
    stream: BinaryIO = io.BytesIO(source) if isinstance(source, (bytes, bytearray)) else source
    frame_size = 3 * geometry.pixel_count
    frames: list[RgbFrame] = []
    while True:
        payload = stream.read(frame_size)
        if not payload:
            break
        if len(payload) < frame_size:
            raise TruncatedFrame(
                f"frame {len(frames)}: expected {frame_size} bytes, got {len(payload)}"
            )
        interleaved = np.frombuffer(payload, dtype=np.uint8).reshape(geometry.height, geometry.width, 3)
        frames.append(RgbFrame(geometry, np.ascontiguousarray(interleaved.transpose(2, 0, 1))))
    return VideoStream(geometry, Fraction(fps), frames)


# ---------------------------------------------------------------------------
# Dispatch

def write_video(stream: VideoStream, format: str, sink) -> int:
    """Write a non-empty stream; returns bytes written.

    ``format`` is ``y4m`` (sink: binary file object or path) or
    ``ppm_sequence`` (sink: directory path). I/O failures propagate as
    OSError from the underlying sink.
    """
    if not stream.frames:
        raise ValueError("refusing to write an empty stream")
    if format == "y4m":
        if isinstance(sink, (str, Path)):
            with open(sink, "wb") as handle:
                return write_y4m(stream, handle)
        return write_y4m(stream, sink)
    if format == "ppm_sequence":
        return write_ppm_sequence(stream, sink)
    raise ValueError(f"unknown format {format!r}")


# ---------------------------------------------------------------------------
# Downscaling

def _axis_weights(n_in: int, n_out: int) -> np.ndarray:
    """Box-filter weights mapping n_in source samples onto n_out outputs.

    Row o covers the source span [o*s, (o+1)*s) with s = n_in/n_out; every
    row sums to 1, so outputs are convex combinations of the covered span.
    """
    scale = n_in / n_out
    weights = np.zeros((n_out, n_in), dtype=np.float64)
    for o in range(n_out):
        lo = o * scale
        hi = (o + 1) * scale
        first = int(math.floor(lo))
        last = min(int(math.ceil(hi)), n_in)
        for i in range(first, last):
            overlap = min(i + 1.0, hi) - max(float(i), lo)
            if overlap > 0:
                weights[o, i] = overlap / scale
    return weights


def downscale_area(frame: RgbFrame, target: FrameGeometry, *, quantize: bool = True) -> RgbFrame:
    """Area-averaged (box filter) downscale of one frame.

    Each output sample is the area-weighted mean of the source region it
    covers, per channel. With ``quantize`` the mean is rounded to the
    nearest integer, ties away from zero; otherwise float64 planes are kept.
    Upscaling in either dimension raises UpscaleRequested.
    """
    source = frame.geometry
    if target.width > source.width or target.height > source.height:
        raise UpscaleRequested(f"cannot upscale {source} to {target}")
    if target == source:
        return frame
    rows = _axis_weights(source.height, target.height)
    cols = _axis_weights(source.width, target.width)
    planes = frame.planes.astype(np.float64)
    scaled = np.stack([rows @ plane @ cols.T for plane in planes])
    if not quantize:
        return RgbFrame(target, scaled)
    return RgbFrame(target, _quantize_u8(scaled))
