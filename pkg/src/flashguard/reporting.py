"""Stable JSON analysis reports and a content-addressed result cache.

Reports serialize with a fixed key order and all reals printed with six
decimal places, so identical analyses produce byte-identical documents.
Real-valued report fields are quantized to six decimals when the report is
built, which makes ``from_json(to_json(r)) == r`` exact.

The cache is a flat directory of ``<digest>.json`` files keyed by a
SHA-256 over the raw frame bytes, geometry and frame rate. A lookup only
hits when the stored config echo matches the requested config; unreadable
entries count as misses and log a warning.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .flashdetect import AnalysisConfig
from .frameio import FrameGeometry, VideoStream
from .triggerscore import TriggerSummary

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CACHE_DIR_ENV = "FLIKCER_CACHE_DIR"


class _Real:
    """Marker for JSON numbers rendered with fixed six-decimal precision."""

    __slots__ = ("value",)

    def __init__(self, value: float) -> None:
        self.value = float(value)


def quantize_real(value: float) -> float:
    """Round to the six decimals the report format carries."""
    return round(float(value), 6)


@dataclass(frozen=True)
class ExtremeMark:
    """One harmful extreme: frame stamp and luminance-change magnitude."""

    frame: int
    magnitude_cd_m2: float


@dataclass(frozen=True)
class AnalysisReport:
    schema_version: int
    source_digest: str
    geometry: FrameGeometry
    fps_num: int
    fps_den: int
    frame_count: int
    config: AnalysisConfig
    num_triggers: int
    harmful_frames: tuple[int, ...]
    timestamps_s: tuple[float, ...]
    extremes: tuple[ExtremeMark, ...]
    runtime_ms: int

    def __post_init__(self) -> None:
        if len(self.harmful_frames) != len(self.timestamps_s):
            raise ValueError("harmful_frames and timestamps_s must have equal length")


def source_digest(stream: VideoStream) -> str:
    """SHA-256 hex digest of raw frame bytes plus geometry and rate."""
    digest = hashlib.sha256()
    digest.update(
        f"{stream.geometry.width}x{stream.geometry.height}"
        f"@{stream.fps.numerator}/{stream.fps.denominator}\n".encode()
    )
    for frame in stream.frames:
        digest.update(frame.sample_bytes())
    return digest.hexdigest()


def build_report(
    stream: VideoStream,
    config: AnalysisConfig,
    summary: TriggerSummary,
    extremes: list[tuple[int, float]],
    runtime_ms: int,
    digest: str | None = None,
) -> AnalysisReport:
    """Assemble the report for one analysis pass, quantizing reals."""
    return AnalysisReport(
        schema_version=SCHEMA_VERSION,
        source_digest=digest if digest is not None else source_digest(stream),
        geometry=stream.geometry,
        fps_num=stream.fps.numerator,
        fps_den=stream.fps.denominator,
        frame_count=len(stream.frames),
        config=config,
        num_triggers=summary.num_triggers,
        harmful_frames=tuple(summary.harmful_frames),
        timestamps_s=tuple(quantize_real(t) for t in summary.timestamps_s),
        extremes=tuple(ExtremeMark(f, quantize_real(m)) for f, m in extremes),
        runtime_ms=runtime_ms,
    )


# ---------------------------------------------------------------------------
# Canonical serialization

def _encode(node) -> str:
    if isinstance(node, _Real):
        return f"{node.value:.6f}"
    if node is None:
        return "null"
    if node is True:
        return "true"
    if node is False:
        return "false"
    if isinstance(node, int):
        return str(node)
    if isinstance(node, str):
        return json.dumps(node)
    if isinstance(node, (list, tuple)):
        return "[" + ",".join(_encode(item) for item in node) + "]"
    if isinstance(node, dict):
        return "{" + ",".join(f"{json.dumps(k)}:{_encode(v)}" for k, v in node.items()) + "}"
    raise TypeError(f"cannot encode {type(node)!r}")


def encode_document(node) -> bytes:
    """Render a document tree as canonical UTF-8 JSON (fixed real format)."""
    return (_encode(node) + "\n").encode()


def _config_node(config: AnalysisConfig) -> dict:
    return {
        "area_fraction": _Real(config.area_fraction),
        "flash_threshold": _Real(config.flash_threshold),
        "scan_mode": config.scan_mode,
        "dark_gate_enabled": config.dark_gate_enabled,
        "dark_gate_limit": _Real(config.dark_gate_limit),
        "flush_trailing": config.flush_trailing,
        "downscale_width": config.downscale_width,
        "downscale_height": config.downscale_height,
        "quantize_downscale": config.quantize_downscale,
    }


def to_json(report: AnalysisReport) -> bytes:
    """Serialize a report; key order is fixed, reals use six decimals."""
    document = {
        "schema_version": report.schema_version,
        "source_digest": report.source_digest,
        "geometry": {"width": report.geometry.width, "height": report.geometry.height},
        "fps": {"num": report.fps_num, "den": report.fps_den},
        "frame_count": report.frame_count,
        "config": _config_node(report.config),
        "num_triggers": report.num_triggers,
        "harmful_frames": list(report.harmful_frames),
        "timestamps_s": [_Real(t) for t in report.timestamps_s],
        "extremes": [
            {"frame": e.frame, "magnitude_cd_m2": _Real(e.magnitude_cd_m2)}
            for e in report.extremes
        ],
        "runtime_ms": report.runtime_ms,
    }
    return encode_document(document)


def _parse_config(node: dict) -> AnalysisConfig:
    return AnalysisConfig(
        area_fraction=float(node["area_fraction"]),
        flash_threshold=float(node["flash_threshold"]),
        scan_mode=str(node["scan_mode"]),
        dark_gate_enabled=bool(node["dark_gate_enabled"]),
        dark_gate_limit=float(node["dark_gate_limit"]),
        flush_trailing=bool(node["flush_trailing"]),
        downscale_width=node["downscale_width"],
        downscale_height=node["downscale_height"],
        quantize_downscale=bool(node["quantize_downscale"]),
    )


def from_json(data: bytes | str) -> AnalysisReport:
    """Parse a serialized report; raises ValueError on bad structure."""
    try:
        document = json.loads(data)
        return AnalysisReport(
            schema_version=int(document["schema_version"]),
            source_digest=str(document["source_digest"]),
            geometry=FrameGeometry(
                int(document["geometry"]["width"]), int(document["geometry"]["height"])
            ),
            fps_num=int(document["fps"]["num"]),
            fps_den=int(document["fps"]["den"]),
            frame_count=int(document["frame_count"]),
            config=_parse_config(document["config"]),
            num_triggers=int(document["num_triggers"]),
            harmful_frames=tuple(int(f) for f in document["harmful_frames"]),
            timestamps_s=tuple(float(t) for t in document["timestamps_s"]),
            extremes=tuple(
                ExtremeMark(int(e["frame"]), float(e["magnitude_cd_m2"]))
                for e in document["extremes"]
            ),
            runtime_ms=int(document["runtime_ms"]),
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValueError(f"not a valid analysis report: {exc}") from exc


def config_echo_matches(a: AnalysisConfig, b: AnalysisConfig) -> bool:
    """Config equality at the six-decimal precision the cache stores."""
    return _encode(_config_node(a)) == _encode(_config_node(b))


# ---------------------------------------------------------------------------
# Cache

def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_DIR_ENV)
    if env:
        return Path(env)
    if sys.platform == "darwin":
        base = Path.home() / "Library" / "Caches"
    elif os.name == "nt":
        base = Path(os.environ.get("LOCALAPPDATA", str(Path.home() / "AppData" / "Local")))
    else:
        base = Path(os.environ.get("XDG_CACHE_HOME", str(Path.home() / ".cache")))
    return base / "flashguard"


def _entry_path(cache_dir: Path, digest: str) -> Path:
    return cache_dir / f"{digest}.json"


def cache_store(report: AnalysisReport, cache_dir: str | Path | None = None) -> Path:
    """Persist a report under its digest; write-temp-then-rename atomic."""
    directory = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    directory.mkdir(parents=True, exist_ok=True)
    target = _entry_path(directory, report.source_digest)
    handle = tempfile.NamedTemporaryFile(
        mode="wb", dir=directory, prefix=".tmp-", suffix=".json", delete=False
    )
    try:
        with handle:
            handle.write(to_json(report))
        os.replace(handle.name, target)
    except BaseException:
        Path(handle.name).unlink(missing_ok=True)
        raise
    return target


def cache_lookup(
    digest: str,
    config: AnalysisConfig,
    cache_dir: str | Path | None = None,
) -> AnalysisReport | None:
    """Fetch a stored report if present and its config echo matches."""
    directory = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    path = _entry_path(directory, digest)
    if not path.is_file():
        return None
    try:
        report = from_json(path.read_bytes())
    except (ValueError, OSError) as exc:
        logger.warning("corrupt cache entry %s treated as miss: %s", path, exc)
        return None
    if report.source_digest != digest or not config_echo_matches(report.config, config):
        return None
    return report
