"""Command-line interface.

Subcommands: ``analyze`` (trigger detection and JSON report), ``sanitize``
(iterative cut-and-reanalyze), ``gen`` (synthetic strobe videos), and
``cache`` (result cache maintenance). Exit codes: 0 success (finding
triggers is not an error), 2 bad input or flags, 3 internal failure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .flashdetect import AnalysisConfig
from .frameio import (
    FrameGeometry,
    VideoFormatError,
    VideoStream,
    parse_raw_rgb24,
    parse_y4m,
    read_ppm_sequence,
    write_video,
)
from .pipeline import analyze_stream
from .reporting import (
    cache_lookup,
    cache_store,
    default_cache_dir,
    from_json,
    source_digest,
    to_json,
)
from .sanitizer import SanitizeConfig, sanitize_iterative
from .synthgen import StrobeSpec, expected_triggers, gen_strobe


def _fps_value(text: str) -> Fraction:
    try:
        if ":" in text:
            num, den = text.split(":", 1)
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(text)
        if value <= 0:
            raise ValueError
        return value
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid frame rate {text!r} (use N, N:D or a decimal)")


def _geometry_value(text: str) -> FrameGeometry:
    try:
        width, height = text.lower().split("x", 1)
        return FrameGeometry(int(width), int(height))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid geometry {text!r} (use WIDTHxHEIGHT)")


def _iterations_value(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid iteration count {text!r}")
    if not 1 <= value <= 5:
        raise argparse.ArgumentTypeError("iterations must be between 1 and 5")
    return value


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="video path, PPM directory, or - for stdin")
    parser.add_argument(
        "--format",
        choices=("y4m", "ppm", "raw"),
        help="input format (default: inferred from the path)",
    )
    parser.add_argument("--fps", type=_fps_value, help="frame rate override (N, N:D or decimal)")
    parser.add_argument("--geometry", type=_geometry_value, help="WxH, required for raw input")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--strict", action="store_true", help="strict area-minimum scan mode")
    parser.add_argument(
        "--dark-gate",
        action="store_true",
        help="suppress flashes whose darker frame averages >= 160 cd/m2",
    )
    parser.add_argument("--area-fraction", type=float, default=0.25, metavar="F",
                        help="minimum screen share of a flash (default 0.25)")
    parser.add_argument("--flash-threshold", type=float, default=20.0, metavar="CD",
                        help="harmful luminance change in cd/m2 (default 20)")
    parser.add_argument("--downscale", type=_geometry_value, metavar="WxH",
                        help="analyze at this resolution (downscale only)")


def _config_from_args(args: argparse.Namespace) -> AnalysisConfig:
    downscale = getattr(args, "downscale", None)
    return AnalysisConfig(
        area_fraction=args.area_fraction,
        flash_threshold=args.flash_threshold,
        scan_mode="strict" if args.strict else "reference",
        dark_gate_enabled=args.dark_gate,
        downscale_width=downscale.width if downscale else None,
        downscale_height=downscale.height if downscale else None,
    )


def _infer_format(path: str, explicit: str | None) -> str:
    if explicit:
        return explicit
    if path == "-":
        return "y4m"
    if Path(path).is_dir():
        return "ppm"
    suffix = Path(path).suffix.lower()
    if suffix == ".y4m":
        return "y4m"
    if suffix in (".rgb", ".raw"):
        return "raw"
    raise VideoFormatError(
        f"cannot infer format of {path!r}; pass --format y4m|ppm|raw"
    )


def _load_stream(args: argparse.Namespace) -> VideoStream:
    fmt = _infer_format(args.input, args.format)
    if fmt == "ppm":
        return read_ppm_sequence(args.input, fps=args.fps)
    if args.input == "-":
        data = sys.stdin.buffer.read()
    else:
        data = Path(args.input).read_bytes()
    if fmt == "y4m":
        return parse_y4m(data)
    if args.geometry is None or args.fps is None:
        raise VideoFormatError("raw input needs --geometry and --fps")
    return parse_raw_rgb24(data, args.geometry, args.fps)


def _print_summary(report, cache_state: str) -> None:
    print(
        f"source: {report.geometry}, {report.fps_num}/{report.fps_den} fps, "
        f"{report.frame_count} frames"
    )
    print(f"possible triggers: {report.num_triggers}")
    if report.harmful_frames:
        print("harmful frames: " + ", ".join(str(f) for f in report.harmful_frames))
        print("timestamps (s): " + ", ".join(f"{t:.6f}" for t in report.timestamps_s))
    print(f"cache: {cache_state}")


def _cmd_analyze(args: argparse.Namespace) -> int:
    stream = _load_stream(args)
    cfg = _config_from_args(args)
    digest = source_digest(stream)
    cache_dir = args.cache_dir or default_cache_dir()
    if args.no_cache:
        report = analyze_stream(stream, cfg, digest=digest)
        cache_state = "disabled"
    else:
        cached = cache_lookup(digest, cfg, cache_dir)
        if cached is not None:
            report = cached
            cache_state = "hit"
        else:
            report = analyze_stream(stream, cfg, digest=digest)
            cache_store(report, cache_dir)
            cache_state = "miss"
    _print_summary(report, cache_state)
    if args.json:
        Path(args.json).write_bytes(to_json(report))
    return 0


def _cmd_sanitize(args: argparse.Namespace) -> int:
    stream = _load_stream(args)
    acfg = _config_from_args(args)
    scfg = SanitizeConfig(level_seconds=args.level_seconds, max_iterations=args.iterations)
    result = sanitize_iterative(stream, acfg, scfg)
    for index, report in enumerate(result.reports, start=1):
        print(f"iteration {index}: {report.num_triggers} triggers, {report.frame_count} frames in")
    final = result.reports[-1].num_triggers
    print(f"final triggers: {final}")
    print(f"frames removed: {len(result.cut_plan.removal_frames)}")
    if not result.stream.frames:
        print("nothing left to write: every frame was removed", file=sys.stderr)
    else:
        out_format = "ppm_sequence" if _infer_format(args.output, args.format_out) == "ppm" else "y4m"
        write_video(result.stream, out_format, args.output)
    if args.json:
        payload = b"[" + b",".join(to_json(r).strip() for r in result.reports) + b"]\n"
        Path(args.json).write_bytes(payload)
    if args.cut_plan:
        Path(args.cut_plan).write_bytes(result.cut_plan.to_json())
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    spec = StrobeSpec(
        geometry=args.geometry or FrameGeometry(320, 240),
        fps=args.fps or Fraction(30),
        duration_frames=args.frames,
        period_frames=args.period,
        low_gray=args.low,
        high_gray=args.high,
        region_fraction=args.region,
    )
    stream = gen_strobe(spec)
    out_format = "ppm_sequence" if _infer_format(args.output, args.format_out) == "ppm" else "y4m"
    write_video(stream, out_format, args.output)
    print(f"wrote {len(stream.frames)} frames to {args.output}")
    print(f"expected triggers: {expected_triggers(spec)}")
    return 0


def _cmd_cache(args: argparse.Namespace) -> int:
    cache_dir = args.cache_dir or default_cache_dir()
    if args.action == "path":
        print(cache_dir)
        return 0
    if args.action == "list":
        if cache_dir.is_dir():
            for path in sorted(cache_dir.glob("*.json")):
                try:
                    report = from_json(path.read_bytes())
                except ValueError:
                    print(f"{path.stem}  (unreadable)")
                    continue
                print(
                    f"{report.source_digest}  triggers={report.num_triggers} "
                    f"frames={report.frame_count}"
                )
        return 0
    removed = 0
    if cache_dir.is_dir():
        for path in cache_dir.glob("*.json"):
            path.unlink()
            removed += 1
    print(f"removed {removed} cache entries")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flashguard",
        description="Detect photosensitive-epilepsy flash triggers in video and cut them out.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="detect flash triggers and report them")
    _add_input_flags(analyze)
    _add_config_flags(analyze)
    analyze.add_argument("--json", metavar="PATH", help="write the JSON report here")
    analyze.add_argument("--no-cache", action="store_true", help="skip the result cache")
    analyze.add_argument("--cache-dir", type=Path, help="cache directory override")
    analyze.set_defaults(handler=_cmd_analyze)

    sanitize = sub.add_parser("sanitize", help="cut harmful windows until clean")
    _add_input_flags(sanitize)
    _add_config_flags(sanitize)
    sanitize.add_argument("-o", "--output", required=True, help="output video path or PPM directory")
    sanitize.add_argument("--format-out", choices=("y4m", "ppm"), help="output format")
    sanitize.add_argument("--iterations", type=_iterations_value, default=3, metavar="N",
                          help="analysis-and-cut passes, 1..5 (default 3)")
    sanitize.add_argument("--level-seconds", type=float, default=5.0, metavar="S",
                          help="removal window length in seconds (default 5)")
    sanitize.add_argument("--json", metavar="PATH", help="write per-iteration JSON reports here")
    sanitize.add_argument("--cut-plan", metavar="PATH",
                          help="write the composed original-timeline cut plan here")
    sanitize.set_defaults(handler=_cmd_sanitize)

    gen = sub.add_parser("gen", help="generate a synthetic strobe video")
    gen.add_argument("-o", "--output", required=True, help="output video path or PPM directory")
    gen.add_argument("--format-out", choices=("y4m", "ppm"), help="output format")
    gen.add_argument("--geometry", type=_geometry_value, help="frame size (default 320x240)")
    gen.add_argument("--fps", type=_fps_value, help="frame rate (default 30)")
    gen.add_argument("--frames", type=int, default=60, help="duration in frames (default 60)")
    gen.add_argument("--period", type=int, default=1, help="half-period in frames (default 1)")
    gen.add_argument("--low", type=int, default=0, help="quiet gray level (default 0)")
    gen.add_argument("--high", type=int, default=255, help="flash gray level (default 255)")
    gen.add_argument("--region", type=float, default=1.0,
                     help="flashing area as a screen fraction (default 1.0)")
    gen.set_defaults(handler=_cmd_gen)

    cache = sub.add_parser("cache", help="inspect or clear the result cache")
    cache.add_argument("action", choices=("path", "list", "clear"))
    cache.add_argument("--cache-dir", type=Path, help="cache directory override")
    cache.set_defaults(handler=_cmd_cache)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage/diagnostics
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (VideoFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
