"""Command-line front end.

    speechsev threshold --manifest corpus.json
    speechsev analyze   --manifest corpus.json --threshold 1.0 --format text
    speechsev envelope  --wav clip.wav --out env.csv --anchors-out anchors.csv
    speechsev gen       --kind sine --freq 440 --dur 8000 --rate 8000 --amp 0.8 --out fixture.wav
    speechsev report    --input report.json --format csv
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .analysis import PAPER_THRESHOLD, AnalysisConfig, AnalysisError, analyze_corpus, corpus_threshold
from .envelope import ANCHOR_RULES, anchors_csv, build_envelope, envelope_csv
from .report import ReportDocument, parse_report, render, render_csv_tables
from .signal_io import (
    ManifestError,
    NoSpeechError,
    WavReadError,
    load_manifest,
    load_wav,
    trim_endpoints,
    write_wav,
)
from .synth import SynthKind, SynthSpec, generate

PROG = "speechsev"
EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

CONFIG_KEYS = {
    "block_size": int,
    "epsilon_rel": float,
    "threshold": float,
    "trim_rel_threshold": float,
    "trim_frame_len": int,
    "trim": bool,
    "word_thresholds": dict,
    "anchor_rule": str,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(s):
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}")
    return v


def _positive_float(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s!r}") from None
    if not v > 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s!r}")
    return v


def _unit_fraction(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number in (0, 1), got {s!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"expected a number in (0, 1), got {s!r}")
    return v


def _amplitude(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number in [0, 1], got {s!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a number in [0, 1], got {s!r}")
    return v


def _default_jobs():
    env = os.environ.get("SPEECHSEV_JOBS")
    if env:
        return env
    return os.cpu_count() or 1


def _add_analysis_flags(p, *, with_threshold=False):
    g = p.add_argument_group("analysis parameters")
    g.add_argument("--config", type=Path, help="JSON file of analysis parameters")
    g.add_argument("--block-size", type=_positive_int, help="envelope block size (default 100)")
    g.add_argument("--epsilon-rel", type=_unit_fraction, help="denominator guard (default 1e-6)")
    g.add_argument("--trim-rel-threshold", type=_unit_fraction, help="endpoint energy gate (default 0.05)")
    g.add_argument("--frame-len", type=_positive_int, help="endpoint frame length (default 100)")
    g.add_argument("--no-trim", action="store_true", default=None, help="skip endpoint trimming")
    g.add_argument("--anchor-rule", choices=sorted(ANCHOR_RULES),
                   help="envelope anchors: block max+min (extrema, default) or maxima only (upper)")
    if with_threshold:
        t = g.add_mutually_exclusive_group()
        t.add_argument("--threshold", type=_positive_float, help="same-speaker threshold")
        t.add_argument("--paper-threshold", action="store_true",
                       help=f"use the published threshold {PAPER_THRESHOLD}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Speech envelope ratio-mean severity analysis.")
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("threshold", help="threshold from three normal utterances")
    p.add_argument("--manifest", type=Path, required=True)
    _add_analysis_flags(p)

    p = sub.add_parser("analyze", help="grade every word of a corpus")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--out", type=Path, help="output path (default: standard output)")
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--jobs", type=_positive_int, default=_default_jobs(),
                   help="worker threads (default: $SPEECHSEV_JOBS or CPU count)")
    _add_analysis_flags(p, with_threshold=True)

    p = sub.add_parser("envelope", help="dump one clip's envelope as CSV")
    p.add_argument("--wav", type=Path, required=True)
    p.add_argument("--out", type=Path, help="envelope CSV (default: standard output)")
    p.add_argument("--anchors-out", type=Path, help="anchor CSV")
    p.add_argument("--trim", action="store_true", help="apply endpoint trimming first")
    p.add_argument("--block-size", type=_positive_int, default=100)
    p.add_argument("--anchor-rule", choices=sorted(ANCHOR_RULES), default="extrema")
    p.add_argument("--trim-rel-threshold", type=_unit_fraction, default=0.05)
    p.add_argument("--frame-len", type=_positive_int, default=100)

    p = sub.add_parser("gen", help="write a synthetic WAV fixture")
    p.add_argument("--kind", choices=["sine", "noise", "scaled"], default="sine")
    p.add_argument("--freq", type=_positive_float, default=440.0)
    p.add_argument("--dur", type=_positive_int, required=True, help="duration in samples")
    p.add_argument("--rate", type=_positive_int, default=8000)
    p.add_argument("--amp", type=_amplitude, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=_positive_float, default=1.0)
    p.add_argument("--input", type=Path, help="source WAV for --kind scaled")
    p.add_argument("--bits", choices=["8", "16", "24", "32", "float"], default="float")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("report", help="re-render a stored JSON report")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--format", choices=["json", "csv", "text"], default="text")
    p.add_argument("--out", type=Path)
    return parser


def _read_config_file(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError(f"config {path} must be a JSON object")
    unknown = sorted(set(doc) - set(CONFIG_KEYS))
    if unknown:
        raise UsageError(f"config {path}: unknown keys {unknown}")
    for key, kind in CONFIG_KEYS.items():
        accepted = (int, float) if kind is float else kind
        value = doc.get(key)
        if value is not None and (not isinstance(value, accepted) or (kind is not bool and isinstance(value, bool))):
            raise UsageError(f"config {path}: {key} must be {kind.__name__}")
    return doc


def _config_from_args(args) -> AnalysisConfig:
    """Flags override the config file, which overrides built-in defaults."""
    merged = {}
    if args.config is not None:
        merged.update(_read_config_file(args.config))
    flags = {
        "block_size": args.block_size,
        "epsilon_rel": args.epsilon_rel,
        "trim_rel_threshold": args.trim_rel_threshold,
        "trim_frame_len": args.frame_len,
        "trim": False if args.no_trim else None,
        "anchor_rule": args.anchor_rule,
        "threshold": getattr(args, "threshold", None),
    }
    if getattr(args, "paper_threshold", False):
        flags["threshold"] = PAPER_THRESHOLD
    merged.update({k: v for k, v in flags.items() if v is not None})
    if hasattr(args, "jobs"):
        merged["jobs"] = args.jobs
    try:
        return AnalysisConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _write_atomic(path: Path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _emit(data: bytes, out) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        _write_atomic(out, data)


def _subjects_path(out: Path) -> Path:
    return out.with_name(f"{out.stem}_subjects{out.suffix or '.csv'}")


def _emit_report(doc: ReportDocument, fmt: str, out) -> None:
    if fmt == "csv" and out is not None:
        words, subjects = render_csv_tables(doc)
        _write_atomic(out, words.encode("utf-8"))
        _write_atomic(_subjects_path(out), subjects.encode("utf-8"))
    else:
        _emit(render(doc, fmt), out)


def _warn(msg):
    print(f"{PROG}: warning: {msg}", file=sys.stderr)


def cmd_threshold(args):
    config = _config_from_args(args)
    manifest = load_manifest(args.manifest)
    value = corpus_threshold(manifest, config)
    if value is None:
        raise AnalysisError("manifest designates no threshold utterances")
    print(repr(float(value)))


def cmd_analyze(args):
    config = _config_from_args(args)
    manifest = load_manifest(args.manifest)
    result = analyze_corpus(manifest, config, warn=_warn)
    doc = ReportDocument(result.words, result.summaries, config.echo(result.threshold), result.warnings)
    _emit_report(doc, args.format, args.out)


def cmd_envelope(args):
    clip = load_wav(args.wav)
    if args.trim:
        clip = trim_endpoints(clip, args.trim_rel_threshold, min(args.frame_len, len(clip)))
    env = build_envelope(clip, args.block_size, args.anchor_rule)
    _emit(envelope_csv(clip, env).encode("utf-8"), args.out)
    if args.anchors_out is not None:
        _write_atomic(args.anchors_out, anchors_csv(env).encode("utf-8"))


def cmd_gen(args):
    if args.kind == "scaled":
        if args.input is None:
            raise UsageError("--kind scaled requires --input")
        src = load_wav(args.input)
        spec = SynthSpec(SynthKind.SCALED_COPY, args.dur, src.sample_rate, scale=args.scale, source=src)
    else:
        spec = SynthSpec(SynthKind(args.kind), args.dur, args.rate, args.amp, args.freq, args.seed)
    clip = generate(spec)
    write_wav(args.out, clip, args.bits)


def cmd_report(args):
    data = Path(args.input).read_bytes()
    _emit_report(parse_report(data), args.format, args.out)


COMMANDS = {
    "threshold": cmd_threshold,
    "analyze": cmd_analyze,
    "envelope": cmd_envelope,
    "gen": cmd_gen,
    "report": cmd_report,
}


def run(argv=None) -> int:
    """Execute one command; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"{PROG}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ManifestError as exc:
        print(f"{PROG}: invalid manifest: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (WavReadError, NoSpeechError) as exc:
        print(f"{PROG}: audio error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (AnalysisError, ValueError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
