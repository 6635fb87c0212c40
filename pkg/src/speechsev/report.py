"""Report rendering: per-word results, per-subject summaries, config echo."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum

from .analysis import SeverityClass, SubjectSummary, WordResult

__all__ = [
    "Format",
    "ReportDocument",
    "parse_report",
    "render",
    "render_csv_tables",
]

RATIO_DECIMALS = 5
WORD_HEADER = ["word", "speaker", "raw_ratio", "normalized_ratio", "class"]
SUBJECT_HEADER = ["speaker", "no", "mild", "moderate", "large", "overall"]


class Format(str, Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


@dataclass
class ReportDocument:
    word_results: list[WordResult] = field(default_factory=list)
    summaries: list[SubjectSummary] = field(default_factory=list)
    config_echo: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


def _format_float(x: float) -> str:
    """Shortest round-trip repr, padded to at least five decimals."""
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    s = repr(float(x))
    if "e" in s or "E" in s:
        return s
    whole, _, frac = s.partition(".")
    if len(frac) < RATIO_DECIMALS:
        frac = frac.ljust(RATIO_DECIMALS, "0")
    return f"{whole}.{frac}"


def _dump(obj, indent=0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_dump(v, indent + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _dump(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _to_dict(doc: ReportDocument) -> dict:
    return {
        "config": doc.config_echo,
        "words": [
            {
                "word": r.word,
                "speaker": r.speaker_id,
                "raw_ratio": float(r.raw_ratio),
                "normalized_ratio": float(r.normalized_ratio),
                "class": r.severity.label,
            }
            for r in doc.word_results
        ],
        "subjects": [
            {
                "speaker": s.speaker_id,
                "counts": {c.label: int(s.counts.get(c, 0)) for c in SeverityClass},
                "overall": s.overall.label,
            }
            for s in doc.summaries
        ],
        "warnings": list(doc.warnings),
    }


def parse_report(data) -> ReportDocument:
    """Inverse of JSON rendering."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    d = json.loads(data)
    try:
        words = [
            WordResult(w["word"], w["speaker"], float(w["raw_ratio"]), float(w["normalized_ratio"]),
                       SeverityClass.from_label(w["class"]))
            for w in d["words"]
        ]
        subjects = [
            SubjectSummary(
                s["speaker"],
                {SeverityClass.from_label(k): int(v) for k, v in s["counts"].items()},
                SeverityClass.from_label(s["overall"]),
            )
            for s in d["subjects"]
        ]
        return ReportDocument(words, subjects, dict(d["config"]), list(d.get("warnings", [])))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed report document: {exc}") from exc


def render_csv_tables(doc: ReportDocument) -> tuple[str, str]:
    """(per-word CSV, per-subject CSV)."""
    words = io.StringIO()
    w = csv.writer(words, lineterminator="\n")
    w.writerow(WORD_HEADER)
    for r in doc.word_results:
        w.writerow([r.word, r.speaker_id, f"{r.raw_ratio:.{RATIO_DECIMALS}f}",
                    f"{r.normalized_ratio:.{RATIO_DECIMALS}f}", r.severity.label])
    subjects = io.StringIO()
    w = csv.writer(subjects, lineterminator="\n")
    w.writerow(SUBJECT_HEADER)
    for s in doc.summaries:
        w.writerow([s.speaker_id, *(int(s.counts.get(c, 0)) for c in SeverityClass), s.overall.label])
    return words.getvalue(), subjects.getvalue()


def _table(rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(wd) for cell, wd in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "  ".join("-" * wd for wd in widths))
    return lines


def _render_text(doc: ReportDocument) -> str:
    out = []
    threshold = doc.config_echo.get("threshold")
    if threshold is not None:
        out.append(f"Threshold: {threshold:.{RATIO_DECIMALS}f}")
        out.append("")
    rows = [["Pronounced Word", "Particulars", "Ratio Value", "Deviation from the Threshold Value"]]
    last_word = None
    for r in doc.word_results:
        word = r.word if r.word != last_word else ""
        last_word = r.word
        rows.append([word, f"Normal and {r.speaker_id}", f"{r.raw_ratio:.{RATIO_DECIMALS}f}", r.severity.label])
    out.extend(_table(rows))
    out.append("")
    rows = [["Name of the Subject", "No Deviation", "Mild Deviation", "Moderate Deviation",
             "Large Deviation", "Overall"]]
    for s in doc.summaries:
        counts = [str(s.counts.get(c, 0)) if s.counts.get(c, 0) else "Nil" for c in SeverityClass]
        rows.append([s.speaker_id, *counts, s.overall.label])
    out.extend(_table(rows))
    if doc.warnings:
        out.append("")
        out.extend(f"warning: {w}" for w in doc.warnings)
    return "\n".join(out) + "\n"


def render(doc: ReportDocument, fmt="json") -> bytes:
    fmt = Format(fmt)
    if fmt is Format.JSON:
        text = _dump(_to_dict(doc)) + "\n"
    elif fmt is Format.CSV:
        words, subjects = render_csv_tables(doc)
        text = words + "\n" + subjects
    else:
        text = _render_text(doc)
    return text.encode("utf-8")
