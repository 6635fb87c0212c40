"""Ratio-mean severity estimation.

A subject's envelope is compared sample by sample against the normal
subject's envelope; the mean absolute ratio, divided by a same-speaker
threshold, is graded into four deviation bands.
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Iterable, Mapping, Optional, Sequence

from . import kernels
from .envelope import ANCHOR_RULES, DEFAULT_BLOCK_SIZE, Envelope, build_envelope
from .signal_io import (
    AudioClip,
    CorpusManifest,
    EntryDescriptor,
    equalize_length,
    trim_endpoints,
)

log = logging.getLogger(__name__)

__all__ = [
    "PAPER_THRESHOLD",
    "AnalysisConfig",
    "AnalysisError",
    "CorpusResult",
    "DeviationBands",
    "RatioStats",
    "SeverityClass",
    "SubjectSummary",
    "WordResult",
    "aggregate_subject",
    "analyze_corpus",
    "analyze_pair",
    "classify_deviation",
    "corpus_threshold",
    "determine_threshold",
    "prepare_clip",
    "summarize",
    "threshold_from_clips",
    "ratio_mean",
]

# Same-speaker threshold published for the normal subject's "Namma".
PAPER_THRESHOLD = 1.03989


class AnalysisError(ValueError):
    pass


class SeverityClass(IntEnum):
    NO_DEVIATION = 0
    MILD = 1
    MODERATE = 2
    LARGE = 3

    @property
    def label(self) -> str:
        """Result-table vocabulary: no / mild / moderate / severe."""
        return _LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> "SeverityClass":
        try:
            return _FROM_LABEL[label.lower()]
        except KeyError:
            raise ValueError(f"unknown severity label {label!r}") from None


_LABELS = {
    SeverityClass.NO_DEVIATION: "no",
    SeverityClass.MILD: "mild",
    SeverityClass.MODERATE: "moderate",
    SeverityClass.LARGE: "severe",
}
_FROM_LABEL = {v: k for k, v in _LABELS.items()}
_FROM_LABEL.update({"large": SeverityClass.LARGE, "small": SeverityClass.MILD, "none": SeverityClass.NO_DEVIATION})


@dataclass(frozen=True)
class DeviationBands:
    """Two-sided bands around 1.0.

    No deviation on [no_low, no_high]; mild on [mild_low, no_low) and
    (no_high, mild_high]; moderate on [moderate_low, mild_low) and
    (mild_high, moderate_high]; large outside.
    """

    moderate_low: float = 0.4
    mild_low: float = 0.6
    no_low: float = 0.8
    no_high: float = 1.2
    mild_high: float = 1.8
    moderate_high: float = 2.6

    def __post_init__(self):
        edges = self.edges
        if not all(0 < a < b for a, b in zip(edges, edges[1:])):
            raise ValueError(f"band edges must be positive and strictly increasing: {edges}")

    @property
    def edges(self) -> tuple[float, ...]:
        return (self.moderate_low, self.mild_low, self.no_low,
                self.no_high, self.mild_high, self.moderate_high)

    def classify(self, r: float) -> SeverityClass:
        if not r > 0 or math.isnan(r):
            raise ValueError(f"normalized ratio must be positive, got {r!r}")
        if r >= self.no_low:
            if r <= self.no_high:
                return SeverityClass.NO_DEVIATION
            if r <= self.mild_high:
                return SeverityClass.MILD
            if r <= self.moderate_high:
                return SeverityClass.MODERATE
            return SeverityClass.LARGE
        if r >= self.mild_low:
            return SeverityClass.MILD
        if r >= self.moderate_low:
            return SeverityClass.MODERATE
        return SeverityClass.LARGE


DEFAULT_BANDS = DeviationBands()


def classify_deviation(normalized_ratio: float, bands: DeviationBands = DEFAULT_BANDS) -> SeverityClass:
    return bands.classify(normalized_ratio)


@dataclass(frozen=True)
class RatioStats:
    raw_ratio: float
    normalized_ratio: float
    included_samples: int
    masked_samples: int


def _values(env):
    return env.values if isinstance(env, Envelope) else env


def ratio_mean(subject_env, reference_env, epsilon_rel: float = 1e-6, threshold: float = 1.0) -> RatioStats:
    """Mean of |subject| / |reference| over samples where the reference is
    at least ``epsilon_rel`` of its own peak magnitude.
    """
    s = _values(subject_env)
    r = _values(reference_env)
    if s.shape != r.shape:
        raise AnalysisError(f"envelope length mismatch: {s.shape[0]} vs {r.shape[0]}")
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    if not 0.0 < epsilon_rel < 1.0:
        raise ValueError("epsilon_rel must lie in (0, 1)")
    total, count = kernels.masked_ratio_sum(s, r, float(epsilon_rel))
    if count == 0:
        raise AnalysisError("reference envelope is zero everywhere; all samples masked")
    raw = total / count
    return RatioStats(raw, raw / threshold, int(count), int(r.shape[0] - count))


def determine_threshold(utt1, utt2, utt3, epsilon_rel: float = 1e-6) -> float:
    """Smaller of the ratio means of utterances 2 and 3 against utterance 1."""
    a = ratio_mean(utt2, utt1, epsilon_rel).raw_ratio
    b = ratio_mean(utt3, utt1, epsilon_rel).raw_ratio
    return min(a, b)


@dataclass(frozen=True)
class WordResult:
    word: str
    speaker_id: str
    raw_ratio: float
    normalized_ratio: float
    severity: SeverityClass


@dataclass(frozen=True)
class SubjectSummary:
    speaker_id: str
    counts: Mapping[SeverityClass, int]
    overall: SeverityClass


def aggregate_subject(results: Sequence[WordResult]) -> SubjectSummary:
    """Most frequent class; ties go to the more severe class."""
    if not results:
        raise ValueError("aggregate_subject needs at least one result")
    speakers = {r.speaker_id for r in results}
    if len(speakers) != 1:
        raise ValueError(f"results span several speakers: {sorted(speakers)}")
    tally = Counter(r.severity for r in results)
    counts = {c: tally.get(c, 0) for c in SeverityClass}
    overall = max(SeverityClass, key=lambda c: (counts[c], c))
    return SubjectSummary(speakers.pop(), counts, overall)


@dataclass(frozen=True)
class AnalysisConfig:
    block_size: int = DEFAULT_BLOCK_SIZE
    epsilon_rel: float = 1e-6
    threshold: Optional[float] = None
    trim_rel_threshold: float = 0.05
    trim_frame_len: int = 100
    trim: bool = True
    word_thresholds: Mapping[str, float] = field(default_factory=dict)
    anchor_rule: str = "extrema"
    jobs: int = 1

    def __post_init__(self):
        if int(self.block_size) != self.block_size or self.block_size < 1:
            raise ValueError("block_size must be a positive integer")
        if not 0.0 < self.epsilon_rel < 1.0:
            raise ValueError("epsilon_rel must lie in (0, 1)")
        if self.threshold is not None and not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if not 0.0 < self.trim_rel_threshold < 1.0:
            raise ValueError("trim_rel_threshold must lie in (0, 1)")
        if int(self.trim_frame_len) != self.trim_frame_len or self.trim_frame_len < 1:
            raise ValueError("trim_frame_len must be a positive integer")
        for w, t in self.word_thresholds.items():
            if not t > 0:
                raise ValueError(f"threshold for {w!r} must be positive")
        if self.anchor_rule not in ANCHOR_RULES:
            raise ValueError(f"anchor_rule must be one of {sorted(ANCHOR_RULES)}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def echo(self, threshold: Optional[float] = None) -> dict:
        """Every parameter that can influence the numbers."""
        if threshold is None:
            threshold = self.threshold
        return {
            "block_size": int(self.block_size),
            "anchor_rule": self.anchor_rule,
            "epsilon_rel": float(self.epsilon_rel),
            "threshold": None if threshold is None else float(threshold),
            "trim": bool(self.trim),
            "trim_rel_threshold": float(self.trim_rel_threshold),
            "trim_frame_len": int(self.trim_frame_len),
            "word_thresholds": {k: float(v) for k, v in sorted(self.word_thresholds.items())},
        }


def prepare_clip(clip: AudioClip, config: AnalysisConfig, manual_bounds: bool = False) -> AudioClip:
    """Endpoint trimming unless the clip already carries manual bounds."""
    if not config.trim or manual_bounds:
        return clip
    return trim_endpoints(clip, config.trim_rel_threshold, min(config.trim_frame_len, len(clip)))


def analyze_pair(normal: AudioClip, subject: AudioClip, config: AnalysisConfig,
                 threshold: float, *, normal_trimmed=False, subject_trimmed=False) -> RatioStats:
    """Trim both clips, equalize the subject to the normal length, compare envelopes."""
    ref = normal if normal_trimmed else prepare_clip(normal, config)
    sub = subject if subject_trimmed else prepare_clip(subject, config)
    sub = equalize_length(sub, len(ref))
    ref_env = build_envelope(ref, config.block_size, config.anchor_rule)
    sub_env = build_envelope(sub, config.block_size, config.anchor_rule)
    return ratio_mean(sub_env, ref_env, config.epsilon_rel, threshold)


def threshold_from_clips(clips: Sequence[AudioClip], config: AnalysisConfig, trimmed=False) -> float:
    """Threshold from three normal utterances; 2 and 3 equalized to utterance 1."""
    if len(clips) != 3:
        raise ValueError("threshold needs exactly three utterances")
    if not trimmed:
        clips = [prepare_clip(c, config) for c in clips]
    first = clips[0]
    rest = [equalize_length(c, len(first)) for c in clips[1:]]
    envs = [build_envelope(c, config.block_size, config.anchor_rule) for c in (first, *rest)]
    return determine_threshold(*envs, epsilon_rel=config.epsilon_rel)


@dataclass
class CorpusResult:
    words: list[WordResult]
    summaries: list[SubjectSummary]
    threshold: float
    warnings: list[str]


def _load(entry: EntryDescriptor, config: AnalysisConfig) -> AudioClip:
    rec = entry.load()
    return prepare_clip(rec.clip, config, manual_bounds=entry.manual_bounds)


def corpus_threshold(manifest: CorpusManifest, config: AnalysisConfig) -> Optional[float]:
    """Threshold from the manifest's designated normal utterances, if any."""
    entries = manifest.threshold_entries()
    if entries is None:
        return None
    return threshold_from_clips([_load(e, config) for e in entries], config, trimmed=True)


def analyze_corpus(manifest: CorpusManifest, config: AnalysisConfig,
                   warn: Optional[Callable[[str], None]] = None) -> CorpusResult:
    """Grade every (word, pathological speaker) pair against the normal speaker.

    Results follow manifest order (word list, then first appearance of each
    speaker) regardless of ``config.jobs``.
    """
    warnings: list[str] = []

    def note(msg):
        warnings.append(msg)
        log.warning(msg)
        if warn is not None:
            warn(msg)

    threshold = config.threshold
    if threshold is None:
        threshold = corpus_threshold(manifest, config)
    if threshold is None:
        raise AnalysisError("no threshold: supply one or designate three threshold utterances")

    tasks = []
    have_normal = False
    for word in manifest.words:
        normal = manifest.find(word, manifest.normal_speaker)
        if not normal:
            note(f"word {word!r}: no normal recording; skipped")
            continue
        have_normal = True
        if len(normal) > 1:
            note(f"word {word!r}: using normal repetition {normal[0].repetition} of {len(normal)}")
        speakers = [s for s in manifest.pathological_speakers() if manifest.find(word, s)]
        if not speakers:
            note(f"word {word!r}: no pathological recording; skipped")
            continue
        for spk in speakers:
            hits = manifest.find(word, spk)
            if len(hits) > 1:
                note(f"word {word!r}, speaker {spk!r}: using repetition {hits[0].repetition} of {len(hits)}")
            tasks.append((word, normal[0], hits[0]))
    if not have_normal:
        raise AnalysisError("no normal recording for any word")

    def run(task):
        word, ref_entry, sub_entry = task
        ref = _load(ref_entry, config)
        sub = _load(sub_entry, config)
        msgs = []
        if ref.sample_rate != sub.sample_rate:
            msgs.append(
                f"word {word!r}, speaker {sub_entry.speaker_id!r}: sample rate "
                f"{sub.sample_rate} Hz differs from normal {ref.sample_rate} Hz; comparing raw samples"
            )
        t = config.word_thresholds.get(word, threshold)
        stats = analyze_pair(ref, sub, config, t, normal_trimmed=True, subject_trimmed=True)
        result = WordResult(word, sub_entry.speaker_id, stats.raw_ratio, stats.normalized_ratio,
                            classify_deviation(stats.normalized_ratio))
        return result, msgs

    if config.jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = list(pool.map(run, tasks))
    else:
        outcomes = [run(t) for t in tasks]

    words = []
    for result, msgs in outcomes:
        for m in msgs:
            note(m)
        words.append(result)
    summaries = summarize(words)
    return CorpusResult(words, summaries, float(threshold), warnings)


def summarize(results: Iterable[WordResult]) -> list[SubjectSummary]:
    """One summary per speaker, in order of first appearance."""
    by_speaker: dict[str, list[WordResult]] = {}
    for r in results:
        by_speaker.setdefault(r.speaker_id, []).append(r)
    return [aggregate_subject(rs) for rs in by_speaker.values()]
