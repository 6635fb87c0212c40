"""Loading, trimming and organizing speech recordings.

Samples are held as float64 numpy arrays normalized to [-1, 1] by the
format's full-scale value. All functions return new clips; nothing mutates
its input.
"""
from __future__ import annotations

import json
import struct
import wave
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.io import wavfile

__all__ = [
    "AudioClip",
    "CorpusManifest",
    "EmptyAudioError",
    "EntryDescriptor",
    "ManifestError",
    "NoSpeechError",
    "Role",
    "UnsupportedEncodingError",
    "UtteranceRecord",
    "WavReadError",
    "equalize_length",
    "load_manifest",
    "load_wav",
    "select_reference",
    "signal_energy",
    "trim_endpoints",
    "write_wav",
]

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE


class WavReadError(Exception):
    """The file could not be opened or is not a RIFF/WAVE file."""


class UnsupportedEncodingError(WavReadError):
    """The WAV file uses a non-PCM (compressed or unknown) encoding."""


class EmptyAudioError(WavReadError):
    """The WAV data chunk holds no sample frames."""


class NoSpeechError(ValueError):
    """No frame of the clip reaches the endpoint energy gate."""


class ManifestError(ValueError):
    """The corpus manifest is malformed or inconsistent."""


@dataclass(frozen=True, eq=False)
class AudioClip:
    """A mono sample sequence in [-1, 1] with its sample rate."""

    samples: np.ndarray
    sample_rate: int
    source_path: str = ""

    def __post_init__(self):
        x = np.ascontiguousarray(self.samples, dtype=np.float64)
        if x.ndim != 1:
            raise ValueError("AudioClip samples must be one-dimensional")
        if x.size == 0:
            raise ValueError("AudioClip samples must be non-empty")
        if not np.all(np.isfinite(x)):
            raise ValueError("AudioClip samples must be finite")
        if np.any(np.abs(x) > 1.0):
            raise ValueError("AudioClip samples must lie in [-1, 1]")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    def __len__(self):
        return self.samples.shape[0]

    def with_samples(self, samples) -> "AudioClip":
        return AudioClip(samples, self.sample_rate, self.source_path)


def _riff_format_tag(path: Path) -> int:
    """Return the effective wFormatTag of a RIFF/WAVE file."""
    try:
        with open(path, "rb") as fid:
            head = fid.read(12)
            if len(head) < 12 or head[:4] not in (b"RIFF", b"RIFX") or head[8:12] != b"WAVE":
                raise WavReadError(f"{path}: not a RIFF/WAVE file")
            endian = "<" if head[:4] == b"RIFF" else ">"
            while True:
                chunk = fid.read(8)
                if len(chunk) < 8:
                    raise WavReadError(f"{path}: missing fmt chunk")
                cid = chunk[:4]
                size = struct.unpack(endian + "I", chunk[4:])[0]
                if cid == b"fmt ":
                    body = fid.read(size)
                    if len(body) < 16:
                        raise WavReadError(f"{path}: truncated fmt chunk")
                    tag = struct.unpack(endian + "H", body[:2])[0]
                    if tag == WAVE_FORMAT_EXTENSIBLE and len(body) >= 26:
                        tag = struct.unpack(endian + "H", body[24:26])[0]
                    return tag
                fid.seek(size + (size & 1), 1)
    except OSError as exc:
        raise WavReadError(f"{path}: {exc.strerror or exc}") from exc


def _full_scale(data: np.ndarray) -> np.ndarray:
    if data.dtype == np.uint8:
        return (data.astype(np.float64) - 128.0) / 128.0
    if np.issubdtype(data.dtype, np.signedinteger):
        # scipy left-justifies 24-bit samples into int32 containers
        return data.astype(np.float64) / float(2 ** (8 * data.dtype.itemsize - 1))
    return data.astype(np.float64)


def load_wav(path) -> AudioClip:
    """Read a PCM or float WAV file as a normalized mono clip.

    Multi-channel input is averaged to mono. Float data outside [-1, 1]
    is clipped to full scale.
    """
    path = Path(path)
    tag = _riff_format_tag(path)
    if tag not in (WAVE_FORMAT_PCM, WAVE_FORMAT_IEEE_FLOAT):
        raise UnsupportedEncodingError(f"{path}: unsupported WAV encoding 0x{tag:04x}")
    try:
        rate, data = wavfile.read(path)
    except (ValueError, OSError) as exc:
        raise WavReadError(f"{path}: {exc}") from exc
    if data.shape[0] == 0:
        raise EmptyAudioError(f"{path}: data chunk has no samples")
    x = _full_scale(data)
    if x.ndim == 2:
        x = x.mean(axis=1)
    if data.dtype.kind == "f":
        x = np.clip(x, -1.0, 1.0)
    return AudioClip(x, int(rate), str(path))


def write_wav(path, clip: AudioClip, bits="float") -> None:
    """Write a mono clip as PCM (8/16/24/32-bit) or 32-bit float WAV."""
    x = clip.samples
    if bits == "float":
        wavfile.write(path, clip.sample_rate, x.astype(np.float32))
        return
    bits = int(bits)
    if bits not in (8, 16, 24, 32):
        raise ValueError(f"unsupported bit depth {bits}")
    scale = float(2 ** (bits - 1))
    q = np.clip(np.round(x * scale), -scale, scale - 1).astype(np.int64)
    if bits == 8:
        raw = (q + 128).astype(np.uint8).tobytes()
    elif bits == 24:
        b = q.astype("<i4").view(np.uint8).reshape(-1, 4)[:, :3]
        raw = b.tobytes()
    else:
        raw = q.astype(f"<i{bits // 8}").tobytes()
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(bits // 8)
        w.setframerate(clip.sample_rate)
        w.writeframes(raw)


def trim_endpoints(clip: AudioClip, rel_threshold: float = 0.05, frame_len: int = 100) -> AudioClip:
    """Keep the span from the first to the last frame whose short-time energy
    (mean of squares, hop = frame_len) reaches ``rel_threshold`` times the
    loudest frame. A trailing partial frame counts as a frame.
    """
    if not 0.0 < rel_threshold < 1.0:
        raise ValueError("rel_threshold must lie in (0, 1)")
    if frame_len < 1 or frame_len > len(clip):
        raise ValueError("frame_len must be in [1, len(clip)]")
    x = clip.samples
    n = x.shape[0]
    nframes = -(-n // frame_len)
    sq = np.zeros(nframes * frame_len)
    sq[:n] = x * x
    sums = sq.reshape(nframes, frame_len).sum(axis=1)
    lengths = np.full(nframes, frame_len, dtype=np.float64)
    lengths[-1] = n - (nframes - 1) * frame_len
    energy = sums / lengths
    peak = energy.max()
    if peak <= 0.0:
        raise NoSpeechError("no speech detected: clip is silent")
    active = np.flatnonzero(energy >= rel_threshold * peak)
    start = int(active[0]) * frame_len
    stop = min(n, (int(active[-1]) + 1) * frame_len)
    return clip.with_samples(x[start:stop])


def equalize_length(subject: AudioClip, reference_len: int) -> AudioClip:
    """Truncate or zero-pad at the end to exactly ``reference_len`` samples."""
    if reference_len <= 0:
        raise ValueError("reference_len must be positive")
    x = subject.samples
    if x.shape[0] >= reference_len:
        return subject.with_samples(x[:reference_len])
    out = np.zeros(reference_len)
    out[: x.shape[0]] = x
    return subject.with_samples(out)


def signal_energy(clip: AudioClip) -> float:
    """Sum of squared samples."""
    x = clip.samples
    return float(np.dot(x, x))


def select_reference(clips: Sequence[tuple[str, AudioClip]]) -> str:
    """Speaker whose energy is closest to the cohort mean (earliest on ties)."""
    if not clips:
        raise ValueError("select_reference needs at least one clip")
    energies = np.array([signal_energy(c) for _, c in clips])
    distance = np.abs(energies - energies.mean())
    # argmin returns the first minimum
    return clips[int(np.argmin(distance))][0]


class Role(str, Enum):
    NORMAL = "normal"
    PATHOLOGICAL = "pathological"


@dataclass(frozen=True)
class EntryDescriptor:
    """One manifest entry: where an utterance lives, not its audio."""

    word: str
    speaker_id: str
    role: Role
    repetition: int
    path: Path
    start_sample: Optional[int] = None
    end_sample: Optional[int] = None

    def load(self) -> "UtteranceRecord":
        clip = load_wav(self.path)
        if self.start_sample is not None or self.end_sample is not None:
            start = self.start_sample or 0
            stop = self.end_sample if self.end_sample is not None else len(clip)
            if not 0 <= start < stop <= len(clip):
                raise ManifestError(
                    f"{self.path}: sample range [{start}, {stop}) outside clip of {len(clip)}"
                )
            clip = clip.with_samples(clip.samples[start:stop])
        return UtteranceRecord(self.word, self.speaker_id, self.role, self.repetition, clip)

    @property
    def manual_bounds(self) -> bool:
        return self.start_sample is not None or self.end_sample is not None


@dataclass(frozen=True)
class UtteranceRecord:
    word: str
    speaker_id: str
    role: Role
    repetition: int
    clip: AudioClip


@dataclass(frozen=True)
class CorpusManifest:
    words: tuple[str, ...]
    normal_speaker: str
    entries: tuple[EntryDescriptor, ...]
    threshold_word: Optional[str] = None
    threshold_repetitions: Optional[tuple[int, int, int]] = None
    root: Path = field(default=Path("."))

    def find(self, word: str, speaker_id: str, repetition: Optional[int] = None):
        """Entries for (word, speaker), sorted by repetition."""
        hits = [
            e for e in self.entries
            if e.word == word and e.speaker_id == speaker_id
            and (repetition is None or e.repetition == repetition)
        ]
        return sorted(hits, key=lambda e: e.repetition)

    def threshold_entries(self) -> Optional[list[EntryDescriptor]]:
        if self.threshold_repetitions is None:
            return None
        out = []
        for rep in self.threshold_repetitions:
            hit = self.find(self.threshold_word, self.normal_speaker, rep)
            out.append(hit[0])
        return out

    def pathological_speakers(self) -> list[str]:
        seen: dict[str, None] = {}
        for e in self.entries:
            if e.role is Role.PATHOLOGICAL:
                seen.setdefault(e.speaker_id, None)
        return list(seen)


def _require(cond, msg):
    if not cond:
        raise ManifestError(msg)


def load_manifest(path) -> CorpusManifest:
    """Parse and validate a JSON corpus manifest; paths resolve against its directory."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(f"{path}: cannot read manifest ({exc.strerror or exc})") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON ({exc})") from exc
    return parse_manifest(doc, root=path.parent)


def parse_manifest(doc: dict, root=Path(".")) -> CorpusManifest:
    root = Path(root)
    _require(isinstance(doc, dict), "manifest must be a JSON object")
    words = doc.get("words")
    _require(isinstance(words, list) and words and all(isinstance(w, str) for w in words),
             "manifest 'words' must be a non-empty list of strings")
    _require(len(set(words)) == len(words), "manifest 'words' contains duplicates")
    normal = doc.get("normal_speaker")
    _require(isinstance(normal, str) and normal, "manifest 'normal_speaker' must be a string")

    raw_entries = doc.get("entries")
    _require(isinstance(raw_entries, list), "manifest 'entries' must be a list")
    entries = []
    keys = set()
    for i, e in enumerate(raw_entries):
        _require(isinstance(e, dict), f"entry {i} must be an object")
        for k in ("word", "speaker_id", "role", "repetition", "path"):
            _require(k in e, f"entry {i} missing '{k}'")
        _require(e["word"] in words, f"entry {i}: word {e['word']!r} not in 'words'")
        try:
            role = Role(e["role"])
        except ValueError:
            raise ManifestError(f"entry {i}: role must be 'normal' or 'pathological'") from None
        rep = e["repetition"]
        _require(isinstance(rep, int) and not isinstance(rep, bool) and rep >= 1,
                 f"entry {i}: repetition must be a positive integer")
        key = (e["word"], e["speaker_id"], rep)
        _require(key not in keys, f"entry {i}: duplicate (word, speaker, repetition) {key}")
        keys.add(key)
        _require((role is Role.NORMAL) == (e["speaker_id"] == normal),
                 f"entry {i}: role disagrees with normal_speaker")
        bounds = []
        for k in ("start_sample", "end_sample"):
            v = e.get(k)
            _require(v is None or (isinstance(v, int) and v >= 0),
                     f"entry {i}: {k} must be a non-negative integer")
            bounds.append(v)
        entries.append(EntryDescriptor(
            e["word"], str(e["speaker_id"]), role, rep, root / e["path"], *bounds,
        ))

    tword = doc.get("threshold_word")
    treps = doc.get("threshold_repetitions")
    if treps is not None or tword is not None:
        _require(isinstance(tword, str) and tword in words,
                 "manifest 'threshold_word' must name one of 'words'")
        _require(isinstance(treps, list) and len(treps) == 3
                 and all(isinstance(r, int) for r in treps) and len(set(treps)) == 3,
                 "manifest 'threshold_repetitions' must list exactly 3 distinct integers")
        for r in treps:
            _require((tword, normal, r) in keys,
                     f"threshold utterance {tword!r} repetition {r} by {normal!r} not in entries")
        treps = tuple(treps)
    return CorpusManifest(tuple(words), normal, tuple(entries), tword, treps, root)
