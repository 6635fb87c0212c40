"""Deterministic synthetic utterances and degradations for testing.

Noise comes from numpy's PCG64 generator (``numpy.random.default_rng``)
seeded per call, so fixtures are reproducible across runs and platforms.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .signal_io import AudioClip

__all__ = ["DegradeKind", "SynthKind", "SynthSpec", "degrade", "generate"]

FADE_FRACTION = 0.10


class SynthKind(str, Enum):
    SINE_BURST = "sine"
    NOISE_BURST = "noise"
    SCALED_COPY = "scaled"
    COMPOSITE = "composite"


class DegradeKind(str, Enum):
    AMPLITUDE_SCALE = "scale"
    ADDITIVE_NOISE = "noise"
    TAIL_DROP = "taildrop"


@dataclass(frozen=True)
class SynthSpec:
    """What to synthesize.

    ``source`` feeds SCALED_COPY; ``components`` are summed for COMPOSITE
    and must share duration and sample rate.
    """

    kind: SynthKind
    duration_samples: int
    sample_rate: int = 8000
    amplitude: float = 0.5
    frequency: float = 440.0
    seed: int = 0
    scale: float = 1.0
    source: Optional[AudioClip] = None
    components: tuple["SynthSpec", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", SynthKind(self.kind))
        if self.duration_samples < 1:
            raise ValueError("duration_samples must be positive")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if not 0.0 <= self.amplitude <= 1.0:
            raise ValueError("amplitude must lie in [0, 1]")
        if self.kind is SynthKind.SCALED_COPY:
            if self.source is None:
                raise ValueError("scaled copy needs a source clip")
            if not self.scale > 0:
                raise ValueError("scale must be positive")


def _fade(n: int) -> np.ndarray:
    ramp_len = int(n * FADE_FRACTION)
    gain = np.ones(n)
    if ramp_len > 0:
        ramp = np.arange(ramp_len) / ramp_len
        gain[:ramp_len] = ramp
        gain[n - ramp_len:] = ramp[::-1]
    return gain


def _checked(x: np.ndarray, spec: SynthSpec) -> AudioClip:
    peak = float(np.max(np.abs(x))) if x.size else 0.0
    if peak > 1.0:
        raise ValueError(f"synthesized peak {peak:.6g} exceeds full scale")
    return AudioClip(x, spec.sample_rate, f"synth:{spec.kind.value}")


def _samples(spec: SynthSpec) -> np.ndarray:
    n = spec.duration_samples
    if spec.kind is SynthKind.SINE_BURST:
        t = np.arange(n) / spec.sample_rate
        return spec.amplitude * np.sin(2.0 * np.pi * spec.frequency * t) * _fade(n)
    if spec.kind is SynthKind.NOISE_BURST:
        rng = np.random.default_rng(spec.seed)
        return rng.uniform(-spec.amplitude, spec.amplitude, n) * _fade(n)
    if spec.kind is SynthKind.SCALED_COPY:
        src = spec.source.samples
        out = np.zeros(n)
        m = min(n, src.shape[0])
        out[:m] = src[:m]
        return spec.scale * out
    total = np.zeros(n)
    for comp in spec.components:
        if comp.duration_samples != n or comp.sample_rate != spec.sample_rate:
            raise ValueError("composite components must match duration and sample rate")
        total += _samples(comp)
    return total


def generate(spec: SynthSpec) -> AudioClip:
    """Deterministic clip for ``spec``; rejects anything that would clip."""
    return _checked(_samples(spec), spec)


def degrade(clip: AudioClip, kind, magnitude: float, seed: int = 0) -> AudioClip:
    """Apply one controlled degradation.

    AMPLITUDE_SCALE multiplies by ``magnitude`` (> 0); ADDITIVE_NOISE adds
    uniform noise of peak ``magnitude`` in [0, 1]; TAIL_DROP zeroes the
    trailing ``magnitude`` fraction in [0, 1].
    """
    kind = DegradeKind(kind)
    x = clip.samples
    if kind is DegradeKind.AMPLITUDE_SCALE:
        if not magnitude > 0:
            raise ValueError("amplitude scale must be positive")
        y = x * magnitude
    elif kind is DegradeKind.ADDITIVE_NOISE:
        if not 0.0 <= magnitude <= 1.0:
            raise ValueError("noise peak must lie in [0, 1]")
        rng = np.random.default_rng(seed)
        y = x + rng.uniform(-magnitude, magnitude, x.shape[0])
    else:
        if not 0.0 <= magnitude <= 1.0:
            raise ValueError("tail-drop fraction must lie in [0, 1]")
        y = x.copy()
        drop = int(round(magnitude * x.shape[0]))
        if drop:
            y[x.shape[0] - drop:] = 0.0
    if np.max(np.abs(y)) > 1.0:
        raise ValueError(f"{kind.value} degradation would exceed full scale")
    return clip.with_samples(y)
