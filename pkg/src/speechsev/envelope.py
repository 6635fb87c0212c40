"""Block-wise max/min speech envelope.

The signal is cut to a whole number of blocks, each block contributes its
maximum and minimum sample as anchors, and the envelope is the single
piecewise-linear curve through all anchors in sample order.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import kernels
from .signal_io import AudioClip

__all__ = [
    "ANCHOR_RULES",
    "DEFAULT_BLOCK_SIZE",
    "BlockExtrema",
    "Envelope",
    "block_extrema",
    "build_envelope",
    "envelope_csv",
    "anchors_csv",
    "extrema_anchors",
    "truncate_to_block_multiple",
    "upper_anchors",
]

DEFAULT_BLOCK_SIZE = 100


@dataclass(frozen=True)
class BlockExtrema:
    block_index: int
    max_pos: int
    max_val: float
    min_pos: int
    min_val: float


@dataclass(frozen=True, eq=False)
class Envelope:
    """Per-sample envelope values plus the anchors the curve passes through."""

    values: np.ndarray
    anchor_index: np.ndarray
    anchor_value: np.ndarray
    block_size: int = DEFAULT_BLOCK_SIZE

    def __len__(self):
        return self.values.shape[0]

    @property
    def anchors(self) -> list[tuple[int, float]]:
        return list(zip(self.anchor_index.tolist(), self.anchor_value.tolist()))


def _check_block_size(block_size):
    if int(block_size) != block_size or block_size < 1:
        raise ValueError("block_size must be a positive integer")


def truncate_to_block_multiple(clip: AudioClip, block_size: int = DEFAULT_BLOCK_SIZE) -> AudioClip:
    """Drop trailing samples so the length is a multiple of ``block_size``."""
    _check_block_size(block_size)
    n = len(clip)
    if n < block_size:
        raise ValueError(f"clip of {n} samples is shorter than one block ({block_size})")
    keep = (n // block_size) * block_size
    if keep == n:
        return clip
    return clip.with_samples(clip.samples[:keep])


def _extrema_arrays(samples: np.ndarray, block_size: int):
    if samples.shape[0] % block_size:
        raise ValueError(
            f"length {samples.shape[0]} is not a multiple of block_size {block_size}"
        )
    return kernels.block_extrema(np.ascontiguousarray(samples, dtype=np.float64), int(block_size))


def block_extrema(clip: AudioClip, block_size: int = DEFAULT_BLOCK_SIZE) -> list[BlockExtrema]:
    """One record per block; positions are absolute and first-occurrence."""
    _check_block_size(block_size)
    max_pos, max_val, min_pos, min_val = _extrema_arrays(clip.samples, block_size)
    return [
        BlockExtrema(b, int(max_pos[b]), float(max_val[b]), int(min_pos[b]), float(min_val[b]))
        for b in range(max_pos.shape[0])
    ]


def extrema_anchors(max_pos, max_val, min_pos, min_val):
    """Anchor rule: both extrema of every block, in sample order.

    A block whose max and min share a position (constant block) yields a
    single anchor. Returns (index, value) arrays.
    """
    first_is_max = max_pos <= min_pos
    lo_pos = np.where(first_is_max, max_pos, min_pos)
    lo_val = np.where(first_is_max, max_val, min_val)
    hi_pos = np.where(first_is_max, min_pos, max_pos)
    hi_val = np.where(first_is_max, min_val, max_val)
    idx = np.column_stack([lo_pos, hi_pos]).ravel()
    val = np.column_stack([lo_val, hi_val]).ravel()
    distinct = np.ones(idx.shape[0], dtype=bool)
    distinct[1::2] = hi_pos != lo_pos
    return np.ascontiguousarray(idx[distinct], dtype=np.int64), np.ascontiguousarray(val[distinct])


def upper_anchors(max_pos, max_val, min_pos, min_val):
    """Alternative rule: block maxima only (an upper envelope).

    Unlike the default curve this one does not swing through zero between
    a block's crest and trough, so per-sample ratios stay bounded under
    small perturbations.
    """
    return np.ascontiguousarray(max_pos, dtype=np.int64), np.ascontiguousarray(max_val)


ANCHOR_RULES = {"extrema": extrema_anchors, "upper": upper_anchors}


def build_envelope(clip: AudioClip, block_size: int = DEFAULT_BLOCK_SIZE, rule: str = "extrema") -> Envelope:
    """Envelope of ``clip`` after truncation to a whole number of blocks."""
    try:
        make_anchors = ANCHOR_RULES[rule]
    except KeyError:
        raise ValueError(f"unknown anchor rule {rule!r}; choose from {sorted(ANCHOR_RULES)}") from None
    clip = truncate_to_block_multiple(clip, block_size)
    x = clip.samples
    idx, val = make_anchors(*_extrema_arrays(x, block_size))
    values = kernels.interpolate_anchors(idx, val, x.shape[0])
    for a in (idx, val, values):
        a.setflags(write=False)
    return Envelope(values, idx, val, int(block_size))


def envelope_csv(clip: AudioClip, env: Envelope) -> str:
    """``sample_index,signal,envelope`` rows over the truncated signal."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample_index", "signal", "envelope"])
    x = clip.samples
    for i, (s, e) in enumerate(zip(x[: len(env)].tolist(), env.values.tolist())):
        w.writerow([i, repr(s), repr(e)])
    return buf.getvalue()


def anchors_csv(env: Envelope) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["anchor_index", "amplitude"])
    for i, v in env.anchors:
        w.writerow([i, repr(v)])
    return buf.getvalue()
