"""Numpy implementations of the envelope and ratio kernels.

Used whenever the compiled ``_kernels`` extension is unavailable, and as the
cross-check for it in the test suite.
"""
import numpy as np

BACKEND = "python"


def block_extrema(x, block_size):
    """Per-block (max_pos, max_val, min_pos, min_val), first occurrence on ties."""
    nblocks = x.shape[0] // block_size
    blocks = x[: nblocks * block_size].reshape(nblocks, block_size)
    offset = np.arange(nblocks, dtype=np.int64) * block_size
    imax = np.argmax(blocks, axis=1)
    imin = np.argmin(blocks, axis=1)
    rows = np.arange(nblocks)
    return (
        offset + imax.astype(np.int64),
        blocks[rows, imax].copy(),
        offset + imin.astype(np.int64),
        blocks[rows, imin].copy(),
    )


def interpolate_anchors(idx, val, length):
    """Piecewise-linear fill through (idx, val); constant hold outside the anchors."""
    idx = np.asarray(idx, dtype=np.int64)
    val = np.asarray(val, dtype=np.float64)
    out = np.empty(length, dtype=np.float64)
    out[: idx[0]] = val[0]
    out[idx[-1] :] = val[-1]
    if idx.shape[0] > 1:
        n = np.arange(idx[0], idx[-1], dtype=np.int64)
        seg = np.searchsorted(idx, n, side="right") - 1
        i0 = idx[seg]
        v0 = val[seg]
        v1 = val[seg + 1]
        span = (idx[seg + 1] - i0).astype(np.float64)
        t = (n - i0).astype(np.float64) / span
        out[idx[0] : idx[-1]] = v0 + t * (v1 - v0)
    return out


def masked_ratio_sum(subject, reference, epsilon_rel):
    """Sum of |s|/|r| over samples with |r| >= epsilon_rel * max|r| (and |r| > 0)."""
    r = np.abs(reference)
    peak = r.max() if r.size else 0.0
    keep = (r >= epsilon_rel * peak) & (r > 0.0)
    count = int(np.count_nonzero(keep))
    if count == 0:
        return 0.0, 0
    total = float(np.sum(np.abs(subject[keep]) / r[keep]))
    return total, count
