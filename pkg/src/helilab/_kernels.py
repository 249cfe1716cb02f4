"""Dense pairwise summation kernels.

Parallelism is over targets only; each target accumulates its sources
sequentially in cell order, so results are bit-identical for any worker
count.  Reductions that cross targets are done by the callers in fixed
array order.
"""
from __future__ import annotations

import os

os.environ.setdefault("NUMBA_NUM_THREADS", "16")

import numba  # noqa: E402
import numpy as np  # noqa: E402
from numba import njit, prange  # noqa: E402

numba.config.THREADING_LAYER = "workqueue"

_MAX_THREADS = int(os.environ["NUMBA_NUM_THREADS"])


def set_threads(n: int) -> int:
    """Clamp and apply the worker count; returns the value actually set."""
    n = max(1, min(int(n), _MAX_THREADS))
    numba.set_num_threads(n)
    return n


@njit(parallel=True, cache=True)
def pair_cross_sum(src, val, w, tgt, eps2, skip2):
    """out[i] = sum_j w_j * val_j x (tgt_i - src_j) / (|tgt_i - src_j|^2 + eps2)^{3/2}.

    With eps2 == 0 source points closer to the target than sqrt(skip2) are
    skipped (principal-value rule for coincident cells).
    """
    m = tgt.shape[0]
    n = src.shape[0]
    out = np.zeros((m, 3))
    for i in prange(m):
        tx, ty, tz = tgt[i, 0], tgt[i, 1], tgt[i, 2]
        a0 = 0.0
        a1 = 0.0
        a2 = 0.0
        for j in range(n):
            dx = tx - src[j, 0]
            dy = ty - src[j, 1]
            dz = tz - src[j, 2]
            r2 = dx * dx + dy * dy + dz * dz
            if eps2 == 0.0 and r2 < skip2:
                continue
            q = r2 + eps2
            f = w[j] / (q * np.sqrt(q))
            a0 += (val[j, 1] * dz - val[j, 2] * dy) * f
            a1 += (val[j, 2] * dx - val[j, 0] * dz) * f
            a2 += (val[j, 0] * dy - val[j, 1] * dx) * f
        out[i, 0] = a0
        out[i, 1] = a1
        out[i, 2] = a2
    return out


@njit(parallel=True, cache=True)
def pair_inv_dist_sum(src, val, w, tgt, eps2, skip2):
    """out[i] = sum_j w_j * val_j / sqrt(|tgt_i - src_j|^2 + eps2)."""
    m = tgt.shape[0]
    n = src.shape[0]
    out = np.zeros((m, 3))
    for i in prange(m):
        tx, ty, tz = tgt[i, 0], tgt[i, 1], tgt[i, 2]
        a0 = 0.0
        a1 = 0.0
        a2 = 0.0
        for j in range(n):
            dx = tx - src[j, 0]
            dy = ty - src[j, 1]
            dz = tz - src[j, 2]
            r2 = dx * dx + dy * dy + dz * dz
            if eps2 == 0.0 and r2 < skip2:
                continue
            f = w[j] / np.sqrt(r2 + eps2)
            a0 += val[j, 0] * f
            a1 += val[j, 1] * f
            a2 += val[j, 2] * f
        out[i, 0] = a0
        out[i, 1] = a1
        out[i, 2] = a2
    return out


@njit(parallel=True, cache=True)
def pair_triple_partials(pts, val, w, skip2):
    """part[i] = sum_{j != i} w_i w_j val_i x val_j . (pts_i - pts_j) / |.|^3.

    Per-point partials; the caller sums them in index order.
    """
    n = pts.shape[0]
    part = np.zeros(n)
    for i in prange(n):
        xi, yi, zi = pts[i, 0], pts[i, 1], pts[i, 2]
        vi0, vi1, vi2 = val[i, 0], val[i, 1], val[i, 2]
        acc = 0.0
        for j in range(n):
            dx = xi - pts[j, 0]
            dy = yi - pts[j, 1]
            dz = zi - pts[j, 2]
            r2 = dx * dx + dy * dy + dz * dz
            if r2 < skip2:
                continue
            f = w[j] / (r2 * np.sqrt(r2))
            cx = vi1 * val[j, 2] - vi2 * val[j, 1]
            cy = vi2 * val[j, 0] - vi0 * val[j, 2]
            cz = vi0 * val[j, 1] - vi1 * val[j, 0]
            acc += (cx * dx + cy * dy + cz * dz) * f
        part[i] = acc * w[i]
    return part
