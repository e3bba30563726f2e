"""Compiled inner loops for projection and soft voting."""
import math

import numpy as np
from numba import njit


@njit(cache=True)
def scatter_min(key, flat, n_pixels):
    """Per pixel, the index of the point with the smallest ``key``; lowest index on ties.

    Points with ``flat < 0`` have no pixel. Returns -1 for empty pixels.
    """
    src = np.full(n_pixels, -1, dtype=np.int64)
    for i in range(flat.shape[0]):
        p = flat[i]
        if p < 0:
            continue
        j = src[p]
        if j < 0 or key[i] < key[j]:
            src[p] = i
    return src


@njit(cache=True)
def _pixel_order(rows, cols, has_pixel, w, n_pixels):
    # counting sort of points by pixel, for cache locality in soft_vote
    counts = np.zeros(n_pixels + 1, dtype=np.int64)
    n_in = 0
    for i in range(rows.shape[0]):
        if has_pixel[i]:
            counts[rows[i] * w + cols[i] + 1] += 1
            n_in += 1
    for p in range(n_pixels):
        counts[p + 1] += counts[p]
    order = np.empty(n_in, dtype=np.int64)
    for i in range(rows.shape[0]):
        if has_pixel[i]:
            p = rows[i] * w + cols[i]
            order[counts[p]] = i
            counts[p] += 1
    return order


@njit(cache=True, error_model="numpy")
def soft_vote(xyz, rows, cols, has_pixel, valid, pix_xyz, pix_scores, k, inv_two_var, manhattan, wrap):
    """Gaussian-weighted window vote, divided by the number of voting pixels.

    Window pixels are visited row-major; each point's accumulation order is
    fixed regardless of the traversal order over points.
    """
    n = xyz.shape[0]
    h, w = valid.shape
    c = pix_scores.shape[2]
    half = k // 2
    out = np.zeros((n, c))
    for i in _pixel_order(rows, cols, has_pixel, w, h * w):
        o = out[i]
        m = 0
        px, py, pz = xyz[i, 0], xyz[i, 1], xyz[i, 2]
        ri, ci = rows[i], cols[i]
        for dr in range(-half, half + 1):
            rr = ri + dr
            if rr < 0 or rr >= h:
                continue
            for dc in range(-half, half + 1):
                q = ci + dc
                if q < 0 or q >= w:
                    if not wrap:
                        continue
                    q %= w
                if not valid[rr, q]:
                    continue
                ex = px - pix_xyz[rr, q, 0]
                ey = py - pix_xyz[rr, q, 1]
                ez = pz - pix_xyz[rr, q, 2]
                if manhattan:
                    d = abs(ex) + abs(ey) + abs(ez)
                else:
                    d = math.sqrt(ex * ex + ey * ey + ez * ez)
                weight = math.exp(-(d * d) * inv_two_var)
                s = pix_scores[rr, q]
                for j in range(c):
                    o[j] += weight * s[j]
                m += 1
        if m > 0:
            for j in range(c):
                o[j] = o[j] / m
    return out


@njit(cache=True)
def argmax_rows(s, skip, fill):
    """Row argmax ignoring column ``skip`` (-1 for none), first index on ties.

    All-zero rows get ``fill``.
    """
    n, c = s.shape
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        best = -1
        seen = False
        for j in range(c):
            v = s[i, j]
            if v != 0.0:
                seen = True
            if j == skip:
                continue
            if best < 0 or v > s[i, best]:
                best = j
        out[i] = best if seen and best >= 0 else fill
    return out
