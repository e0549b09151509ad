"""Slow, direct reference implementations used to check the fast code.

None of these import the package's own helpers for the quantity being
checked; they recompute it from the definition.
"""

import itertools
import math

import numpy as np


def seal_bit(r, g, b, tau_r, tau_rg, tau_rb):
    # the three conjuncts, one pixel at a time, in Python floats
    r, g, b = float(r), float(g), float(b)
    return r >= tau_r and r >= tau_rg * g and r >= tau_rb * b


def dilate_brute(mask, k, t):
    h, w = mask.shape
    half = k // 2
    cur = mask.copy()
    for _ in range(t):
        nxt = np.zeros_like(cur)
        for y in range(h):
            for x in range(w):
                hit = False
                for dy in range(-half, half + 1):
                    for dx in range(-half, half + 1):
                        yy, xx = y + dy, x + dx
                        if 0 <= yy < h and 0 <= xx < w and cur[yy, xx]:
                            hit = True
                nxt[y, x] = hit
        cur = nxt
    return cur


def ssim_direct(a, b, size=11, sigma=1.5, peak=255.0):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = (size - 1) / 2.0
    win = np.empty((size, size))
    for i in range(size):
        for j in range(size):
            win[i, j] = math.exp(-((i - c) ** 2 + (j - c) ** 2) / (2 * sigma * sigma))
    win /= win.sum()
    c1, c2 = (0.01 * peak) ** 2, (0.03 * peak) ** 2
    vals = []
    for y in range(a.shape[0] - size + 1):
        for x in range(a.shape[1] - size + 1):
            pa = a[y:y + size, x:x + size]
            pb = b[y:y + size, x:x + size]
            ma = float((win * pa).sum())
            mb = float((win * pb).sum())
            va = float((win * (pa - ma) ** 2).sum())
            vb = float((win * (pb - mb) ** 2).sum())
            cov = float((win * (pa - ma) * (pb - mb)).sum())
            vals.append(((2 * ma * mb + c1) * (2 * cov + c2))
                        / ((ma * ma + mb * mb + c1) * (va + vb + c2)))
    return float(np.mean(vals))


def raster_iou(a, b, grid=30):
    """IoU by counting unit pixels of integer boxes ``(x, y, w, h)``."""
    def cells(box):
        x, y, w, h = box
        return {(i, j) for i in range(x, x + w) for j in range(y, y + h)
                if 0 <= i < grid and 0 <= j < grid}
    ca, cb = cells(a), cells(b)
    union = len(ca | cb)
    return len(ca & cb) / union if union else 0.0


def max_matching_brute(ious, threshold):
    """Largest one-to-one matching using only pairs with IoU >= threshold."""
    n_gt = len(ious)
    n_pred = len(ious[0]) if n_gt else 0
    best = 0
    # try every injection of a subset of gt into pred
    for k in range(min(n_gt, n_pred), 0, -1):
        for gts in itertools.combinations(range(n_gt), k):
            for preds in itertools.permutations(range(n_pred), k):
                if all(ious[g][p] >= threshold for g, p in zip(gts, preds)):
                    return k
    return best


def triple_overlap(boxes):
    """True if some point lies inside three of the half-open ``(x, y, w, h)`` boxes."""
    for a, b, c in itertools.combinations(boxes, 3):
        x0 = max(a[0], b[0], c[0])
        y0 = max(a[1], b[1], c[1])
        x1 = min(a[0] + a[2], b[0] + b[2], c[0] + c[2])
        y1 = min(a[1] + a[3], b[1] + b[3], c[1] + c[3])
        if x1 > x0 and y1 > y0:
            return True
    return False


def laplace_fill(img, mask, tol=1e-6, max_iter=20000):
    """Fill ``mask`` by Jacobi iteration of the discrete Laplace equation."""
    out = img.astype(np.float64).copy()
    h, w = mask.shape
    ys, xs = np.nonzero(mask)
    out[mask] = out[~mask].mean(axis=0)
    for _ in range(max_iter):
        prev = out.copy()
        for y, x in zip(ys, xs):
            acc = np.zeros(out.shape[2])
            n = 0
            for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w:
                    acc += prev[yy, xx]
                    n += 1
            out[y, x] = acc / n
        if np.abs(out - prev).max() < tol:
            break
    return out
