"""Pure-Python fast-marching kernels.

This is the fallback used when the compiled ``_fmm_ext`` module is missing.
It performs exactly the same floating-point operations in the same order as
the compiled version, so both produce bit-identical results.
"""

import heapq
import math

import numpy as np

KNOWN = 0
BAND = 1
INSIDE = 2
BLOCKED = 3

INF = 1.0e6
EPS = 1.0e-6


def _pair(a, b):
    # upwind quadratic update from one vertical and one horizontal neighbour
    if a is None:
        if b is None:
            return INF
        return 1.0 + b
    if b is None:
        return 1.0 + a
    d = a - b
    if d * d <= 1.0:
        return (a + b + math.sqrt(2.0 - d * d)) * 0.5
    if a < b:
        return 1.0 + a
    return 1.0 + b


def _arrival(T, flag, h, w, i, j):
    idx = i * w + j
    up = T[idx - w] if i > 0 and flag[idx - w] == KNOWN else None
    down = T[idx + w] if i < h - 1 and flag[idx + w] == KNOWN else None
    left = T[idx - 1] if j > 0 and flag[idx - 1] == KNOWN else None
    right = T[idx + 1] if j < w - 1 and flag[idx + 1] == KNOWN else None
    best = _pair(up, left)
    s = _pair(up, right)
    if s < best:
        best = s
    s = _pair(down, left)
    if s < best:
        best = s
    s = _pair(down, right)
    if s < best:
        best = s
    return best


def _neighbours(idx, h, w):
    i, j = divmod(idx, w)
    if i > 0:
        yield idx - w
    if j > 0:
        yield idx - 1
    if j < w - 1:
        yield idx + 1
    if i < h - 1:
        yield idx + w


def _init_front(m, h, w):
    n = h * w
    flag = [KNOWN] * n
    T = [0.0] * n
    for idx in range(n):
        if m[idx]:
            flag[idx] = INSIDE
            T[idx] = INF
    heap = []
    for idx in range(n):
        if m[idx]:
            continue
        for nb in _neighbours(idx, h, w):
            if m[nb]:
                flag[idx] = BAND
                heap.append((0.0, idx))
                break
    return flag, T, heap


def eikonal(mask):
    """Arrival time of a front starting just outside ``mask``.

    Returns a float64 array: 0 outside the mask, the marched distance inside,
    ``inf`` for mask pixels the front never reaches.
    """
    h, w = mask.shape
    m = mask.ravel().tolist()
    flag, T, heap = _init_front(m, h, w)
    while heap:
        _, idx = heapq.heappop(heap)
        flag[idx] = KNOWN
        for nb in _neighbours(idx, h, w):
            if flag[nb] == INSIDE:
                i, j = divmod(nb, w)
                t = _arrival(T, flag, h, w, i, j)
                T[nb] = t
                flag[nb] = BAND
                heapq.heappush(heap, (t, nb))
    out = np.array(T, dtype=np.float64).reshape(h, w)
    out[mask & (out >= INF)] = np.inf
    return out


def _outside_distance(m, flag, T, heap, h, w, limit):
    # march outwards from the same band to get signed T for known pixels
    n = h * w
    oflag = [BLOCKED if m[idx] else INSIDE for idx in range(n)]
    dist = [0.0] * n
    for _, idx in heap:
        oflag[idx] = BAND
    work = list(heap)
    while work:
        d, idx = heapq.heappop(work)
        if d > limit:
            break
        oflag[idx] = KNOWN
        for nb in _neighbours(idx, h, w):
            if oflag[nb] == INSIDE:
                i, j = divmod(nb, w)
                t = _arrival(dist, oflag, h, w, i, j)
                dist[nb] = t
                oflag[nb] = BAND
                heapq.heappush(work, (t, nb))
    for idx in range(n):
        if flag[idx] == KNOWN:
            T[idx] = -INF if oflag[idx] == INSIDE else -dist[idx]


def _grad_t(T, flag, h, w, i, j):
    idx = i * w + j
    t = T[idx]
    has_l = j > 0 and flag[idx - 1] != INSIDE
    has_r = j < w - 1 and flag[idx + 1] != INSIDE
    if has_l and has_r:
        gx = (T[idx + 1] - T[idx - 1]) * 0.5
    elif has_r:
        gx = T[idx + 1] - t
    elif has_l:
        gx = t - T[idx - 1]
    else:
        gx = 0.0
    has_u = i > 0 and flag[idx - w] != INSIDE
    has_d = i < h - 1 and flag[idx + w] != INSIDE
    if has_u and has_d:
        gy = (T[idx + w] - T[idx - w]) * 0.5
    elif has_d:
        gy = T[idx + w] - t
    elif has_u:
        gy = t - T[idx - w]
    else:
        gy = 0.0
    return gx, gy


def _fill_pixel(I, T, flag, h, w, i, j, radius, source, gradient):
    idx = i * w + j
    gx, gy = _grad_t(T, flag, h, w, i, j)
    norm = math.sqrt(gx * gx + gy * gy)
    if norm > 0.0:
        nx = gx / norm
        ny = gy / norm
    else:
        nx = 0.0
        ny = 0.0
    tp = T[idx]
    r = int(math.floor(radius))
    r2 = radius * radius
    acc0 = acc1 = acc2 = 0.0
    wsum = 0.0
    for qi in range(max(i - r, 0), min(i + r, h - 1) + 1):
        ry = i - qi
        for qj in range(max(j - r, 0), min(j + r, w - 1) + 1):
            q = qi * w + qj
            if q == idx or flag[q] == INSIDE:
                continue
            rx = j - qj
            len2 = float(rx * rx + ry * ry)
            if len2 > r2:
                continue
            length = math.sqrt(len2)
            direction = (nx * rx + ny * ry) / length
            if direction < EPS:
                direction = EPS
            lev = 1.0 / (1.0 + abs(tp - T[q]))
            wt = direction * (1.0 / len2) * lev
            cx = gradient and qj > 0 and qj < w - 1 and flag[q - 1] != INSIDE and flag[q + 1] != INSIDE
            cy = gradient and qi > 0 and qi < h - 1 and flag[q - w] != INSIDE and flag[q + w] != INSIDE
            b = 3 * q
            for c in range(3):
                gix = (I[b + 3 + c] - I[b - 3 + c]) * 0.5 if cx else 0.0
                giy = (I[b + 3 * w + c] - I[b - 3 * w + c]) * 0.5 if cy else 0.0
                v = wt * (I[b + c] + gix * rx + giy * ry)
                if c == 0:
                    acc0 += v
                elif c == 1:
                    acc1 += v
                else:
                    acc2 += v
            wsum += wt
    b = 3 * idx
    if wsum > 0.0:
        for c, acc in enumerate((acc0, acc1, acc2)):
            v = acc / wsum
            if v < 0.0:
                v = 0.0
            elif v > 255.0:
                v = 255.0
            I[b + c] = v
    else:
        s = 3 * source
        I[b] = I[s]
        I[b + 1] = I[s + 1]
        I[b + 2] = I[s + 2]


def telea(img, mask, radius, gradient=True):
    """Fill ``mask`` pixels of an ``(H, W, 3)`` uint8 image by fast marching."""
    h, w = mask.shape
    m = mask.ravel().tolist()
    I = img.astype(np.float64).ravel().tolist()
    flag, T, heap = _init_front(m, h, w)
    _outside_distance(m, flag, T, heap, h, w, 2.0 * radius)
    while heap:
        _, idx = heapq.heappop(heap)
        flag[idx] = KNOWN
        for nb in _neighbours(idx, h, w):
            if flag[nb] == INSIDE:
                i, j = divmod(nb, w)
                t = _arrival(T, flag, h, w, i, j)
                T[nb] = t
                _fill_pixel(I, T, flag, h, w, i, j, radius, idx, gradient)
                flag[nb] = BAND
                heapq.heappush(heap, (t, nb))
    out = np.floor(np.array(I, dtype=np.float64) + 0.5).reshape(h, w, 3)
    result = img.copy()
    result[mask] = out[mask].astype(np.uint8)
    return result
