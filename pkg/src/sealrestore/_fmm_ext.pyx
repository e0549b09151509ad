# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled fast-marching kernels.

Mirrors ``_fmm_py`` operation for operation; keep the two in sync.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor, fabs
from libcpp.queue cimport priority_queue
from libcpp.pair cimport pair
from libcpp.vector cimport vector

cnp.import_array()

cdef enum:
    KNOWN = 0
    BAND = 1
    INSIDE = 2
    BLOCKED = 3

cdef double INF = 1.0e6
cdef double EPS = 1.0e-6

# max-heap keyed on (-T, -index) == min-heap on (T, index)
ctypedef pair[double, Py_ssize_t] entry
ctypedef priority_queue[entry] heap_t


cdef inline void _push(heap_t* heap, double t, Py_ssize_t idx) noexcept nogil:
    heap.push(entry(-t, -idx))


cdef inline double _pair(bint ka, double a, bint kb, double b) noexcept nogil:
    cdef double d
    if not ka:
        if not kb:
            return INF
        return 1.0 + b
    if not kb:
        return 1.0 + a
    d = a - b
    if d * d <= 1.0:
        return (a + b + sqrt(2.0 - d * d)) * 0.5
    if a < b:
        return 1.0 + a
    return 1.0 + b


cdef double _arrival(double* T, unsigned char* flag, Py_ssize_t h, Py_ssize_t w,
                     Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t idx = i * w + j
    cdef bint ku = i > 0 and flag[idx - w] == KNOWN
    cdef bint kd = i < h - 1 and flag[idx + w] == KNOWN
    cdef bint kl = j > 0 and flag[idx - 1] == KNOWN
    cdef bint kr = j < w - 1 and flag[idx + 1] == KNOWN
    cdef double up = T[idx - w] if ku else 0.0
    cdef double down = T[idx + w] if kd else 0.0
    cdef double left = T[idx - 1] if kl else 0.0
    cdef double right = T[idx + 1] if kr else 0.0
    cdef double best = _pair(ku, up, kl, left)
    cdef double s = _pair(ku, up, kr, right)
    if s < best:
        best = s
    s = _pair(kd, down, kl, left)
    if s < best:
        best = s
    s = _pair(kd, down, kr, right)
    if s < best:
        best = s
    return best


cdef int _neighbours(Py_ssize_t idx, Py_ssize_t h, Py_ssize_t w, Py_ssize_t* out) noexcept nogil:
    cdef Py_ssize_t i = idx // w
    cdef Py_ssize_t j = idx - i * w
    cdef int n = 0
    if i > 0:
        out[n] = idx - w
        n += 1
    if j > 0:
        out[n] = idx - 1
        n += 1
    if j < w - 1:
        out[n] = idx + 1
        n += 1
    if i < h - 1:
        out[n] = idx + w
        n += 1
    return n


cdef void _init_front(unsigned char* m, unsigned char* flag, double* T, heap_t* heap,
                      Py_ssize_t h, Py_ssize_t w) noexcept nogil:
    cdef Py_ssize_t n = h * w
    cdef Py_ssize_t idx, k
    cdef Py_ssize_t nbs[4]
    cdef int cnt
    for idx in range(n):
        if m[idx]:
            flag[idx] = INSIDE
            T[idx] = INF
        else:
            flag[idx] = KNOWN
            T[idx] = 0.0
    for idx in range(n):
        if m[idx]:
            continue
        cnt = _neighbours(idx, h, w, nbs)
        for k in range(cnt):
            if m[nbs[k]]:
                flag[idx] = BAND
                _push(heap, 0.0, idx)
                break


cdef void _march(unsigned char* flag, double* T, heap_t* heap, Py_ssize_t h, Py_ssize_t w,
                 double limit, double* I, double radius, bint gradient) noexcept nogil:
    # I == NULL: distances only; otherwise fill each pixel as it is reached
    cdef Py_ssize_t idx, nb, k
    cdef Py_ssize_t nbs[4]
    cdef int cnt
    cdef double t, d
    while not heap.empty():
        d = -heap.top().first
        idx = -heap.top().second
        if d > limit:
            break
        heap.pop()
        flag[idx] = KNOWN
        cnt = _neighbours(idx, h, w, nbs)
        for k in range(cnt):
            nb = nbs[k]
            if flag[nb] == INSIDE:
                t = _arrival(T, flag, h, w, nb // w, nb % w)
                T[nb] = t
                if I != NULL:
                    _fill_pixel(I, T, flag, h, w, nb // w, nb % w, radius, idx, gradient)
                flag[nb] = BAND
                _push(heap, t, nb)


cdef void _fill_pixel(double* I, double* T, unsigned char* flag, Py_ssize_t h, Py_ssize_t w,
                      Py_ssize_t i, Py_ssize_t j, double radius, Py_ssize_t source,
                      bint gradient) noexcept nogil:
    cdef Py_ssize_t idx = i * w + j
    cdef double t = T[idx]
    cdef double gx, gy, norm, nx, ny
    cdef bint has_l = j > 0 and flag[idx - 1] != INSIDE
    cdef bint has_r = j < w - 1 and flag[idx + 1] != INSIDE
    cdef bint has_u = i > 0 and flag[idx - w] != INSIDE
    cdef bint has_d = i < h - 1 and flag[idx + w] != INSIDE
    if has_l and has_r:
        gx = (T[idx + 1] - T[idx - 1]) * 0.5
    elif has_r:
        gx = T[idx + 1] - t
    elif has_l:
        gx = t - T[idx - 1]
    else:
        gx = 0.0
    if has_u and has_d:
        gy = (T[idx + w] - T[idx - w]) * 0.5
    elif has_d:
        gy = T[idx + w] - t
    elif has_u:
        gy = t - T[idx - w]
    else:
        gy = 0.0
    norm = sqrt(gx * gx + gy * gy)
    if norm > 0.0:
        nx = gx / norm
        ny = gy / norm
    else:
        nx = 0.0
        ny = 0.0

    cdef Py_ssize_t r = <Py_ssize_t>floor(radius)
    cdef double r2 = radius * radius
    cdef Py_ssize_t qi, qj, q, b, c
    cdef Py_ssize_t i0 = i - r if i - r > 0 else 0
    cdef Py_ssize_t i1 = i + r if i + r < h - 1 else h - 1
    cdef Py_ssize_t j0 = j - r if j - r > 0 else 0
    cdef Py_ssize_t j1 = j + r if j + r < w - 1 else w - 1
    cdef double rx, ry, len2, length, direction, lev, wt, gix, giy, v
    cdef double acc[3]
    cdef double wsum = 0.0
    cdef bint cx, cy
    acc[0] = 0.0
    acc[1] = 0.0
    acc[2] = 0.0
    for qi in range(i0, i1 + 1):
        ry = <double>(i - qi)
        for qj in range(j0, j1 + 1):
            q = qi * w + qj
            if q == idx or flag[q] == INSIDE:
                continue
            rx = <double>(j - qj)
            len2 = rx * rx + ry * ry
            if len2 > r2:
                continue
            length = sqrt(len2)
            direction = (nx * rx + ny * ry) / length
            if direction < EPS:
                direction = EPS
            lev = 1.0 / (1.0 + fabs(t - T[q]))
            wt = direction * (1.0 / len2) * lev
            cx = gradient and qj > 0 and qj < w - 1 and flag[q - 1] != INSIDE and flag[q + 1] != INSIDE
            cy = gradient and qi > 0 and qi < h - 1 and flag[q - w] != INSIDE and flag[q + w] != INSIDE
            b = 3 * q
            for c in range(3):
                if cx:
                    gix = (I[b + 3 + c] - I[b - 3 + c]) * 0.5
                else:
                    gix = 0.0
                if cy:
                    giy = (I[b + 3 * w + c] - I[b - 3 * w + c]) * 0.5
                else:
                    giy = 0.0
                v = wt * (I[b + c] + gix * rx + giy * ry)
                acc[c] += v
            wsum += wt
    b = 3 * idx
    if wsum > 0.0:
        for c in range(3):
            v = acc[c] / wsum
            if v < 0.0:
                v = 0.0
            elif v > 255.0:
                v = 255.0
            I[b + c] = v
    else:
        q = 3 * source
        I[b] = I[q]
        I[b + 1] = I[q + 1]
        I[b + 2] = I[q + 2]


def eikonal(mask):
    """Arrival time of a front starting just outside ``mask``."""
    cdef Py_ssize_t h = mask.shape[0]
    cdef Py_ssize_t w = mask.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] m = np.ascontiguousarray(mask, dtype=np.uint8).ravel()
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] flag = np.empty(h * w, dtype=np.uint8)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] T = np.empty(h * w, dtype=np.float64)
    cdef heap_t heap
    with nogil:
        _init_front(&m[0], &flag[0], &T[0], &heap, h, w)
        _march(&flag[0], &T[0], &heap, h, w, INF * 2.0, NULL, 0.0, False)
    out = T.reshape(h, w)
    out[mask & (out >= INF)] = np.inf
    return out


def telea(img, mask, double radius, bint gradient=True):
    """Fill ``mask`` pixels of an ``(H, W, 3)`` uint8 image by fast marching."""
    cdef Py_ssize_t h = mask.shape[0]
    cdef Py_ssize_t w = mask.shape[1]
    cdef Py_ssize_t n = h * w
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] m = np.ascontiguousarray(mask, dtype=np.uint8).ravel()
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] flag = np.empty(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] oflag = np.empty(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] T = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] I = np.ascontiguousarray(img, dtype=np.float64).ravel().copy()
    cdef heap_t heap
    cdef heap_t work
    cdef Py_ssize_t idx
    with nogil:
        _init_front(&m[0], &flag[0], &T[0], &heap, h, w)
        # outward pass: signed distance for known pixels near the boundary
        for idx in range(n):
            if m[idx]:
                oflag[idx] = BLOCKED
            elif flag[idx] == BAND:
                oflag[idx] = BAND
            else:
                oflag[idx] = INSIDE
        work = heap
        _march(&oflag[0], &dist[0], &work, h, w, 2.0 * radius, NULL, 0.0, False)
        for idx in range(n):
            if flag[idx] == KNOWN:
                if oflag[idx] == INSIDE:
                    T[idx] = -INF
                else:
                    T[idx] = -dist[idx]
        _march(&flag[0], &T[0], &heap, h, w, INF * 2.0, &I[0], radius, gradient)
    out = np.floor(I + 0.5).reshape(h, w, 3)
    result = img.copy()
    result[mask] = out[mask].astype(np.uint8)
    return result
