# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Semantics mirror ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, log
from libc.stdint cimport int64_t

cnp.import_array()


cdef int _next_permutation(int* a, int n) noexcept nogil:
    cdef int i = n - 2, j, t
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return 0
    j = n - 1
    while a[j] <= a[i]:
        j -= 1
    t = a[i]; a[i] = a[j]; a[j] = t
    i += 1
    j = n - 1
    while i < j:
        t = a[i]; a[i] = a[j]; a[j] = t
        i += 1
        j -= 1
    return 1


cdef int _bareiss_rank(int64_t* m, int rows, int cols) noexcept nogil:
    # in-place fraction-free elimination; caller guarantees no overflow
    cdef int r = 0, c, i, j, p
    cdef int64_t prev = 1, piv, t
    for c in range(cols):
        if r >= rows:
            break
        p = -1
        for i in range(r, rows):
            if m[i * cols + c] != 0:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(cols):
                t = m[p * cols + j]; m[p * cols + j] = m[r * cols + j]; m[r * cols + j] = t
        piv = m[r * cols + c]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                m[i * cols + j] = (piv * m[i * cols + j] - m[i * cols + c] * m[r * cols + j]) // prev
            m[i * cols + c] = 0
        prev = piv
        r += 1
    return r


def weyl_scan(int code, cnp.int64_t[:, ::1] E, cnp.int64_t[:, ::1] B, int max_rank):
    """First signed permutation ``w`` (scan order) with ``rank(E w B) <= max_rank``.

    Returns ``(index, perm, signs)`` or ``(-1, None, None)``.
    """
    cdef int n = B.shape[0], d = B.shape[1], k = E.shape[0]
    cdef int i, a, c, mask, nmask, bits
    cdef long long index = 0
    cdef int64_t acc
    cdef int[::1] perm = np.arange(n, dtype=np.intc)
    cdef int[::1] sgn = np.ones(n, dtype=np.intc)
    cdef cnp.int64_t[::1] M = np.zeros(max(k * d, 1), dtype=np.int64)
    cdef int found = 0
    if code == 0:
        nmask = 1
    else:
        nmask = 1 << n
    with nogil:
        while True:
            for mask in range(nmask):
                if code == 2:
                    bits = 0
                    for i in range(n):
                        bits += (mask >> i) & 1
                    if bits & 1:
                        continue
                for i in range(n):
                    sgn[i] = -1 if (mask >> i) & 1 else 1
                for a in range(k):
                    for c in range(d):
                        acc = 0
                        for i in range(n):
                            acc += E[a, perm[i]] * sgn[i] * B[i, c]
                        M[a * d + c] = acc
                if _bareiss_rank(&M[0], k, d) <= max_rank:
                    found = 1
                    break
                index += 1
            if found:
                break
            if not _next_permutation(&perm[0], n):
                break
    if not found:
        return -1, None, None
    return index, tuple(perm[i] for i in range(n)), tuple(sgn[i] for i in range(n))


def log_singular_values(cnp.float64_t[:, :] g, double tol=1e-15, int max_sweeps=100):
    """log of the singular values of ``g``, descending, by one-sided cyclic Jacobi."""
    cdef int n = g.shape[0], m = g.shape[1]
    cdef cnp.float64_t[:, ::1] a = np.array(g, dtype=np.float64, order="C")
    cdef int p, q, i, sweep
    cdef double alpha, beta, gamma, zeta, t, cs, sn, ap, aq
    cdef int rotated
    with nogil:
        for sweep in range(max_sweeps):
            rotated = 0
            for p in range(m - 1):
                for q in range(p + 1, m):
                    alpha = 0.0; beta = 0.0; gamma = 0.0
                    for i in range(n):
                        alpha += a[i, p] * a[i, p]
                        beta += a[i, q] * a[i, q]
                        gamma += a[i, p] * a[i, q]
                    if fabs(gamma) <= tol * sqrt(alpha * beta) or gamma == 0.0:
                        continue
                    rotated = 1
                    zeta = (beta - alpha) / (2.0 * gamma)
                    if zeta >= 0:
                        t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                    else:
                        t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                    cs = 1.0 / sqrt(1.0 + t * t)
                    sn = cs * t
                    for i in range(n):
                        ap = a[i, p]
                        aq = a[i, q]
                        a[i, p] = cs * ap - sn * aq
                        a[i, q] = sn * ap + cs * aq
            if not rotated:
                break
    out = np.empty(m, dtype=np.float64)
    cdef double s
    for p in range(m):
        s = 0.0
        for i in range(n):
            s += a[i, p] * a[i, p]
        out[p] = 0.5 * log(s) if s > 0 else -np.inf
    out[::-1].sort()
    return out


def overlap_count(cnp.float64_t[:, ::1] x, cnp.float64_t[:, ::1] ginv, cnp.float64_t[::1] half, int kind):
    """Count rows ``x`` with ``x in S`` and ``ginv x in S`` (kind 0 box, 1 Euclidean ball)."""
    cdef Py_ssize_t m = x.shape[0], s
    cdef int n = x.shape[1], i, j
    cdef long long hits = 0
    cdef double y, r2, acc
    cdef int inside
    with nogil:
        for s in range(m):
            inside = 1
            if kind == 0:
                for i in range(n):
                    if fabs(x[s, i]) > half[i]:
                        inside = 0
                        break
            else:
                acc = 0.0
                for i in range(n):
                    acc += x[s, i] * x[s, i]
                inside = acc <= half[0] * half[0]
            if not inside:
                continue
            if kind == 0:
                for i in range(n):
                    y = 0.0
                    for j in range(n):
                        y += ginv[i, j] * x[s, j]
                    if fabs(y) > half[i]:
                        inside = 0
                        break
            else:
                acc = 0.0
                for i in range(n):
                    y = 0.0
                    for j in range(n):
                        y += ginv[i, j] * x[s, j]
                    acc += y * y
                inside = acc <= half[0] * half[0]
            if inside:
                hits += 1
    return hits
