"""Pure-Python fallback for the compiled kernels.

Same algorithms and the same Weyl scan order as ``_kernels.pyx``, so both
backends return identical witnesses.  Integer arithmetic here is unbounded,
so no overflow guard is needed on this path.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def _rank_int(m: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    m = [row[:] for row in m]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    r = 0
    prev = 1
    for c in range(cols):
        if r >= rows:
            break
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        for i in range(r + 1, rows):
            mic = m[i][c]
            for j in range(c + 1, cols):
                m[i][j] = (piv * m[i][j] - mic * m[r][j]) // prev
            m[i][c] = 0
        prev = piv
        r += 1
    return r


def weyl_scan(code: int, E, B, max_rank: int):
    E = [[int(v) for v in row] for row in np.asarray(E)]
    B = [[int(v) for v in row] for row in np.asarray(B)]
    n = len(B)
    d = len(B[0]) if n else 0
    k = len(E)
    nmask = 1 if code == 0 else 1 << n
    index = 0
    for perm in itertools.permutations(range(n)):
        for mask in range(nmask):
            if code == 2 and bin(mask).count("1") & 1:
                continue
            sgn = [-1 if mask >> i & 1 else 1 for i in range(n)]
            # rows of w B: (w B)[perm[i]] = sgn[i] * B[i]
            wb = [None] * n
            for i in range(n):
                s = sgn[i]
                wb[perm[i]] = [s * b for b in B[i]]
            m = [[sum(E[a][i] * wb[i][c] for i in range(n)) for c in range(d)] for a in range(k)]
            if (_rank_int(m) if k and d else 0) <= max_rank:
                return index, tuple(perm), tuple(sgn)
            index += 1
    return -1, None, None


def log_singular_values(g, tol: float = 1e-15, max_sweeps: int = 100):
    a = [list(map(float, row)) for row in np.asarray(g, dtype=float)]
    n = len(a)
    m = len(a[0])
    for _ in range(max_sweeps):
        rotated = False
        for p in range(m - 1):
            for q in range(p + 1, m):
                alpha = sum(a[i][p] * a[i][p] for i in range(n))
                beta = sum(a[i][q] * a[i][q] for i in range(n))
                gamma = sum(a[i][p] * a[i][q] for i in range(n))
                if gamma == 0.0 or abs(gamma) <= tol * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta >= 0:
                    t = 1.0 / (zeta + math.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + math.sqrt(1.0 + zeta * zeta))
                cs = 1.0 / math.sqrt(1.0 + t * t)
                sn = cs * t
                for i in range(n):
                    ap, aq = a[i][p], a[i][q]
                    a[i][p] = cs * ap - sn * aq
                    a[i][q] = sn * ap + cs * aq
        if not rotated:
            break
    out = []
    for p in range(m):
        s = sum(a[i][p] * a[i][p] for i in range(n))
        out.append(0.5 * math.log(s) if s > 0 else -math.inf)
    return np.array(sorted(out, reverse=True))


def overlap_count(x, ginv, half, kind: int) -> int:
    x = np.asarray(x, dtype=float)
    ginv = np.asarray(ginv, dtype=float)
    half = np.asarray(half, dtype=float)
    y = x @ ginv.T
    if kind == 0:
        inside = np.all(np.abs(x) <= half, axis=1) & np.all(np.abs(y) <= half, axis=1)
    else:
        r2 = half[0] * half[0]
        inside = (np.einsum("ij,ij->i", x, x) <= r2) & (np.einsum("ij,ij->i", y, y) <= r2)
    return int(np.count_nonzero(inside))
