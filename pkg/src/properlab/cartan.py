"""Classical matrix Lie algebras, Cartan-split dimension counts and the
Cartan projection of GL(n, R).

Every algebra is realized inside real N x N matrices (complex ones are
realified ``Z = A + iB -> [[A, -B], [B, A]]``) as the exact solution space
of its defining linear conditions.  The Cartan involution is
``theta(X) = -X^T`` throughout, so ``k`` is the antisymmetric part and ``p``
the symmetric part.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .errors import NotASubalgebraOfG, ProperlabInputError, SingularMatrix
from .linalg import primitive, rank, solve, span_basis, sparse_nullspace, sparse_rank

GROUP_FAMILIES = ("SL", "GL", "SO", "O", "SU", "U", "Sp")


@dataclass(frozen=True)
class MatrixGroupSpec:
    """A classical group: ``SL``/``GL``/``Sp`` take ``n`` (Sp means Sp(2n, R)),
    the indefinite families ``SO``/``O``/``SU``/``U`` take ``p, q``."""

    family: str
    n: int = 0
    p: int = 0
    q: int = 0

    def __post_init__(self):
        if self.family not in GROUP_FAMILIES:
            raise ProperlabInputError(f"unknown group family {self.family!r}")
        if self.family in ("SL", "GL", "Sp"):
            if self.n < 1:
                raise ProperlabInputError(f"{self.family} needs n >= 1")
        elif self.p < 0 or self.q < 0 or self.p + self.q < 1:
            raise ProperlabInputError(f"{self.family} needs p, q >= 0 with p + q >= 1")

    @property
    def is_complex(self) -> bool:
        return self.family in ("SU", "U")

    @property
    def matrix_size(self) -> int:
        """Size of the real matrices realizing the group."""
        if self.family in ("SL", "GL"):
            return self.n
        if self.family == "Sp":
            return 2 * self.n
        m = self.p + self.q
        return 2 * m if self.is_complex else m

    def to_json(self) -> dict:
        if self.family in ("SL", "GL", "Sp"):
            return {"family": self.family, "n": self.n}
        return {"family": self.family, "p": self.p, "q": self.q}

    @classmethod
    def from_json(cls, data: dict) -> "MatrixGroupSpec":
        fam = data.get("family")
        unknown = set(data) - {"family", "n", "p", "q"}
        if unknown:
            raise ProperlabInputError(f"unknown group fields {sorted(unknown)}")
        return cls(fam, n=int(data.get("n", 0)), p=int(data.get("p", 0)), q=int(data.get("q", 0)))

    def __str__(self) -> str:
        if self.family in ("SL", "GL"):
            return f"{self.family}({self.n},R)"
        if self.family == "Sp":
            return f"Sp({2 * self.n},R)"
        return f"{self.family}({self.p},{self.q})"


def SL(n: int) -> MatrixGroupSpec:
    return MatrixGroupSpec("SL", n=n)


def GL(n: int) -> MatrixGroupSpec:
    return MatrixGroupSpec("GL", n=n)


def SO(p: int, q: int) -> MatrixGroupSpec:
    return MatrixGroupSpec("SO", p=p, q=q)


def SU(p: int, q: int) -> MatrixGroupSpec:
    return MatrixGroupSpec("SU", p=p, q=q)


def U(p: int, q: int) -> MatrixGroupSpec:
    return MatrixGroupSpec("U", p=p, q=q)


def Sp(n: int) -> MatrixGroupSpec:
    return MatrixGroupSpec("Sp", n=n)


@dataclass(frozen=True)
class LieAlgebraBasis:
    ambient_dim: int
    k_part: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    p_part: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    @property
    def basis(self) -> tuple[tuple[Fraction, ...], ...]:
        """Flattened (row-major) basis matrices, k-part first."""
        return self.k_part + self.p_part

    @property
    def theta_split(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        nk = len(self.k_part)
        return tuple(range(nk)), tuple(range(nk, nk + len(self.p_part)))

    @property
    def dim(self) -> int:
        return len(self.k_part) + len(self.p_part)

    def matrices(self) -> list[np.ndarray]:
        n = self.ambient_dim
        return [np.array([float(x) for x in v]).reshape(n, n) for v in self.basis]


def _form_matrix(spec: MatrixGroupSpec) -> list[list[int]] | None:
    """The bilinear (or realified hermitian) form the algebra must preserve."""
    fam = spec.family
    if fam in ("SO", "O", "SU", "U"):
        diag = [1] * spec.p + [-1] * spec.q
        if spec.is_complex:
            diag = diag + diag
        n = len(diag)
        return [[diag[i] if i == j else 0 for j in range(n)] for i in range(n)]
    if fam == "Sp":
        n = spec.n
        m = 2 * n
        omega = [[0] * m for _ in range(m)]
        for i in range(n):
            omega[i][n + i] = 1
            omega[n + i][i] = -1
        return omega
    return None


def defining_system(spec: MatrixGroupSpec) -> tuple[int, list[dict[int, Fraction]]]:
    """Sparse linear conditions on the N^2 entries of X (index ``i * N + j``)."""
    N = spec.matrix_size
    rows: list[dict[int, Fraction]] = []

    def var(i, j):
        return i * N + j

    def add(terms):
        row: dict[int, Fraction] = {}
        for idx, c in terms:
            row[idx] = row.get(idx, 0) + c
        row = {k: Fraction(v) for k, v in row.items() if v}
        if row:
            rows.append(row)

    form = _form_matrix(spec)
    if form is not None:
        # X^T F + F X = 0
        nz = [[(k, form[k][j]) for k in range(N) if form[k][j]] for j in range(N)]
        nz_rows = [[(k, form[i][k]) for k in range(N) if form[i][k]] for i in range(N)]
        for i in range(N):
            for j in range(i, N):
                add([(var(k, i), f) for k, f in nz[j]] + [(var(k, j), f) for k, f in nz_rows[i]])
    if spec.is_complex:
        m = N // 2
        for i in range(m):
            for j in range(m):
                add([(var(i, j), 1), (var(m + i, m + j), -1)])
                add([(var(i, m + j), 1), (var(m + i, j), 1)])
    if spec.family == "SL":
        add([(var(i, i), 1) for i in range(N)])
    elif spec.family == "SU":
        m = N // 2
        add([(var(i, i), 1) for i in range(m)])
        add([(var(m + i, i), 1) for i in range(m)])
    return N, rows


def _symmetry_rows(N: int, sign: int) -> list[dict[int, Fraction]]:
    """Rows forcing X^T = sign * X."""
    rows = []
    for i in range(N):
        for j in range(i, N):
            if i == j:
                if sign == -1:
                    rows.append({i * N + i: Fraction(1)})
            else:
                rows.append({i * N + j: Fraction(1), j * N + i: Fraction(-sign)})
    return rows


def lie_algebra_basis(spec: MatrixGroupSpec) -> LieAlgebraBasis:
    N, rows = defining_system(spec)
    k_part = sparse_nullspace(rows + _symmetry_rows(N, -1), N * N)
    p_part = sparse_nullspace(rows + _symmetry_rows(N, 1), N * N)
    return LieAlgebraBasis(N, tuple(k_part), tuple(p_part))


def algebra_dim(spec: MatrixGroupSpec) -> int:
    """Dimension of g straight from the defining system (independent of the theta split)."""
    N, rows = defining_system(spec)
    return N * N - sparse_rank(rows)


def cartan_dims(spec: MatrixGroupSpec) -> tuple[int, int]:
    b = lie_algebra_basis(spec)
    return len(b.k_part), len(b.p_part)


def embed_basis(basis: LieAlgebraBasis, index_map: Sequence[int], N: int) -> LieAlgebraBasis:
    """Push a basis forward along ``X -> P X P^T`` for the coordinate injection ``index_map``."""
    n = basis.ambient_dim
    if len(index_map) != n or len(set(index_map)) != n or max(index_map) >= N:
        raise ProperlabInputError("index map must be injective into the target size")

    def push(v):
        out = [Fraction(0)] * (N * N)
        for i in range(n):
            for j in range(n):
                x = v[i * n + j]
                if x:
                    out[index_map[i] * N + index_map[j]] = x
        return tuple(out)

    return LieAlgebraBasis(N, tuple(push(v) for v in basis.k_part), tuple(push(v) for v in basis.p_part))


def standard_embedding(spec_H: MatrixGroupSpec, spec_G: MatrixGroupSpec) -> LieAlgebraBasis:
    """Basis of h inside g for the standard block embeddings.

    Supported: same-family blocks (``SO(p',q') < SO(p,q)``, ``SL(m) < SL(n)``, ...)
    and the realification ``U(p,q) < SO(2p,2q)`` (also ``SU``).
    """
    hb = lie_algebra_basis(spec_H)
    N = spec_G.matrix_size
    fh, fg = spec_H.family, spec_G.family
    ortho = ("SO", "O")
    if fh in ("SL", "GL") and fg in ("SL", "GL") and spec_H.n <= spec_G.n:
        return embed_basis(hb, list(range(spec_H.n)), N)
    if fh == "Sp" and fg == "Sp" and spec_H.n <= spec_G.n:
        n, m = spec_G.n, spec_H.n
        return embed_basis(hb, list(range(m)) + [n + i for i in range(m)], N)
    if (fh in ortho and fg in ortho) or (fh in ("SU", "U") and fg in ("SU", "U")):
        if spec_H.p <= spec_G.p and spec_H.q <= spec_G.q:
            idx = list(range(spec_H.p)) + [spec_G.p + j for j in range(spec_H.q)]
            if spec_H.is_complex:
                mg = spec_G.p + spec_G.q
                idx = idx + [mg + i for i in idx]
            return embed_basis(hb, idx, N)
    if fh in ("SU", "U") and fg in ortho and 2 * spec_H.p == spec_G.p and 2 * spec_H.q == spec_G.q:
        p, q = spec_H.p, spec_H.q
        m = p + q
        # realified coordinates (Re z_1..Re z_m, Im z_1..Im z_m) -> positive block, then negative block
        idx = [0] * (2 * m)
        for i in range(p):
            idx[i] = i
            idx[m + i] = p + i
        for j in range(q):
            idx[p + j] = 2 * p + j
            idx[m + p + j] = 2 * p + q + j
        return embed_basis(hb, idx, N)
    raise ProperlabInputError(f"no standard embedding of {spec_H} into {spec_G}")


def _antisym_parts(vectors, N, sign):
    out = []
    for v in vectors:
        row = {}
        for i in range(N):
            for j in range(N):
                x = v[i * N + j] + sign * v[j * N + i]
                if x:
                    row[i * N + j] = x
        out.append(row)
    return out


def pair_signature(spec_G: MatrixGroupSpec, h_basis: LieAlgebraBasis) -> tuple[int, int]:
    """``(d(X), e(X))`` = (dim p - dim(h cap p), dim k - dim(h cap k)) for X = G/H."""
    gb = lie_algebra_basis(spec_G)
    N = gb.ambient_dim
    if h_basis.ambient_dim != N:
        raise NotASubalgebraOfG("h matrices have the wrong size")
    g_vecs = list(gb.basis)
    h_vecs = list(h_basis.basis)
    if rank(g_vecs + h_vecs) != len(g_vecs):
        raise NotASubalgebraOfG("h is not contained in g")
    dim_h = rank(h_vecs)
    h_cap_p = dim_h - sparse_rank(_antisym_parts(h_vecs, N, -1))
    h_cap_k = dim_h - sparse_rank(_antisym_parts(h_vecs, N, 1))
    return len(gb.p_part) - h_cap_p, len(gb.k_part) - h_cap_k


def real_rank(spec: MatrixGroupSpec) -> int:
    fam = spec.family
    if fam == "SL":
        return spec.n - 1
    if fam in ("GL", "Sp"):
        return spec.n
    return min(spec.p, spec.q)


def _int_matrices(vectors, N) -> list[np.ndarray]:
    return [np.array(primitive(v, canonical_sign=False), dtype=np.int64).reshape(N, N) for v in vectors]


def real_rank_bruteforce(spec: MatrixGroupSpec, trials: int = 3, seed: int = 0) -> int:
    """dim of the centralizer in p of a generic element of p (a maximal abelian subspace)."""
    b = lie_algebra_basis(spec)
    N = b.ambient_dim
    ps = _int_matrices(b.p_part, N)
    if not ps:
        return 0
    rng = random.Random(seed)
    best = len(ps)
    for _ in range(trials):
        X = sum(rng.randint(-7, 7) * P for P in ps)
        brackets = [(X @ P - P @ X).ravel().tolist() for P in ps]
        best = min(best, len(ps) - rank(brackets))
    return best


def split_torus(spec: MatrixGroupSpec) -> list[tuple[Fraction, ...]]:
    """Flattened basis of the standard maximal abelian subspace a of p.

    Diagonal matrices for SL/GL, ``diag(a, -a)`` for Sp, and commuting boosts
    ``E_{i,p+i} + E_{p+i,i}`` (realified for SU/U) for the indefinite families.
    """
    N = spec.matrix_size
    out = []

    def mat(entries):
        v = [Fraction(0)] * (N * N)
        for (i, j), x in entries.items():
            v[i * N + j] = Fraction(x)
        return tuple(v)

    fam = spec.family
    if fam == "GL":
        out = [mat({(i, i): 1}) for i in range(N)]
    elif fam == "SL":
        out = [mat({(i, i): 1, (i + 1, i + 1): -1}) for i in range(N - 1)]
    elif fam == "Sp":
        n = spec.n
        out = [mat({(i, i): 1, (n + i, n + i): -1}) for i in range(n)]
    else:
        p, q = spec.p, spec.q
        m = p + q
        for i in range(min(p, q)):
            ent = {(i, p + i): 1, (p + i, i): 1}
            if spec.is_complex:
                ent.update({(m + i, m + p + i): 1, (m + p + i, m + i): 1})
            out.append(mat(ent))
    return out


def subspace_coordinates(ambient_basis, vectors) -> list[tuple[Fraction, ...]]:
    """Coordinates of ``vectors`` (all in span(ambient_basis)) in that basis."""
    coords = []
    for v in vectors:
        c = solve(ambient_basis, v)
        if c is None:
            raise ProperlabInputError("vector outside the given span")
        coords.append(c)
    return coords


def torus_intersection(spec_G: MatrixGroupSpec, h_basis: LieAlgebraBasis) -> list[tuple[Fraction, ...]]:
    """Basis, in coordinates of ``split_torus(G)``, of ``a cap h``."""
    a = split_torus(spec_G)
    h = list(h_basis.basis)
    # (c, d) with sum c_i a_i - sum d_j h_j = 0
    cols = a + h
    nrows = len(a[0]) if a else 0
    rows = []
    for r in range(nrows):
        row = {}
        for idx, v in enumerate(cols):
            x = v[r]
            if x:
                row[idx] = x if idx < len(a) else -x
        if row:
            rows.append(row)
    sols = sparse_nullspace(rows, len(cols))
    cs = [s[: len(a)] for s in sols]

    return span_basis([c for c in cs if any(c)])


def cartan_projection_gl(g, tol_sing: float = 1e-12) -> np.ndarray:
    """Cartan projection of g in GL(n, R): half the log-eigenvalues of g^T g, descending."""
    g = np.asarray(g, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ProperlabInputError("expected a square matrix")
    if not np.all(np.isfinite(g)):
        raise ProperlabInputError("matrix has non-finite entries")
    mu = kernels.log_singular_values(g)
    if not np.isfinite(mu[-1]) or mu[-1] < np.log(tol_sing) + mu[0]:
        raise SingularMatrix("matrix is singular to within tolerance")
    return mu
