"""Exact rational subspaces, polyhedral cones and finite unions of them.

Everything here is exact except :func:`asymptotic_cone`, which consumes
numeric samples, and the final square root in the distance functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import EmptyTail, MixedMembers, ProperlabInputError
from .linalg import (
    as_fraction,
    as_vector,
    dot,
    fraction_str,
    independent_subset,
    mat_vec,
    nullspace,
    primitive,
    rank,
)

Vector = tuple[Fraction, ...]


@dataclass(frozen=True)
class RationalSubspace:
    ambient_dim: int
    basis: tuple[Vector, ...] = ()

    def __post_init__(self):
        for v in self.basis:
            if len(v) != self.ambient_dim:
                raise ProperlabInputError("basis vector has the wrong length")
        if rank(self.basis) != len(self.basis):
            raise ProperlabInputError("subspace basis is not linearly independent")

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int | None = None) -> "RationalSubspace":
        vecs = [as_vector(v) for v in vectors]
        if ambient_dim is None:
            if not vecs:
                raise ProperlabInputError("ambient dimension needed for the zero subspace")
            ambient_dim = len(vecs[0])
        keep = independent_subset(vecs)
        return cls(ambient_dim, tuple(_primitive_fr(vecs[i]) for i in keep))

    @classmethod
    def zero(cls, ambient_dim: int) -> "RationalSubspace":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "RationalSubspace":
        return cls.span([[int(i == j) for j in range(ambient_dim)] for i in range(ambient_dim)])

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def contains(self, v: Sequence) -> bool:
        v = as_vector(v)
        if not any(v):
            return True
        return rank(self.basis + (v,)) == self.dim

    def contains_subspace(self, other: "RationalSubspace") -> bool:
        return rank(self.basis + other.basis) == self.dim

    @cached_property
    def equations(self) -> tuple[tuple[int, ...], ...]:
        """Integer rows E with ``{x : E x = 0}`` equal to this subspace."""
        return tuple(primitive(v, canonical_sign=False) for v in nullspace(self.basis, self.ambient_dim))

    @cached_property
    def orthogonal_basis(self) -> tuple[Vector, ...]:
        out: list[Vector] = []
        for v in self.basis:
            w = list(v)
            for o in out:
                c = dot(w, o) / dot(o, o)
                w = [a - c * b for a, b in zip(w, o)]
            out.append(tuple(w))
        return tuple(out)

    def transform(self, w: Sequence[Sequence]) -> "RationalSubspace":
        return RationalSubspace.span([mat_vec(w, v) for v in self.basis], self.ambient_dim)

    def as_cone(self) -> "PolyCone":
        gens = [v for v in self.basis] + [tuple(-x for x in v) for v in self.basis]
        return PolyCone(self.ambient_dim, tuple(gens))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalSubspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.dim == other.dim
            and self.contains_subspace(other)
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.dim))

    def to_json(self) -> dict:
        return {"basis": [[fraction_str(x) for x in v] for v in self.basis], "ambient_dim": self.ambient_dim}

    @classmethod
    def from_json(cls, data: dict, ambient_dim: int | None = None) -> "RationalSubspace":
        unknown = set(data) - {"basis", "ambient_dim"}
        if unknown:
            raise ProperlabInputError(f"unknown subspace fields {sorted(unknown)}")
        dim = data.get("ambient_dim", ambient_dim)
        return cls.span(data["basis"], dim)


@dataclass(frozen=True)
class PolyCone:
    ambient_dim: int
    generators: tuple[Vector, ...] = field(default=())

    def __post_init__(self):
        for g in self.generators:
            if len(g) != self.ambient_dim:
                raise ProperlabInputError("generator has the wrong length")
            if not any(g):
                raise ProperlabInputError("cone generators must be nonzero")

    @classmethod
    def of(cls, generators: Iterable[Sequence], ambient_dim: int | None = None) -> "PolyCone":
        gens = tuple(as_vector(g) for g in generators)
        if ambient_dim is None:
            ambient_dim = len(gens[0])
        return cls(ambient_dim, gens)

    def contains(self, x: Sequence) -> bool:
        x = as_vector(x)
        if not any(x):
            return True
        if not self.generators:
            return False
        cols = list(self.generators)
        A = [[g[t] for g in cols] for t in range(self.ambient_dim)]
        return lp_feasible(A, list(x)) is not None

    def to_json(self) -> dict:
        return {"generators": [[fraction_str(x) for x in g] for g in self.generators], "ambient_dim": self.ambient_dim}

    @classmethod
    def from_json(cls, data: dict, ambient_dim: int | None = None) -> "PolyCone":
        unknown = set(data) - {"generators", "ambient_dim"}
        if unknown:
            raise ProperlabInputError(f"unknown cone fields {sorted(unknown)}")
        return cls.of(data["generators"], data.get("ambient_dim", ambient_dim))


Member = Union[RationalSubspace, PolyCone]


@dataclass(frozen=True)
class ConeUnion:
    members: tuple[Member, ...]

    def __post_init__(self):
        if not self.members:
            raise ProperlabInputError("a cone union needs at least one member")
        dims = {m.ambient_dim for m in self.members}
        if len(dims) != 1:
            raise ProperlabInputError("cone union members live in different ambients")

    @classmethod
    def of(cls, members: Iterable[Member]) -> "ConeUnion":
        return cls(tuple(members))

    @property
    def ambient_dim(self) -> int:
        return self.members[0].ambient_dim

    @property
    def all_subspaces(self) -> bool:
        return all(isinstance(m, RationalSubspace) for m in self.members)

    def to_json(self) -> dict:
        return {"members": [m.to_json() for m in self.members]}

    @classmethod
    def from_json(cls, data: dict) -> "ConeUnion":
        out = []
        for m in data["members"]:
            out.append(PolyCone.from_json(m) if "generators" in m else RationalSubspace.from_json(m))
        return cls(tuple(out))


def _primitive_fr(v: Sequence) -> Vector:
    return tuple(Fraction(x) for x in primitive(v))


# ----------------------------------------------------------------------------
# exact phase-I simplex


def lp_feasible(A: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """A nonnegative solution of ``A y = b`` in exact arithmetic, or None.

    Phase-I simplex with Bland's rule, so it terminates on degenerate input.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    rows = []
    for i in range(m):
        row = [as_fraction(x) for x in A[i]]
        rhs = as_fraction(b[i])
        if rhs < 0:
            row = [-x for x in row]
            rhs = -rhs
        rows.append(row + [Fraction(int(k == i)) for k in range(m)] + [rhs])
    width = n + m
    basis = [n + i for i in range(m)]
    # reduced costs of the artificial objective, last entry = -objective
    cost = [Fraction(0)] * (width + 1)
    for j in range(width + 1):
        if n <= j < width:
            continue
        cost[j] = -sum((r[j] for r in rows), Fraction(0))
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i, r in enumerate(rows):
            if r[enter] > 0:
                ratio = r[-1] / r[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            # unbounded phase-I cannot happen (objective bounded below by 0)
            break
        piv_i = best[1]
        prow = rows[piv_i]
        inv = 1 / prow[enter]
        prow = [x * inv for x in prow]
        rows[piv_i] = prow
        for i, r in enumerate(rows):
            if i != piv_i and r[enter]:
                f = r[enter]
                rows[i] = [a - f * c for a, c in zip(r, prow)]
        f = cost[enter]
        cost = [a - f * c for a, c in zip(cost, prow)]
        basis[piv_i] = enter
    if cost[-1] != 0:
        return None
    y = [Fraction(0)] * width
    for i, j in enumerate(basis):
        y[j] = rows[i][-1]
    if any(y[n:]):
        return None
    return tuple(y[:n])


# ----------------------------------------------------------------------------
# operations


def subspace_intersection(U: RationalSubspace, V: RationalSubspace) -> RationalSubspace:
    if U.ambient_dim != V.ambient_dim:
        raise ProperlabInputError("subspaces live in different ambients")
    r = U.ambient_dim
    if U.is_zero() or V.is_zero():
        return RationalSubspace.zero(r)
    cols = list(U.basis) + [tuple(-x for x in v) for v in V.basis]
    rows = [[c[t] for c in cols] for t in range(r)]
    sols = nullspace(rows, len(cols))
    vecs = []
    for s in sols:
        x = [Fraction(0)] * r
        for c, u in zip(s[: U.dim], U.basis):
            if c:
                x = [a + c * b for a, b in zip(x, u)]
        vecs.append(tuple(x))
    return RationalSubspace.span(vecs, r)


def _generators(m: Member) -> list[Vector]:
    return list(m.as_cone().generators if isinstance(m, RationalSubspace) else m.generators)


def cones_intersect_nontrivially(C: Member, D: Member) -> tuple[bool, tuple[int, ...] | None]:
    """Decide ``C cap D != {0}``; returns ``(True, witness)`` or ``(False, None)``.

    A nonzero common vector has some coordinate ``s * x_i >= 1`` after
    scaling, so one exact feasibility problem per (coordinate, sign) settles it.
    """
    if C.ambient_dim != D.ambient_dim:
        raise ProperlabInputError("cones live in different ambients")
    r = C.ambient_dim
    G = _generators(C)
    H = _generators(D)
    if not G or not H:
        return False, None
    nc, nd = len(G), len(H)
    for i in range(r):
        for s in (1, -1):
            A = []
            for t in range(r):
                A.append([g[t] for g in G] + [-h[t] for h in H] + [0])
            A.append([s * g[i] for g in G] + [0] * nd + [-1])
            sol = lp_feasible(A, [0] * r + [1])
            if sol is None:
                continue
            x = [Fraction(0)] * r
            for c, g in zip(sol[:nc], G):
                if c:
                    x = [a + c * b for a, b in zip(x, g)]
            witness = primitive(x, canonical_sign=False)
            return True, witness
    return False, None


def verify_witness(C: Member, D: Member, x: Sequence) -> bool:
    x = as_vector(x)
    if not any(x):
        return False
    for M in (C, D):
        if isinstance(M, RationalSubspace):
            if not M.contains(x):
                return False
        elif not M.contains(x):
            return False
    return True


def _pair_meets(a: Member, b: Member) -> tuple[bool, tuple | None]:
    if isinstance(a, RationalSubspace) and isinstance(b, RationalSubspace):
        inter = subspace_intersection(a, b)
        if inter.is_zero():
            return False, None
        return True, primitive(inter.basis[0])
    return cones_intersect_nontrivially(a, b)


def pitchfork_witness(A: ConeUnion, B: ConeUnion):
    """First pair ``(i, j, x)`` of members with a common nonzero vector, or None."""
    if A.ambient_dim != B.ambient_dim:
        raise ProperlabInputError("unions live in different ambients")
    for i, a in enumerate(A.members):
        for j, b in enumerate(B.members):
            hit, x = _pair_meets(a, b)
            if hit:
                return i, j, x
    return None


def pitchfork_unions(A: ConeUnion, B: ConeUnion) -> bool:
    """True iff every member of A meets every member of B only in 0."""
    return pitchfork_witness(A, B) is None


def similar_subspace_unions(A: ConeUnion, B: ConeUnion) -> bool:
    """Set equality of two finite unions of subspaces."""
    if not (A.all_subspaces and B.all_subspaces):
        raise MixedMembers("similarity is only decided for unions of subspaces")
    if A.ambient_dim != B.ambient_dim:
        raise ProperlabInputError("unions live in different ambients")

    def covered(X, Y):
        return all(any(y.contains_subspace(x) for y in Y.members) for x in X.members)

    return covered(A, B) and covered(B, A)


def asymptotic_cone(points, radius_floor: float | None = None, angle_merge: float = 1e-3) -> PolyCone:
    """Numeric asymptotic cone of a finite sample.

    Keeps points with norm at least ``radius_floor`` (default 10% of the
    largest norm), links unit directions closer than ``angle_merge``
    radians (single linkage) and emits one ray per cluster: the direction of
    its farthest point.
    """
    X = np.asarray([[float(x) for x in p] for p in points], dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyTail("no sample points")
    norms = np.linalg.norm(X, axis=1)
    if radius_floor is None:
        radius_floor = 0.1 * float(norms.max())
    keep = (norms >= radius_floor) & (norms > 0)
    if not keep.any():
        raise EmptyTail(f"no point has norm >= {radius_floor}")
    X, norms = X[keep], norms[keep]
    order = np.argsort(-norms, kind="stable")
    dirs = X[order] / norms[order, None]
    cos_min = math.cos(angle_merge)
    label = np.full(len(dirs), -1)
    reps = []
    for start in range(len(dirs)):
        if label[start] >= 0:
            continue
        cid = len(reps)
        reps.append(dirs[start])
        label[start] = cid
        stack = [start]
        while stack:
            i = stack.pop()
            near = np.nonzero((label < 0) & (dirs @ dirs[i] > cos_min))[0]
            label[near] = cid
            stack.extend(near.tolist())
    gens = tuple(tuple(Fraction(float(c)).limit_denominator(10**12) for c in rep) for rep in reps)
    return PolyCone(X.shape[1], gens)


def squared_distance_to_subspace(x: Sequence, V: RationalSubspace) -> Fraction:
    xv = as_vector(x)
    total = dot(xv, xv)
    for o in V.orthogonal_basis:
        total -= dot(xv, o) ** 2 / dot(o, o)
    return total


def distance_to_subspace_union(x: Sequence, A: ConeUnion) -> float:
    """Euclidean distance from x to the nearest member subspace."""
    if not A.all_subspaces:
        raise MixedMembers("distance is only defined here for unions of subspaces")
    best = min(squared_distance_to_subspace(x, m) for m in A.members)
    return math.sqrt(best)


def union_of_orbit(V: RationalSubspace, elements: Iterable[Sequence[Sequence]]) -> ConeUnion:
    """The finite union ``W . V`` (duplicates removed)."""
    members: list[RationalSubspace] = []
    for w in elements:
        img = V.transform(w)
        if not any(img == m for m in members):
            members.append(img)
    return ConeUnion(tuple(members))
