"""Restricted root data and Weyl groups of the classical families.

Type ``A_r`` lives in the trace-zero hyperplane of ``Z^(r+1)``; every other
family lives in ``Z^r``.  All classical Weyl groups act by signed
permutations of coordinates, which is what the fast orbit scans in
:mod:`properlab.kernels` exploit; :func:`weyl_elements` instead builds the
group as the closure of the simple reflections and serves as the reference
enumeration.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterator, Sequence

from .errors import CapExceeded, UnsupportedFamily
from .linalg import as_vector, identity, mat_mul, mat_vec, solve

FAMILIES = ("A", "B", "C", "D", "BC")

# kernel group codes: which signed permutations belong to W
GROUP_PERM, GROUP_SIGNED, GROUP_EVEN_SIGNED = 0, 1, 2

Matrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class RootDatum:
    family: str
    rank: int
    roots: tuple[tuple[int, ...], ...]
    positive_roots: tuple[tuple[int, ...], ...]
    simple_roots: tuple[tuple[int, ...], ...]
    simple_reflections: tuple[Matrix, ...] = field(repr=False)

    @property
    def ambient_dim(self) -> int:
        return self.rank + 1 if self.family == "A" else self.rank

    @property
    def group_code(self) -> int:
        if self.family == "A":
            return GROUP_PERM
        if self.family == "D":
            return GROUP_EVEN_SIGNED
        return GROUP_SIGNED

    @property
    def weyl_order(self) -> int:
        return weyl_order(self.family, self.rank)

    def a_basis(self) -> list[tuple[int, ...]]:
        """Integer basis of the Cartan subspace inside the ambient lattice."""
        n = self.ambient_dim
        if self.family == "A":
            return [tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(n)) for i in range(self.rank)]
        return [tuple(int(k == i) for k in range(n)) for i in range(n)]

    def contains(self, v: Sequence) -> bool:
        """Whether an ambient vector lies in the Cartan subspace."""
        if len(v) != self.ambient_dim:
            return False
        return self.family != "A" or sum(as_vector(v)) == 0

    def to_json(self) -> dict:
        return {"family": self.family, "rank": self.rank, "roots": [list(r) for r in self.roots]}

    @classmethod
    def from_json(cls, data: dict) -> "RootDatum":
        datum = build_root_datum(data["family"], int(data["rank"]))
        if "roots" in data and {tuple(int(x) for x in r) for r in data["roots"]} != set(datum.roots):
            raise UnsupportedFamily("root list does not match the named family")
        return datum


def weyl_order(family: str, rank: int) -> int:
    if family == "A":
        return factorial(rank + 1)
    if family == "D":
        return 2 ** (rank - 1) * factorial(rank)
    return 2**rank * factorial(rank)


def _unit(n: int, i: int, c: int = 1) -> tuple[int, ...]:
    return tuple(c if k == i else 0 for k in range(n))


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _neg(u):
    return tuple(-a for a in u)


def _reflection(alpha: Sequence[int]) -> Matrix:
    n = len(alpha)
    aa = sum(a * a for a in alpha)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            val = Fraction(int(i == j)) - Fraction(2 * alpha[i] * alpha[j], aa)
            assert val.denominator == 1
            row.append(int(val))
        rows.append(tuple(row))
    return tuple(rows)


def build_root_datum(family: str, rank: int) -> RootDatum:
    family = str(family).upper()
    if family not in FAMILIES:
        raise UnsupportedFamily(f"unknown family {family!r}")
    if not isinstance(rank, int) or rank < 1:
        raise UnsupportedFamily(f"rank must be a positive integer, got {rank!r}")
    if family == "D" and rank < 2:
        raise UnsupportedFamily("type D needs rank >= 2")

    n = rank + 1 if family == "A" else rank
    e = [_unit(n, i) for i in range(n)]
    pos: list[tuple[int, ...]] = []
    for i in range(n):
        for j in range(i + 1, n):
            pos.append(_add(e[i], _neg(e[j])))
            if family != "A":
                pos.append(_add(e[i], e[j]))
    if family in ("B", "BC"):
        pos.extend(e)
    if family in ("C", "BC"):
        pos.extend(_unit(n, i, 2) for i in range(n))

    simple = [_add(e[i], _neg(e[i + 1])) for i in range(n - 1)]
    if family in ("B", "BC"):
        simple.append(e[n - 1])
    elif family == "C":
        simple.append(_unit(n, n - 1, 2))
    elif family == "D":
        simple.append(_add(e[n - 2], e[n - 1]))

    pos = sorted(set(pos), reverse=True)
    roots = tuple(pos + [_neg(a) for a in pos])
    return RootDatum(
        family=family,
        rank=rank,
        roots=roots,
        positive_roots=tuple(pos),
        simple_roots=tuple(simple),
        simple_reflections=tuple(_reflection(a) for a in simple),
    )


def act(w: Matrix, v: Sequence) -> tuple:
    return mat_vec(w, v)


def weyl_elements(datum: RootDatum, cap: int) -> list[Matrix]:
    """All Weyl group elements as integer matrices, by closure under the simple reflections."""
    order = datum.weyl_order
    if order > cap:
        raise CapExceeded(order, cap)
    start = identity(datum.ambient_dim)
    seen = {start}
    out = [start]
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for s in datum.simple_reflections:
            ws = mat_mul(s, w)
            if ws not in seen:
                if len(seen) >= cap:
                    raise CapExceeded(order, cap)
                seen.add(ws)
                out.append(ws)
                queue.append(ws)
    return out


def signed_permutations(datum: RootDatum) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Yield ``(perm, signs)`` for each Weyl element, in the kernels' scan order.

    The element sends ``x`` to ``y`` with ``y[perm[i]] = signs[i] * x[i]``.
    Permutations run lexicographically; sign masks run 0..2^n-1 with bit i
    flipping coordinate i.
    """
    n = datum.ambient_dim
    code = datum.group_code
    for perm in itertools.permutations(range(n)):
        if code == GROUP_PERM:
            yield perm, (1,) * n
            continue
        for mask in range(1 << n):
            if code == GROUP_EVEN_SIGNED and bin(mask).count("1") % 2:
                continue
            yield perm, tuple(-1 if mask >> i & 1 else 1 for i in range(n))


def signed_perm_matrix(perm: Sequence[int], signs: Sequence[int]) -> Matrix:
    n = len(perm)
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[perm[i]][i] = signs[i]
    return tuple(tuple(r) for r in rows)


def iter_weyl_elements(datum: RootDatum) -> Iterator[Matrix]:
    """Lazy enumeration of W as matrices, for ranks where materializing is wasteful."""
    for perm, signs in signed_permutations(datum):
        yield signed_perm_matrix(perm, signs)


def dominant_representative(datum: RootDatum, v: Sequence, *, with_element: bool = False):
    """Closed dominant chamber representative of the W-orbit of ``v``.

    With ``with_element`` returns ``(rep, w)`` where ``w`` is an integer
    matrix in W with ``w v = rep``.
    """
    x = as_vector(v)
    n = len(x)
    if n != datum.ambient_dim:
        raise ValueError(f"vector of length {n} in ambient of dimension {datum.ambient_dim}")
    if datum.family == "A":
        order = sorted(range(n), key=lambda i: (-x[i], i))
        signs = [1] * n
    else:
        order = sorted(range(n), key=lambda i: (-abs(x[i]), i))
        signs = [-1 if xi < 0 else 1 for xi in x]
        if datum.family == "D":
            negatives = sum(1 for s in signs if s < 0)
            if negatives % 2:
                last = order[-1]
                # flipping a zero coordinate is free; otherwise the smallest stays negative
                signs[last] = -signs[last]
    perm = [0] * n
    for pos, i in enumerate(order):
        perm[i] = pos
    w = signed_perm_matrix(perm, signs)
    rep = mat_vec(w, x)
    rep = tuple(Fraction(c) for c in rep)
    return (rep, w) if with_element else rep


def is_dominant(datum: RootDatum, v: Sequence) -> bool:
    return tuple(as_vector(v)) == dominant_representative(datum, v)


def rho_h(datum: RootDatum, y: Sequence) -> Fraction:
    """Sum over positive roots of ``|alpha(Y)|``, i.e. half the sum over all roots."""
    yv = as_vector(y)
    total = Fraction(0)
    for alpha in datum.positive_roots:
        total += abs(sum((a * b for a, b in zip(alpha, yv)), Fraction(0)))
    return total


def simple_root_coefficients(datum: RootDatum, root: Sequence[int]) -> tuple[Fraction, ...]:
    coeffs = solve(datum.simple_roots, root)
    if coeffs is None:
        raise ValueError(f"{root} is not in the span of the simple roots")
    return coeffs


def dumps(datum: RootDatum) -> str:
    return json.dumps(datum.to_json(), sort_keys=True)
