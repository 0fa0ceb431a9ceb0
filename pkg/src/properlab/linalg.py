"""Exact rational linear algebra on lists of vectors.

Rows are reduced with :class:`fractions.Fraction` arithmetic.  Internally the
elimination works on sparse ``{column: value}`` dictionaries, which keeps the
large but very sparse defining systems of the classical Lie algebras cheap.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


def as_fraction(x) -> Fraction:
    """Parse ints, Fractions, ``"p/q"`` strings and (exactly) floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    # numpy integer scalars and friends
    return Fraction(int(x)) if float(x).is_integer() else Fraction(float(x))


def as_vector(v: Iterable) -> tuple[Fraction, ...]:
    return tuple(as_fraction(x) for x in v)


def fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def primitive(v: Sequence, *, canonical_sign: bool = True) -> tuple[int, ...]:
    """Scale a nonzero rational vector to a primitive integer vector.

    With ``canonical_sign`` the first nonzero entry is made positive.
    """
    fr = [as_fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for a in ints:
        g = gcd(g, a)
    if g == 0:
        return tuple(ints)
    ints = [a // g for a in ints]
    if canonical_sign:
        for a in ints:
            if a:
                if a < 0:
                    ints = [-b for b in ints]
                break
    return tuple(ints)


class _Echelon:
    """Incrementally maintained reduced row echelon form (sparse rows)."""

    def __init__(self) -> None:
        self.pivots: dict[int, dict[int, Fraction]] = {}

    def reduce(self, row: dict[int, Fraction]) -> dict[int, Fraction]:
        row = dict(row)
        for col in [c for c in row if c in self.pivots]:
            coef = row.get(col)
            if not coef:
                continue
            for c, val in self.pivots[col].items():
                nv = row.get(c, 0) - coef * val
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
        return row

    def add(self, row: dict[int, Fraction]) -> bool:
        """Insert a row; return True when it raised the rank."""
        row = self.reduce({c: as_fraction(v) for c, v in row.items() if v})
        if not row:
            return False
        col = min(row)
        inv = 1 / row[col]
        row = {c: v * inv for c, v in row.items()}
        for prow in self.pivots.values():
            coef = prow.get(col)
            if coef:
                for c, val in row.items():
                    nv = prow.get(c, 0) - coef * val
                    if nv:
                        prow[c] = nv
                    else:
                        prow.pop(c, None)
        self.pivots[col] = row
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _sparse(v: Sequence) -> dict[int, Fraction]:
    out = {}
    for i, x in enumerate(v):
        if x:
            out[i] = as_fraction(x)
    return out


def rank(rows: Iterable[Sequence]) -> int:
    ech = _Echelon()
    for r in rows:
        ech.add(_sparse(r))
    return ech.rank


def sparse_rank(rows: Iterable[dict[int, Fraction]]) -> int:
    ech = _Echelon()
    for r in rows:
        ech.add(r)
    return ech.rank


def sparse_nullspace(rows: Iterable[dict], ncols: int) -> list[tuple[Fraction, ...]]:
    """Basis of ``{x : row . x = 0 for every row}``, one vector per free column."""
    ech = _Echelon()
    for r in rows:
        ech.add(r)
    basis = []
    for free in range(ncols):
        if free in ech.pivots:
            continue
        x = [Fraction(0)] * ncols
        x[free] = Fraction(1)
        for pc, prow in ech.pivots.items():
            coef = prow.get(free)
            if coef:
                x[pc] = -coef
        basis.append(tuple(x))
    return basis


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple[Fraction, ...]]:
    return sparse_nullspace((_sparse(r) for r in rows), ncols)


def independent_subset(vectors: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal linearly independent subfamily (greedy, in order)."""
    ech = _Echelon()
    keep = []
    for i, v in enumerate(vectors):
        if ech.add(_sparse(v)):
            keep.append(i)
    return keep


def span_basis(vectors: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    vecs = [as_vector(v) for v in vectors]
    return [vecs[i] for i in independent_subset(vecs)]


def solve(columns: Sequence[Sequence], target: Sequence) -> tuple[Fraction, ...] | None:
    """Coefficients ``c`` with ``sum c_i columns[i] == target``, or None."""
    k = len(columns)
    n = len(target)
    # augmented system: rows are coordinates, last column the target
    rows = []
    for i in range(n):
        row = {j: as_fraction(columns[j][i]) for j in range(k) if columns[j][i]}
        if target[i]:
            row[k] = -as_fraction(target[i])
        rows.append(row)
    ech = _Echelon()
    for r in rows:
        ech.add(r)
    if k in ech.pivots:
        return None
    c = [Fraction(0)] * k
    for pc, prow in ech.pivots.items():
        # x_pc + sum prow[c] x_c + prow[k] * 1 = 0 with free x's = 0
        c[pc] = -prow.get(k, Fraction(0))
    return tuple(c)


def mat_vec(m: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(sum((a * b for a, b in zip(row, v)), 0) for row in m)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple[tuple, ...]:
    bt = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), 0) for col in bt) for row in a)


def transpose(m: Sequence[Sequence]) -> tuple[tuple, ...]:
    return tuple(zip(*m))


def identity(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
