"""Properness of reductive actions via the Weyl-orbit intersection test,
similarity, the Calabi-Markus rank test, cocompactness, SL(2,R) partition
embeddings and sharpness constants.

The verdict of :func:`is_proper_reductive` is a certificate: a proper
verdict means every Weyl element was scanned, a non-proper verdict carries
``(w, x)`` with ``x`` in ``a_H`` and ``w^-1 x`` in ``a_L`` checked exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from . import kernels
from .cartan import MatrixGroupSpec, real_rank
from .cones import (
    ConeUnion,
    PolyCone,
    RationalSubspace,
    distance_to_subspace_union,
    pitchfork_unions,
    similar_subspace_unions,
    subspace_intersection,
    union_of_orbit,
)
from .errors import CapExceeded, EmptySamples, ProperlabError, ProperlabInputError
from .linalg import mat_mul, mat_vec, nullspace, primitive, transpose
from .rootdata import RootDatum, build_root_datum, signed_perm_matrix, weyl_elements

DEFAULT_CAP = 10**7


@dataclass(frozen=True)
class ReductivePair:
    datum: RootDatum
    a_L: RationalSubspace
    a_H: RationalSubspace

    def __post_init__(self):
        n = self.datum.ambient_dim
        for name, V in (("a_L", self.a_L), ("a_H", self.a_H)):
            if V.ambient_dim != n:
                raise ProperlabInputError(f"{name} lives in dimension {V.ambient_dim}, ambient is {n}")
            for v in V.basis:
                if not self.datum.contains(v):
                    raise ProperlabInputError(f"{name} is not inside the Cartan subspace")

    def swapped(self) -> "ReductivePair":
        return ReductivePair(self.datum, self.a_H, self.a_L)


@dataclass(frozen=True)
class PropernessVerdict:
    proper: bool
    witness: tuple | None = None  # (w as integer matrix, x as integer vector)
    method: str = "weyl_exhaustive"

    def to_json(self) -> dict:
        out = {"proper": self.proper, "method": self.method}
        if self.witness is not None:
            w, x = self.witness
            out["witness"] = {"weyl": [list(r) for r in w], "vector": [str(c) for c in x]}
        return out


def _check_cap(datum: RootDatum, cap: int) -> None:
    if datum.weyl_order > cap:
        raise CapExceeded(datum.weyl_order, cap)


def _int_columns(V: RationalSubspace) -> list[list[int]]:
    cols = [primitive(v, canonical_sign=False) for v in V.basis]
    return [list(r) for r in zip(*cols)] if cols else [[] for _ in range(V.ambient_dim)]


def verify_witness(pair: ReductivePair, w, x) -> bool:
    if not any(x):
        return False
    winv = transpose(w)  # signed permutation matrices are orthogonal
    return pair.a_H.contains(x) and pair.a_L.contains(mat_vec(winv, x))


def is_proper_reductive(pair: ReductivePair, cap: int = DEFAULT_CAP, backend: str | None = None) -> PropernessVerdict:
    """Proper iff ``a_H cap w a_L = {0}`` for every Weyl element ``w``."""
    datum = pair.datum
    _check_cap(datum, cap)
    d = pair.a_L.dim
    if d == 0 or pair.a_H.is_zero():
        return PropernessVerdict(True)
    E = pair.a_H.equations
    B = _int_columns(pair.a_L)
    if not E:
        # a_H is the whole ambient; identity already meets a_L
        idx, perm, signs = 0, tuple(range(datum.ambient_dim)), (1,) * datum.ambient_dim
    else:
        idx, perm, signs = kernels.weyl_scan(datum.group_code, E, B, d - 1, backend=backend)
    if idx < 0:
        return PropernessVerdict(True)
    w = signed_perm_matrix(perm, signs)
    wB = [mat_vec(w, v) for v in pair.a_L.basis]
    M = [[sum((e * col[t] for t, e in enumerate(row)), Fraction(0)) for col in wB] for row in E] if E else []
    coeffs = nullspace(M, d)[0] if M else tuple(Fraction(int(i == 0)) for i in range(d))
    x = [Fraction(0)] * datum.ambient_dim
    for c, col in zip(coeffs, wB):
        x = [a + c * b for a, b in zip(x, col)]
    x = primitive(x)
    if not verify_witness(pair, w, x):
        raise ProperlabError("internal error: properness witness failed verification")
    return PropernessVerdict(False, (w, x))


def is_proper_reductive_reference(pair: ReductivePair, cap: int = 10**5) -> PropernessVerdict:
    """Slow reference path: materialized W and exact subspace intersections."""
    for w in weyl_elements(pair.datum, cap):
        inter = subspace_intersection(pair.a_H, pair.a_L.transform(w))
        if not inter.is_zero():
            return PropernessVerdict(False, (w, primitive(inter.basis[0])), method="weyl_reference")
    return PropernessVerdict(True, method="weyl_reference")


def _contained_in_some_image(datum: RootDatum, A: RationalSubspace, B: RationalSubspace, backend) -> bool:
    """Whether ``w A`` lies inside ``B`` for some Weyl element ``w``."""
    if A.dim > B.dim:
        return False
    if A.is_zero():
        return True
    E = B.equations
    if not E:
        return True
    idx, _, _ = kernels.weyl_scan(datum.group_code, E, _int_columns(A), 0, backend=backend)
    return idx >= 0


def is_similar_reductive(pair: ReductivePair, cap: int = DEFAULT_CAP, backend: str | None = None) -> bool:
    """``W a_L`` and ``W a_H`` agree as subsets of a."""
    _check_cap(pair.datum, cap)
    if pair.a_L.dim != pair.a_H.dim:
        return False
    return _contained_in_some_image(pair.datum, pair.a_L, pair.a_H, backend) and _contained_in_some_image(
        pair.datum, pair.a_H, pair.a_L, backend
    )


def orbit_union(datum: RootDatum, V: RationalSubspace, cap: int = 10**5) -> ConeUnion:
    return union_of_orbit(V, weyl_elements(datum, cap))


def is_similar_reductive_reference(pair: ReductivePair, cap: int = 10**5) -> bool:
    return similar_subspace_unions(orbit_union(pair.datum, pair.a_L, cap), orbit_union(pair.datum, pair.a_H, cap))


def calabi_markus(
    spec_G: MatrixGroupSpec | None = None,
    spec_H: MatrixGroupSpec | None = None,
    *,
    ranks: tuple[int, int] | None = None,
    pair: ReductivePair | None = None,
) -> bool:
    """True iff G/H admits an infinite discontinuous group (rank_R G > rank_R H).

    With ``pair`` (a = full Cartan subspace of G as ``a_L``, ``a_H`` inside it)
    the rank test is cross-checked against non-similarity of G and H.
    """
    if ranks is None:
        if spec_G is None or spec_H is None:
            raise ProperlabInputError("need either both group specs or explicit ranks")
        ranks = (real_rank(spec_G), real_rank(spec_H))
    verdict = ranks[0] > ranks[1]
    if pair is not None:
        similar = is_similar_reductive(pair)
        if similar == verdict:
            raise ProperlabError(f"rank test ({verdict}) disagrees with similarity test (similar={similar})")
    return verdict


def cocompact_standard_check(d_G: int, d_H: int, d_L: int) -> bool:
    return d_L + d_H == d_G


# ----------------------------------------------------------------------------
# SL(2, R) -> SL(n, R) via partitions


@dataclass(frozen=True)
class Partition:
    """Multiplicities ``m_j`` of the j-dimensional irreducible blocks."""

    multiplicities: tuple[tuple[int, int], ...]  # sorted (j, m_j) with m_j > 0

    def __post_init__(self):
        for j, m in self.multiplicities:
            if j < 1 or m < 0:
                raise ProperlabInputError("partition blocks need j >= 1 and m_j >= 0")

    @classmethod
    def from_multiplicities(cls, mults: dict[int, int]) -> "Partition":
        return cls(tuple(sorted((int(j), int(m)) for j, m in mults.items() if m)))

    @classmethod
    def from_parts(cls, parts: Sequence[int]) -> "Partition":
        mults: dict[int, int] = {}
        for p in parts:
            mults[int(p)] = mults.get(int(p), 0) + 1
        return cls.from_multiplicities(mults)

    @property
    def n(self) -> int:
        return sum(j * m for j, m in self.multiplicities)

    def m(self, j: int) -> int:
        return dict(self.multiplicities).get(j, 0)

    @property
    def parts(self) -> tuple[int, ...]:
        return tuple(j for j, m in sorted(self.multiplicities, reverse=True) for _ in range(m))

    @property
    def is_irreducible(self) -> bool:
        return self.parts == (self.n,)

    def __str__(self) -> str:
        return "+".join(str(p) for p in self.parts)


def partitions(n: int) -> Iterator[Partition]:
    """All partitions of n, parts in non-increasing order, reverse-lexicographic."""

    def rec(rest, largest):
        if rest == 0:
            yield ()
            return
        for k in range(min(rest, largest), 0, -1):
            for tail in rec(rest - k, k):
                yield (k,) + tail

    for parts in rec(n, n):
        yield Partition.from_parts(parts)


def sl2_ray(partition: Partition) -> tuple[int, ...]:
    """Concatenate ``m_j`` copies of ``v_j = (j-1, j-3, ..., 1-j)``, largest blocks first."""
    out: list[int] = []
    for j in partition.parts:
        out.extend(j - 1 - 2 * i for i in range(j))
    return tuple(out)


def _sl2_pair(partition: Partition, m: int) -> ReductivePair:
    n = partition.n
    if not 1 <= m < n:
        raise ProperlabInputError(f"need 1 <= m < n, got m={m}, n={n}")
    datum = build_root_datum("A", n - 1)
    ray = sl2_ray(partition)
    a_L = RationalSubspace.span([ray], n) if any(ray) else RationalSubspace.zero(n)
    h_basis = [[1 if k == i else -1 if k == i + 1 else 0 for k in range(n)] for i in range(m - 1)]
    a_H = RationalSubspace.span(h_basis, n) if h_basis else RationalSubspace.zero(n)
    return ReductivePair(datum, a_L, a_H)


def sl2_proper_oracle(partition: Partition, m: int, backend: str | None = None) -> bool:
    """Exhaustive scan over S_n.  The zero ray (trivial image) counts as proper."""
    return is_proper_reductive(_sl2_pair(partition, m), backend=backend).proper


def sl2_proper_shortcut(partition: Partition, m: int) -> bool:
    """A permuted ray lands in a_H iff it has at least n - m zero entries."""
    ray = sl2_ray(partition)
    if not any(ray):
        return True
    return ray.count(0) < partition.n - m


def sl2_proper_printed_formula(partition: Partition, m: int) -> bool:
    """The closed form ``sum_{j odd} j m_j < n - m``, evaluated as written."""
    return sum(j * mj for j, mj in partition.multiplicities if j % 2) < partition.n - m


def sl2_irreducible_formula(n: int, m: int) -> bool:
    """Irreducible case: proper iff n is even or n - m >= 2."""
    return n % 2 == 0 or n - m >= 2


@dataclass(frozen=True)
class SL2AuditRow:
    partition: str
    n: int
    m: int
    oracle: bool
    shortcut: bool
    printed: bool
    irreducible: bool | None

    def to_json(self) -> dict:
        return {
            "partition": self.partition,
            "n": self.n,
            "m": self.m,
            "oracle": self.oracle,
            "shortcut": self.shortcut,
            "printed": self.printed,
            "irreducible": self.irreducible,
        }


@dataclass
class SL2AuditReport:
    n_max: int
    rows: list[SL2AuditRow] = field(default_factory=list)

    @property
    def shortcut_disagreements(self) -> list[SL2AuditRow]:
        return [r for r in self.rows if r.shortcut != r.oracle]

    @property
    def irreducible_disagreements(self) -> list[SL2AuditRow]:
        return [r for r in self.rows if r.irreducible is not None and r.irreducible != r.oracle]

    @property
    def printed_disagreements(self) -> list[SL2AuditRow]:
        return [r for r in self.rows if r.printed != r.oracle]

    def summary(self) -> dict:
        irr = [r for r in self.rows if r.irreducible is not None]
        return {
            "n_max": self.n_max,
            "cases": len(self.rows),
            "shortcut_agreement": len(self.rows) - len(self.shortcut_disagreements),
            "irreducible_cases": len(irr),
            "irreducible_agreement": len(irr) - len(self.irreducible_disagreements),
            "printed_agreement": len(self.rows) - len(self.printed_disagreements),
            "printed_disagreements": [r.to_json() for r in self.printed_disagreements],
        }


def sl2_formula_audit(n_max: int, backend: str | None = None, threads: int = 1) -> SL2AuditReport:
    """Tabulate oracle vs shortcut vs printed inequality vs irreducible formula."""
    tasks = [(p, m) for n in range(2, n_max + 1) for p in partitions(n) for m in range(1, n)]

    def run(task):
        p, m = task
        return SL2AuditRow(
            partition=str(p),
            n=p.n,
            m=m,
            oracle=sl2_proper_oracle(p, m, backend=backend),
            shortcut=sl2_proper_shortcut(p, m),
            printed=sl2_proper_printed_formula(p, m),
            irreducible=sl2_irreducible_formula(p.n, m) if p.is_irreducible else None,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, tasks))
    else:
        rows = [run(t) for t in tasks]
    return SL2AuditReport(n_max, rows)


# ----------------------------------------------------------------------------
# sharpness


def _round_up(x: Fraction) -> float:
    f = float(x)
    if Fraction(f) < x:
        f = math.nextafter(f, math.inf)
    return f


@dataclass(frozen=True)
class SharpnessFit:
    pareto: tuple[tuple[float, float], ...]
    c_asymptotic: float
    constants: tuple[tuple[float, float], ...]
    distances: tuple[float, ...] = field(repr=False)
    norms: tuple[float, ...] = field(repr=False)
    tail_floor: float = 0.0

    def satisfied(self, c: float, C: float) -> bool:
        """``d_i >= c n_i - C`` for every sample, in exact arithmetic on the stored floats."""
        fc, fC = Fraction(c), Fraction(C)
        return all(Fraction(d) >= fc * Fraction(n) - fC for d, n in zip(self.distances, self.norms))

    def to_json(self) -> dict:
        return {
            "c_asymptotic": self.c_asymptotic,
            "pareto": [list(p) for p in self.pareto],
            "tail_floor": self.tail_floor,
        }


def sharpness_fit(samples, mu_H: ConeUnion, c_grid: Sequence[float], tail_fraction: float = 0.5) -> SharpnessFit:
    """Fit constants with ``||mu(g) - mu(H)|| >= c ||mu(g)|| - C`` over the samples.

    For each c, C(c) is the smallest constant that works (rounded up to the
    next float); ``c_asymptotic`` is the minimal ratio d_i / n_i over the
    samples in the top ``tail_fraction`` of norms.
    """
    samples = [list(s) for s in samples]
    if not samples:
        raise EmptySamples("no samples")
    norms = [math.sqrt(sum(float(x) ** 2 for x in s)) for s in samples]
    dists = [distance_to_subspace_union([Fraction(float(x)) for x in s], mu_H) for s in samples]
    constants = []
    for c in c_grid:
        fc = Fraction(float(c))
        need = max(max(Fraction(0), fc * Fraction(n) - Fraction(d)) for d, n in zip(dists, norms))
        constants.append((float(c), _round_up(need)))
    constants.sort()
    pareto = []
    for c, C in constants:
        # larger c never needs a smaller C, so a pair is dominated only by an equal-C pair with larger c
        while pareto and pareto[-1][1] >= C:
            pareto.pop()
        pareto.append((c, C))
    ordered = sorted(norms)
    k = min(len(ordered) - 1, int(math.floor((1 - tail_fraction) * len(ordered))))
    floor = ordered[k]
    tail = [d / n for d, n in zip(dists, norms) if n >= floor and n > 0]
    c_asym = min(tail) if tail else 0.0
    return SharpnessFit(tuple(pareto), c_asym, tuple(constants), tuple(dists), tuple(norms), floor)


def is_sharp_cones(gamma_inf: PolyCone, mu_H_inf: ConeUnion) -> bool:
    return pitchfork_unions(ConeUnion((gamma_inf,)), mu_H_inf)
