"""rho_V, the invariant p_V and the temperedness reading of L^2(V).

``p_V`` is the maximum over ``a \\ {0}`` of ``rho_h / rho_V``.  Both
functions are linear on every chamber of the arrangement cut out by the
roots and the weights, so the maximum of their ratio is attained on an
extreme ray of some chamber.  Those rays are exactly the one-dimensional
intersections of hyperplanes, which we enumerate exactly.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .errors import ArrangementTooLarge, DegenerateAmbient, NonCompactKernel, ProperlabInputError
from .linalg import as_fraction, as_vector, dot, fraction_str, nullspace, primitive, rank, span_basis
from .rootdata import RootDatum, is_dominant, rho_h

MAX_SUBSETS = 10**6
MAX_FLATS = 20_000


@dataclass(frozen=True)
class WeightSystem:
    ambient_dim: int
    weights: tuple[tuple[tuple[Fraction, ...], int], ...]
    label: str = ""

    @classmethod
    def of(cls, weights: Iterable[tuple[Sequence, int]], ambient_dim: int | None = None, label: str = "") -> "WeightSystem":
        merged: dict[tuple[Fraction, ...], int] = {}
        for cov, mult in weights:
            cov = as_vector(cov)
            if int(mult) < 1:
                raise ProperlabInputError("weight multiplicities must be >= 1")
            merged[cov] = merged.get(cov, 0) + int(mult)
        if ambient_dim is None:
            if not merged:
                raise ProperlabInputError("empty weight system needs an ambient dimension")
            ambient_dim = len(next(iter(merged)))
        for cov in merged:
            if len(cov) != ambient_dim:
                raise ProperlabInputError("covector length does not match the ambient dimension")
        return cls(ambient_dim, tuple(sorted(merged.items(), reverse=True)), label)

    @property
    def dim(self) -> int:
        """Dimension of V (sum of multiplicities)."""
        return sum(m for _, m in self.weights)

    def transform(self, w: Sequence[Sequence]) -> "WeightSystem":
        """Weights of the twisted action: ``lambda -> lambda o w^-1`` (``w`` a signed permutation)."""
        # for orthogonal w, lambda o w^-1 has coordinate vector w lambda
        return WeightSystem.of(
            ((tuple(sum((w[i][j] * c[j] for j in range(len(c))), Fraction(0)) for i in range(len(c))), m) for c, m in self.weights),
            self.ambient_dim,
            self.label,
        )

    def to_json(self) -> list:
        return [{"covector": [fraction_str(x) for x in c], "mult": m} for c, m in self.weights]

    @classmethod
    def from_json(cls, data: Sequence[dict], ambient_dim: int | None = None) -> "WeightSystem":
        out = []
        for item in data:
            unknown = set(item) - {"covector", "mult"}
            if unknown:
                raise ProperlabInputError(f"unknown weight fields {sorted(unknown)}")
            out.append((item["covector"], int(item.get("mult", 1))))
        return cls.of(out, ambient_dim)


def rho_value(ws: WeightSystem, y: Sequence) -> Fraction:
    """``rho_V(Y) = 1/2 sum_j mult_j |lambda_j(Y)|``."""
    yv = as_vector(y)
    total = Fraction(0)
    for cov, mult in ws.weights:
        total += mult * abs(dot(cov, yv))
    return total / 2


def weights_standard(datum_or_n) -> WeightSystem:
    """Weights of the standard representation.

    An integer ``n`` (or a type A datum) gives SL(n, R) on R^n; types B, C, D
    give the defining representations of so(r+1, r), sp(2r, R), so(r, r).
    """
    if isinstance(datum_or_n, int):
        n, family = datum_or_n, "A"
    else:
        n, family = datum_or_n.ambient_dim, datum_or_n.family
    e = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    if family == "A":
        return WeightSystem.of(((v, 1) for v in e), n, f"std SL({n})")
    if family not in ("B", "C", "D"):
        raise ProperlabInputError(f"no standard representation for family {family}")
    items = [(v, 1) for v in e] + [(tuple(-x for x in v), 1) for v in e]
    if family == "B":
        items.append(((Fraction(0),) * n, 1))
    return WeightSystem.of(items, n, f"std {family}{n}")


def weights_adjoint(datum: RootDatum) -> WeightSystem:
    zero = (Fraction(0),) * datum.ambient_dim
    items = [(r, 1) for r in datum.roots] + [(zero, datum.rank)]
    return WeightSystem.of(items, datum.ambient_dim, f"ad {datum.family}{datum.rank}")


def weights_direct_sum(*systems: WeightSystem) -> WeightSystem:
    if not systems:
        raise ProperlabInputError("direct sum of nothing")
    dim = systems[0].ambient_dim
    items = [wm for ws in systems for wm in ws.weights]
    label = " + ".join(ws.label for ws in systems if ws.label)
    return WeightSystem.of(items, dim, label)


@dataclass(frozen=True)
class PvResult:
    value: Fraction | float  # math.inf when rho_V vanishes somewhere rho_h does not
    argmax_ray: tuple[int, ...]
    chamber_count: int | None
    ray_count: int

    @property
    def is_finite(self) -> bool:
        return not (isinstance(self.value, float) and math.isinf(self.value))

    def to_json(self) -> dict:
        return {
            "value": fraction_str(self.value) if self.is_finite else "inf",
            "argmax_ray": list(self.argmax_ray),
            "chamber_count": self.chamber_count,
            "ray_count": self.ray_count,
        }


def _reduced_frame(datum: RootDatum, ws: WeightSystem):
    """Essential coordinates for the arrangement.

    Returns ``(frame, normals)``: ``frame`` is a list of ambient vectors
    spanning a complement (inside a) of the common kernel of all forms, and
    ``normals`` the distinct hyperplane normals in frame coordinates.
    """
    a_basis = [as_vector(v) for v in datum.a_basis()]
    forms = [tuple(Fraction(x) for x in r) for r in datum.positive_roots]
    forms += [c for c, _ in ws.weights if any(c)]
    restricted = [tuple(dot(f, b) for b in a_basis) for f in forms]
    restricted = [f for f in restricted if any(f)]
    if not restricted:
        raise DegenerateAmbient("every root and weight vanishes on a")
    # complement of the lineality space: the row space, in a-coordinates
    rows = span_basis(restricted)
    frame = []
    for r in rows:
        y = [Fraction(0)] * datum.ambient_dim
        for c, b in zip(r, a_basis):
            if c:
                y = [s + c * t for s, t in zip(y, b)]
        frame.append(tuple(y))
    normals = set()
    for f in forms:
        nf = tuple(dot(f, y) for y in frame)
        if any(nf):
            normals.add(primitive(nf))
    return frame, sorted(normals)


def _frame_to_ambient(frame, z) -> tuple[int, ...]:
    y = [Fraction(0)] * len(frame[0])
    for c, b in zip(z, frame):
        if c:
            y = [s + c * t for s, t in zip(y, b)]
    return primitive(y, canonical_sign=False)


def _rays_from_subsets(normals, dim, subsets):
    out = set()
    for sub in subsets:
        rows = [normals[i] for i in sub]
        ns = nullspace(rows, dim)
        if len(ns) == 1:
            v = primitive(ns[0])
            out.add(v)
            out.add(tuple(-x for x in v))
    return out


def enumerate_rays(datum: RootDatum, ws: WeightSystem, max_subsets: int = MAX_SUBSETS, threads: int = 1, chunk: int = 4096):
    """Candidate extreme rays (ambient primitive integer vectors), sorted."""
    frame, normals = _reduced_frame(datum, ws)
    r = len(frame)
    if r == 1:
        rays_z = {(1,), (-1,)}
    else:
        total = comb(len(normals), r - 1)
        if total > max_subsets:
            raise ArrangementTooLarge(f"{total} hyperplane subsets exceed the cap {max_subsets}")
        subsets = itertools.combinations(range(len(normals)), r - 1)
        chunks = []
        while True:
            block = list(itertools.islice(subsets, chunk))
            if not block:
                break
            chunks.append(block)
        if threads > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(lambda b: _rays_from_subsets(normals, r, b), chunks))
        else:
            parts = [_rays_from_subsets(normals, r, b) for b in chunks]
        rays_z = set().union(*parts) if parts else set()
        # coordinate directions of the frame, as a fallback for degenerate inputs
        for i in range(r):
            e = tuple(int(i == j) for j in range(r))
            rays_z.add(e)
            rays_z.add(tuple(-x for x in e))
    rays = {_frame_to_ambient(frame, z) for z in rays_z}
    return sorted(rays), frame, normals


def count_chambers(normals: Sequence[Sequence[int]], dim: int, max_flats: int = MAX_FLATS) -> int | None:
    """Number of regions of a central arrangement (Zaslavsky), or None past ``max_flats``."""
    H = [tuple(Fraction(x) for x in h) for h in normals]
    if not H:
        return 1

    def closure(idx: frozenset) -> frozenset:
        base = [H[i] for i in idx]
        rk = rank(base)
        return frozenset(i for i in range(len(H)) if i in idx or rank(base + [H[i]]) == rk)

    bottom = frozenset()
    mobius = {bottom: 1}
    level = [bottom]
    flats = [bottom]
    for _ in range(dim):
        nxt = []
        seen = set()
        for F in level:
            for h in range(len(H)):
                if h in F:
                    continue
                G = closure(F | {h})
                if G not in seen:
                    seen.add(G)
                    nxt.append(G)
        if not nxt:
            break
        for G in nxt:
            mobius[G] = -sum(mu for X, mu in mobius.items() if X < G)
        flats.extend(nxt)
        if len(flats) > max_flats:
            return None
        level = nxt
    return sum(abs(mu) for mu in mobius.values())


def p_V(
    ws: WeightSystem,
    datum: RootDatum,
    *,
    allow_infinite: bool = False,
    max_subsets: int = MAX_SUBSETS,
    threads: int = 1,
    chambers: bool = True,
) -> PvResult:
    """Exact ``p_V = max_{Y in a \\ 0} rho_h(Y) / rho_V(Y)``."""
    if ws.ambient_dim != datum.ambient_dim:
        raise ProperlabInputError("weight system and root datum have different ambient dimensions")
    if datum.rank == 0:
        raise DegenerateAmbient("rank zero")
    rays, frame, normals = enumerate_rays(datum, ws, max_subsets=max_subsets, threads=threads)
    best_key = None
    best = None
    infinite_ray = None
    for y in rays:
        num = rho_h(datum, y)
        den = rho_value(ws, y)
        if den == 0:
            if num > 0 and infinite_ray is None:
                infinite_ray = y
            continue
        ratio = num / den
        key = (ratio, is_dominant(datum, y), y)
        if best_key is None or key > best_key:
            best_key, best = key, (ratio, y)
    n_chambers = count_chambers(normals, len(frame)) if chambers else None
    if infinite_ray is not None:
        res = PvResult(math.inf, infinite_ray, n_chambers, len(rays))
        if not allow_infinite:
            raise NonCompactKernel(infinite_ray, res)
        return res
    return PvResult(best[0], best[1], n_chambers, len(rays))


def sampled_lower_bound(ws: WeightSystem, datum: RootDatum, samples: int = 100_000, seed: int = 0) -> float:
    """Numeric lower bound for p_V: maximum of the ratio over random directions in a."""
    rng = np.random.default_rng(seed)
    basis = np.array(datum.a_basis(), dtype=float)
    Y = rng.standard_normal((samples, basis.shape[0])) @ basis
    roots = np.array(datum.positive_roots, dtype=float)
    covs = np.array([[float(x) for x in c] for c, _ in ws.weights])
    mult = np.array([m for _, m in ws.weights], dtype=float)
    num = np.abs(Y @ roots.T).sum(axis=1)
    den = 0.5 * (np.abs(Y @ covs.T) * mult).sum(axis=1)
    ok = den > 0
    return float((num[ok] / den[ok]).max())


CONVENTIONS = ("derived_chh", "printed")


def temperedness_verdict(pv, convention: str = "derived_chh") -> str:
    """'tempered', 'boundary' or 'not_tempered' for L^2(V).

    ``derived_chh``: coefficients are almost L^{p_V}, so tempered iff p_V <= 2
    (boundary at equality).  ``printed``: tempered iff p_V >= 2.
    """
    value = pv.value if isinstance(pv, PvResult) else pv
    if convention not in CONVENTIONS:
        raise ProperlabInputError(f"unknown convention {convention!r}")
    if isinstance(value, float) and math.isinf(value):
        return "not_tempered" if convention == "derived_chh" else "tempered"
    value = as_fraction(value)
    if value == 2:
        return "boundary"
    if convention == "derived_chh":
        return "tempered" if value < 2 else "not_tempered"
    return "tempered" if value > 2 else "not_tempered"


def temperedness_report(pv) -> dict:
    return {c: temperedness_verdict(pv, c) for c in CONVENTIONS} | {"default": "derived_chh"}
