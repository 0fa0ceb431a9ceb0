"""Dynamical volumes ``vol(S cap gS)``: exact box formulas, sharded Monte Carlo,
decay-exponent fits and the empirical optimal exponent q(G; V).

Randomness comes from Philox streams keyed by ``(seed, shard)``; the counter
walks the sample index, so results do not depend on how shards are
scheduled.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .cartan import MatrixGroupSpec
from .errors import InsufficientSignal, ProperlabInputError, SingularMap
from .rootdata import RootDatum, build_root_datum, rho_h
from .tempered import WeightSystem, rho_value, weights_standard

log = logging.getLogger(__name__)

SHAPE_KINDS = ("box", "ball", "k_invariant_ball")
BLOCK = 1 << 17
SIGNAL_FLOOR = 10.0
WALL_TOL = 1e-6


@dataclass(frozen=True)
class Shape:
    kind: str
    dim: int
    extents: tuple[float, ...]  # half widths for a box, (radius,) for balls

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ProperlabInputError(f"unknown shape kind {self.kind!r}")
        if self.dim < 1:
            raise ProperlabInputError("shape dimension must be positive")
        want = self.dim if self.kind == "box" else 1
        if len(self.extents) != want or any(not (e > 0) for e in self.extents):
            raise ProperlabInputError(f"{self.kind} needs {want} positive extent(s)")

    @classmethod
    def box(cls, half_widths: Sequence[float]) -> "Shape":
        return cls("box", len(half_widths), tuple(float(h) for h in half_widths))

    @classmethod
    def ball(cls, dim: int, radius: float = 1.0, k_invariant: bool = False) -> "Shape":
        return cls("k_invariant_ball" if k_invariant else "ball", dim, (float(radius),))

    @property
    def kernel_code(self) -> int:
        return 0 if self.kind == "box" else 1

    @property
    def half_widths(self) -> np.ndarray:
        """Half widths of the bounding box."""
        if self.kind == "box":
            return np.array(self.extents)
        return np.full(self.dim, self.extents[0])

    @property
    def volume(self) -> float:
        if self.kind == "box":
            return math.prod(2 * h for h in self.extents)
        r = self.extents[0]
        return math.pi ** (self.dim / 2) * r**self.dim / math.gamma(self.dim / 2 + 1)

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "extents": list(self.extents)}

    @classmethod
    def from_json(cls, data: dict) -> "Shape":
        unknown = set(data) - {"kind", "dim", "extents"}
        if unknown:
            raise ProperlabInputError(f"unknown shape fields {sorted(unknown)}")
        ext = tuple(float(e) for e in data["extents"])
        dim = int(data.get("dim", len(ext)))
        return cls(data["kind"], dim, ext)


@dataclass(frozen=True)
class MCConfig:
    samples: int = 1_000_000
    seed: int = 0
    shards: int = 1

    def __post_init__(self):
        if self.samples < 1000:
            raise ProperlabInputError("Monte Carlo needs at least 1000 samples")
        if self.shards < 1:
            raise ProperlabInputError("shards must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ProperlabInputError("seed must fit in 64 bits")

    def shard_sizes(self) -> list[int]:
        base, extra = divmod(self.samples, self.shards)
        return [base + (i < extra) for i in range(self.shards)]


def exact_box_overlap(half_widths: Sequence[float], exponents: Sequence[float], t: float) -> float:
    """``vol(S cap exp(t diag(u)) S)`` for a box S: ``prod 2 R_i min(1, e^{t u_i})``."""
    if len(half_widths) != len(exponents):
        raise ProperlabInputError("half widths and exponents differ in length")
    if abs(math.fsum(exponents)) > 1e-12 * max(1.0, max(abs(u) for u in exponents)):
        raise ProperlabInputError("exponents must sum to zero (volume-preserving flow)")
    return math.prod(2 * R * min(1.0, math.exp(t * u)) for R, u in zip(half_widths, exponents))


def _shard_hits(shape: Shape, ginv: np.ndarray, seed: int, shard: int, count: int, backend) -> int:
    gen = np.random.Generator(np.random.Philox(key=[seed, shard]))
    half = shape.half_widths
    hits = 0
    done = 0
    while done < count:
        m = min(BLOCK, count - done)
        x = gen.uniform(-1.0, 1.0, size=(m, shape.dim)) * half
        hits += kernels.overlap_count(x, ginv, half if shape.kind == "box" else half[:1], shape.kernel_code, backend=backend)
        done += m
    return hits


def mc_hits(shape: Shape, g, cfg: MCConfig, threads: int = 1, backend: str | None = None) -> int:
    g = np.asarray(g, dtype=float)
    if g.shape != (shape.dim, shape.dim):
        raise ProperlabInputError(f"map must be {shape.dim}x{shape.dim}")
    det = np.linalg.det(g)
    if not np.isfinite(det) or abs(det) < 1e-300 or np.linalg.cond(g) > 1e15:
        raise SingularMap("map is not invertible")
    ginv = np.linalg.inv(g)
    sizes = cfg.shard_sizes()
    jobs = [(i, n) for i, n in enumerate(sizes) if n]
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(lambda j: _shard_hits(shape, ginv, cfg.seed, j[0], j[1], backend), jobs))
    else:
        counts = [_shard_hits(shape, ginv, cfg.seed, i, n, backend) for i, n in jobs]
    return sum(counts)


def mc_overlap(shape: Shape, g, cfg: MCConfig, threads: int = 1, backend: str | None = None) -> tuple[float, float]:
    """Unbiased estimate of ``vol(S cap gS)`` and its binomial standard error."""
    hits = mc_hits(shape, g, cfg, threads=threads, backend=backend)
    box = float(np.prod(2 * shape.half_widths))
    p = hits / cfg.samples
    return box * p, box * math.sqrt(p * (1 - p) / cfg.samples)


# ----------------------------------------------------------------------------
# flows along a


def flow_exponents(ws: WeightSystem, u: Sequence[float]) -> np.ndarray:
    """Diagonal exponents of ``tau(u)`` on V, weights repeated by multiplicity."""
    uu = np.asarray(u, dtype=float)
    out = []
    for cov, mult in ws.weights:
        lam = float(np.dot([float(c) for c in cov], uu))
        out.extend([lam] * mult)
    return np.array(out)


def rho_V_float(ws: WeightSystem, u: Sequence[float]) -> float:
    return 0.5 * float(np.abs(flow_exponents(ws, u)).sum())


def _default_weights(shape: Shape, datum: RootDatum, weights: WeightSystem | None) -> WeightSystem:
    ws = weights if weights is not None else weights_standard(datum)
    if ws.dim != shape.dim:
        raise ProperlabInputError(f"representation has dimension {ws.dim}, shape has {shape.dim}")
    return ws


@dataclass(frozen=True)
class VolumePoint:
    t: float
    estimate: float
    stderr: float
    exact: float | None

    @property
    def usable(self) -> bool:
        if self.stderr == 0.0:
            return self.estimate > 0
        return self.estimate > SIGNAL_FLOOR * self.stderr


def overlap_series(
    shape: Shape,
    exponents: Sequence[float],
    t_grid: Sequence[float],
    cfg: MCConfig | None,
    threads: int = 1,
    backend: str | None = None,
) -> list[VolumePoint]:
    """Volumes along ``t -> exp(t diag(exponents))``; ``cfg=None`` means exact (boxes only)."""
    exps = np.asarray(exponents, dtype=float)
    out = []
    for k, t in enumerate(t_grid):
        exact = exact_box_overlap(shape.extents, exps, t) if shape.kind == "box" else None
        if cfg is None:
            if exact is None:
                raise ProperlabInputError("exact volumes are only available for boxes")
            out.append(VolumePoint(float(t), exact, 0.0, exact))
            continue
        # a fresh stream per grid point keeps points independent
        sub = MCConfig(cfg.samples, (cfg.seed * 1_000_003 + k) % 2**64, cfg.shards)
        g = np.diag(np.exp(t * exps))
        est, err = mc_overlap(shape, g, sub, threads=threads, backend=backend)
        out.append(VolumePoint(float(t), est, err, exact))
    return out


@dataclass(frozen=True)
class DecayFit:
    direction: tuple[float, ...]
    kappa: float
    r2: float
    window: tuple[float, float]
    points: tuple[VolumePoint, ...] = field(repr=False, default=())


def fit_decay(points: Sequence[VolumePoint], direction: Sequence[float]) -> DecayFit:
    use = [p for p in points if p.usable]
    if len(use) < 4:
        raise InsufficientSignal(f"only {len(use)} grid points above the noise floor")
    t = np.array([p.t for p in use])
    y = np.log([p.estimate for p in use])
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(tuple(float(c) for c in direction), float(-slope), r2, (float(t.min()), float(t.max())), tuple(points))


def default_t_grid(ws: WeightSystem, u: Sequence[float], points: int = 12, depth: float = 8.0) -> list[float]:
    """Grid reaching a predicted decay of ``e^-depth``; the fit itself never sees the prediction."""
    rate = rho_V_float(ws, u)
    if rate <= 0:
        raise InsufficientSignal("no decay along this direction")
    t_max = depth / rate
    return [t_max * (k + 1) / points for k in range(points)]


def decay_fit(
    shape: Shape,
    datum: RootDatum,
    u: Sequence[float],
    t_grid: Sequence[float] | None,
    cfg: MCConfig | None,
    weights: WeightSystem | None = None,
    threads: int = 1,
    backend: str | None = None,
) -> DecayFit:
    """Least-squares decay rate kappa of ``vol(S cap exp(t tau(u)) S)``."""
    ws = _default_weights(shape, datum, weights)
    exps = flow_exponents(ws, u)
    grid = list(t_grid) if t_grid is not None else default_t_grid(ws, u)
    return fit_decay(overlap_series(shape, exps, grid, cfg, threads=threads, backend=backend), u)


@dataclass
class QEstimate:
    q_hat: float
    table: list[dict]
    warnings: list[str]

    def to_json(self) -> dict:
        return {"q_hat": self.q_hat, "directions": self.table, "warnings": self.warnings}


def _haar_exponent(datum: RootDatum, u: np.ndarray) -> float:
    return float(sum(np.dot(a, u) for a in np.array(datum.positive_roots, dtype=float)))


def q_estimate(
    group: MatrixGroupSpec,
    shape: Shape,
    directions: Sequence[Sequence[float]],
    cfg: MCConfig | None,
    weights: WeightSystem | None = None,
    t_grid: Sequence[float] | None = None,
    threads: int = 1,
    backend: str | None = None,
) -> QEstimate:
    """Empirical q(G; V) = max over dominant directions of rho_h(u) / kappa(u), for SL(n, R)."""
    if group.family != "SL":
        raise ProperlabInputError("q_estimate supports SL(n, R) only")
    datum = build_root_datum("A", group.n - 1)
    ws = _default_weights(shape, datum, weights)
    roots = np.array(datum.positive_roots, dtype=float)
    table, warnings = [], []
    for u in directions:
        u = np.asarray(u, dtype=float)
        if u.shape != (datum.ambient_dim,) or abs(u.sum()) > 1e-9 * max(1.0, np.abs(u).max()):
            raise ProperlabInputError(f"direction {u.tolist()} is not in a (trace zero, length {datum.ambient_dim})")
        u = u / np.linalg.norm(u)
        vals = roots @ u
        if (vals < -WALL_TOL).any():
            raise ProperlabInputError(f"direction {u.tolist()} is not dominant")
        if (vals < WALL_TOL).any():
            msg = f"direction {u.tolist()} lies within {WALL_TOL} of a wall; skipped"
            log.warning(msg)
            warnings.append(msg)
            continue
        fit = decay_fit(shape, datum, u, t_grid, cfg, weights=ws, threads=threads, backend=backend)
        haar = _haar_exponent(datum, u)
        table.append(
            {
                "direction": [float(c) for c in u],
                "rho_h": haar,
                "kappa": fit.kappa,
                "ratio": haar / fit.kappa,
                "r2": fit.r2,
                "window": list(fit.window),
            }
        )
    if not table:
        raise InsufficientSignal("no usable direction")
    return QEstimate(max(row["ratio"] for row in table), table, warnings)


def sandwich_check(
    shape: Shape,
    u: Sequence[float],
    t_grid: Sequence[float],
    cfg: MCConfig | None,
    datum: RootDatum | None = None,
    weights: WeightSystem | None = None,
    threads: int = 1,
    bound: float = 1e3,
) -> tuple[float, float, bool]:
    """Envelope constants of ``vol(S cap tu.S) * e^{rho_V(tu)}`` over the usable window."""
    if datum is None:
        datum = build_root_datum("A", shape.dim - 1)
    ws = _default_weights(shape, datum, weights)
    exps = flow_exponents(ws, u)
    rate = 0.5 * float(np.abs(exps).sum())
    pts = [p for p in overlap_series(shape, exps, t_grid, cfg, threads=threads) if p.usable]
    if len(pts) < 2:
        raise InsufficientSignal("fewer than two usable grid points")
    comp = [p.estimate * math.exp(rate * abs(p.t)) for p in pts]
    c1, c2 = min(comp), max(comp)
    return c1, c2, c2 / c1 < bound


def exact_rho_ratio(datum: RootDatum, ws: WeightSystem, u: Sequence) -> float:
    """rho_h(u) / rho_V(u) in exact arithmetic (for comparison tables)."""
    return float(rho_h(datum, u) / rho_value(ws, u))
