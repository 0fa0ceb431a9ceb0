"""The acceptance battery behind ``properlab selftest``.

Every check returns a :class:`CheckResult` whose JSON form is a pure
function of the seed: timings are kept out of it so runs with different
thread counts can be compared byte for byte.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .cartan import (
    SL,
    SO,
    U,
    MatrixGroupSpec,
    Sp,
    algebra_dim,
    cartan_dims,
    cartan_projection_gl,
    pair_signature,
    real_rank,
    real_rank_bruteforce,
    standard_embedding,
    torus_intersection,
)
from .catalog import cm_infinite, tangential_table_audit
from .cones import ConeUnion, PolyCone, RationalSubspace, asymptotic_cone, pitchfork_unions
from .errors import NonCompactKernel
from .properness import (
    Partition,
    ReductivePair,
    calabi_markus,
    cocompact_standard_check,
    is_proper_reductive,
    is_similar_reductive,
    sharpness_fit,
    sl2_formula_audit,
)
from .rootdata import build_root_datum
from .tempered import WeightSystem, p_V, sampled_lower_bound, weights_adjoint, weights_direct_sum, weights_standard
from .volume import MCConfig, Shape, exact_box_overlap, mc_overlap, q_estimate

MC_SHARDS = 8


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    details: dict
    budget: float
    seconds: float = field(default=0.0, compare=False)

    @property
    def within_budget(self) -> bool:
        return self.seconds < self.budget

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed, "details": self.details}

    def line(self) -> str:
        mark = "PASS" if self.passed and self.within_budget else "FAIL"
        return f"[{mark}] {self.number:2d}. {self.title} ({self.seconds:.2f}s / budget {self.budget:g}s)"


def _random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def check_cartan(seed: int = 0, threads: int = 1) -> tuple[bool, dict]:
    rng = np.random.default_rng([seed, 1])
    worst = 0.0
    for _ in range(1000):
        H = np.sort(rng.integers(-5, 6, size=5))[::-1].astype(float)
        g = _random_orthogonal(rng, 5) @ np.diag(np.exp(H)) @ _random_orthogonal(rng, 5)
        worst = max(worst, float(np.abs(cartan_projection_gl(g) - H).max()))
    mu_id = cartan_projection_gl(np.eye(5))
    exact_zero = bool(np.all(mu_id == 0.0))
    return worst <= 1e-8 and exact_zero, {"max_error": worst, "identity_exact_zero": exact_zero, "samples": 1000}


def _sl2_mu_cone(matrices) -> PolyCone:
    return asymptotic_cone([cartan_projection_gl(g) for g in matrices])


def _random_subspace(rng: random.Random, datum) -> RationalSubspace:
    basis = datum.a_basis()
    d = rng.randint(0, len(basis))
    vecs = []
    for _ in range(d):
        coeffs = [rng.randint(-2, 2) for _ in basis]
        vecs.append([sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(datum.ambient_dim)])
    vecs = [v for v in vecs if any(v)]
    return RationalSubspace.span(vecs, datum.ambient_dim) if vecs else RationalSubspace.zero(datum.ambient_dim)


def check_properness(seed: int = 0, threads: int = 1) -> tuple[bool, dict]:
    # SL(2,R): A = diag(e^t, e^-t), N = unipotent; both Cartan projections fill a+
    ts = [s * 1.4**k for k in range(1, 30) for s in (1, -1)]
    mu_A = _sl2_mu_cone([np.diag([math.exp(t / 2000), math.exp(-t / 2000)]) for t in ts])
    mu_N = _sl2_mu_cone([np.array([[1.0, t], [0.0, 1.0]]) for t in ts])
    # a+ is the ray through (1, -1)
    cones_ok = all(len(c.generators) == 1 and c.generators[0][0] == -c.generators[0][1] > 0 for c in (mu_A, mu_N))
    A_pitch_A = pitchfork_unions(ConeUnion.of([mu_A]), ConeUnion.of([mu_A]))
    A_pitch_N = pitchfork_unions(ConeUnion.of([mu_A]), ConeUnion.of([mu_N]))
    sl2 = build_root_datum("A", 1)
    full = RationalSubspace.full(2).span(sl2.a_basis(), 2)
    engine = is_proper_reductive(ReductivePair(sl2, full, full))

    rng = random.Random(seed * 7919 + 2)
    kinds = [(f, r) for f in "ABCD" for r in range(1, 5) if not (f == "D" and r < 2)]
    asym = 0
    proper_count = 0
    for _ in range(500):
        datum = build_root_datum(*rng.choice(kinds))
        pair = ReductivePair(datum, _random_subspace(rng, datum), _random_subspace(rng, datum))
        v1 = is_proper_reductive(pair)
        v2 = is_proper_reductive(pair.swapped())
        asym += v1.proper != v2.proper
        proper_count += v1.proper
    ok = cones_ok and not A_pitch_A and not A_pitch_N and not engine.proper and asym == 0
    return ok, {
        "mu_A_cone": [[str(x) for x in g] for g in mu_A.generators],
        "mu_N_cone": [[str(x) for x in g] for g in mu_N.generators],
        "A_pitchfork_A": A_pitch_A,
        "A_pitchfork_N": A_pitch_N,
        "engine_A_on_SL2_mod_A": engine.to_json(),
        "symmetry_pairs": 500,
        "symmetry_violations": asym,
        "proper_pairs": proper_count,
    }


def check_sl2_audit(seed: int = 0, threads: int = 1) -> tuple[bool, dict]:
    report = sl2_formula_audit(8, threads=threads)
    s = report.summary()
    example = Partition.from_parts([5])
    flagged = any(r["partition"] == str(example) and r["m"] == 3 for r in s["printed_disagreements"])
    ok = (
        s["shortcut_agreement"] == s["cases"]
        and s["irreducible_agreement"] == s["irreducible_cases"]
        and len(s["printed_disagreements"]) > 0
        and flagged
    )
    s["example_n5_m3_flagged"] = flagged
    return ok, s


def _random_weight_system(rng: random.Random, datum) -> WeightSystem:
    n = datum.ambient_dim
    basis = datum.a_basis()
    k = rng.randint(datum.rank, datum.rank + 2)
    weights = []
    for _ in range(k):
        cov = [rng.randint(-2, 2) for _ in range(n)]
        if datum.family == "A":
            cov[-1] -= sum(cov)  # keep the covector off the trace direction
        if any(sum(c * b[i] for i, c in enumerate(cov)) for b in basis):
            weights.append((cov, rng.randint(1, 2)))
    return WeightSystem.of(weights, n, label="random")


def check_pv(seed: int = 0, threads: int = 1) -> tuple[bool, dict]:
    res = {}
    sl2 = build_root_datum("A", 1)
    res["sl2_std"] = p_V(weights_standard(sl2), sl2).value
    for fam, r in (("A", 1), ("A", 2), ("B", 2)):
        d = build_root_datum(fam, r)
        res[f"adjoint_{fam}{r}"] = p_V(weights_adjoint(d), d).value
    sl3 = build_root_datum("A", 2)
    ws3 = weights_standard(sl3)
    res["sl3_std"] = p_V(ws3, sl3).value
    bound = sampled_lower_bound(ws3, sl3, samples=200_000, seed=seed)
    rng = random.Random(seed * 104729 + 4)
    identity_ok = 0
    tried = 0
    kinds = [("A", 1), ("A", 2), ("B", 2), ("C", 2), ("A", 3)]
    while identity_ok + (tried - identity_ok) < 20:
        datum = build_root_datum(*rng.choice(kinds))
        ws = _random_weight_system(rng, datum)
        try:
            single = p_V(ws, datum, chambers=False).value
        except NonCompactKernel:
            continue
        tried += 1
        double = p_V(weights_direct_sum(ws, ws), datum, chambers=False).value
        identity_ok += double == single / 2
    ok = (
        res["sl2_std"] == 2
        and all(res[k] == 1 for k in ("adjoint_A1", "adjoint_A2", "adjoint_B2"))
        and res["sl3_std"] == 4
        and 4 - bound <= 1e-3
        and identity_ok == 20
    )
    details = {k: str(v) for k, v in res.items()}
    details.update({"sl3_sampled_lower_bound": bound, "direct_sum_cases": tried, "direct_sum_exact": identity_ok})
    return ok, details


def check_volume(seed: int = 0, threads: int = 1) -> tuple[bool, dict]:
    worst_rel = 0.0
    for t in np.linspace(-6, 6, 49):
        v = exact_box_overlap([1.0, 1.0], [1.0, -1.0], float(t))
        worst_rel = max(worst_rel, abs(v - 4 * math.exp(-abs(t))) / (4 * math.exp(-abs(t))))
    exact_ok = worst_rel <= 4 * np.finfo(float).eps

    S2 = Shape.box([1.0, 1.0])
    inside = 0
    for trial in range(200):
        t = 0.05 + 2.95 * trial / 199
        cfg = MCConfig(100_000, seed=seed * 1000 + trial, shards=MC_SHARDS)
        est, err = mc_overlap(S2, np.diag([math.exp(t), math.exp(-t)]), cfg, threads=threads)
        inside += abs(est - 4 * math.exp(-t)) <= 3 * err

    cfg = MCConfig(1_000_000, seed=seed, shards=MC_SHARDS)
    q2 = q_estimate(SL(2), S2, [[1, -1]], cfg, threads=threads)
    q3 = q_estimate(SL(3), Shape.box([1.0] * 3), [[1, 0, -1], [3, 1, -4], [4, -1, -3], [2, 1, -3]], cfg, threads=threads)
    ok = exact_ok and inside >= 198 and abs(q2.q_hat - 2.0) <= 0.15 and abs(q3.q_hat - 4.0) <= 0.3
    return ok, {
        "exact_max_rel_error": worst_rel,
        "mc_within_3_stderr": inside,
        "mc_trials": 200,
        "q_sl2": q2.to_json(),
        "q_sl3": q3.to_json(),
    }


def _orthogonal_datum(r: int, split_equal: bool):
    """Restricted roots of so(a, b) with min(a, b) = r: D_r when a = b, else B_r.

    so(1,1) has no restricted roots; B_1 stands in for it (only dim a matters below).
    """
    if split_equal and r >= 2:
        return build_root_datum("D", r)
    return build_root_datum("B", r)


def check_calabi_markus(seed: int = 0, threads: int = 1) -> tuple[bool, dict]:
    rows = []
    bad = 0
    for total in range(1, 9):
        for p in range(0, total + 1):
            q = total - p
            G, H = MatrixGroupSpec("O", p=p + 1, q=q), MatrixGroupSpec("O", p=p, q=q)
            rG, rH = real_rank(G), real_rank(H)
            brute = (real_rank_bruteforce(G), real_rank_bruteforce(H))
            rank_test = rG > rH
            if rG == 0:
                similar = True  # both compact
            else:
                datum = _orthogonal_datum(rG, p + 1 == q)
                a_h = torus_intersection(G, standard_embedding(H, G))
                full = RationalSubspace.span(datum.a_basis(), datum.ambient_dim)
                aH = RationalSubspace.span(a_h, datum.ambient_dim) if a_h else RationalSubspace.zero(datum.ambient_dim)
                pair = ReductivePair(datum, full, aH)
                similar = is_similar_reductive(pair)
                calabi_markus(ranks=(rG, rH), pair=pair)
            agree = rank_test == (not similar) == cm_infinite(p, q) and brute == (rG, rH)
            bad += not agree
            rows.append({"p": p, "q": q, "rank_G": rG, "rank_H": rH, "similar": similar, "infinite": rank_test, "agree": agree})
    return bad == 0, {"pairs": len(rows), "disagreements": bad, "rows": rows}


def check_dimensions(seed: int = 0, threads: int = 1) -> tuple[bool, dict]:
    mismatches = []
    count = 0

    def expect(spec, want_p):
        nonlocal count
        count += 1
        k, p = cartan_dims(spec)
        if p != want_p or k + p != algebra_dim(spec):
            mismatches.append({"group": str(spec), "dim_k": k, "dim_p": p, "expected_p": want_p})

    for n in range(1, 9):
        expect(SL(n), n * (n + 1) // 2 - 1)
        expect(Sp(n), n * (n + 1))
    for p in range(0, 9):
        for q in range(0, 9):
            if p + q == 0:
                continue
            expect(SO(p, q), p * q)
            expect(U(p, q), 2 * p * q)
            expect(MatrixGroupSpec("SU", p=p, q=q), 2 * p * q)
    triples = []
    for n in range(1, 5):
        G, H, L = SO(2 * n, 2), SO(2 * n, 1), U(n, 1)
        dG, dH, dL = (cartan_dims(s)[1] for s in (G, H, L))
        dGH = pair_signature(G, standard_embedding(H, G))[0]
        dGL = pair_signature(G, standard_embedding(L, G))[0]
        ok = cocompact_standard_check(dG, dH, dL) and dGH == dL and dGL == dH
        triples.append({"n": n, "d_G": dG, "d_H": dH, "d_L": dL, "d_G/H": dGH, "d_G/L": dGL, "cocompact": ok})
    passed = not mismatches and all(t["cocompact"] for t in triples)
    return passed, {"groups_checked": count, "mismatches": mismatches, "triples": triples}


def check_tangential(seed: int = 0, threads: int = 1) -> tuple[bool, dict]:
    rows = tangential_table_audit(11)
    off = [r for r in rows if not r.match]
    ok = len(off) == 1 and off[0].cell == 2 and off[0].computed == "4N" and off[0].printed == "2N"
    return ok, {"rows": [r.to_json() for r in rows], "mismatches": [r.cell for r in off]}


def check_sharpness(seed: int = 0, threads: int = 1) -> tuple[bool, dict]:
    rng = np.random.default_rng([seed, 9])
    v = np.array([math.cos(math.pi / 4), math.sin(math.pi / 4)])
    ks = np.arange(1, 4001)
    pts = ks[:, None] * v + rng.uniform(-0.5, 0.5, size=(len(ks), 2))
    mu_H = ConeUnion.of([RationalSubspace.span([[1, 0]])])
    fit = sharpness_fit(pts.tolist(), mu_H, [i / 20 for i in range(15)])
    all_ok = all(fit.satisfied(c, C) for c, C in fit.constants)
    err = abs(fit.c_asymptotic - math.sqrt(2) / 2)
    return err <= 1e-3 and all_ok, {"c_asymptotic": fit.c_asymptotic, "error": err, "pairs_checked": len(fit.constants), "all_satisfied": all_ok, "pareto": [list(p) for p in fit.pareto]}


def check_determinism(seed: int = 0, threads: int = 1) -> tuple[bool, dict]:
    """Thread-sensitive pieces rerun at 1 and 8 threads must agree exactly."""
    S = Shape.box([1.0, 1.0, 1.0])
    cfg = MCConfig(200_000, seed=seed, shards=MC_SHARDS)
    g = np.diag([math.exp(0.7), 1.0, math.exp(-0.7)])
    mc = [mc_overlap(S, g, cfg, threads=t) for t in (1, 8)]
    audit = [sl2_formula_audit(6, threads=t).summary() for t in (1, 8)]
    same = mc[0] == mc[1] and audit[0] == audit[1]
    return same, {"mc_estimate": mc[0][0], "mc_stderr": mc[0][1], "identical": same}


CHECKS: list[tuple[int, str, float, Callable]] = [
    (1, "Cartan projection recovers H on GL(5,R)", 5.0, check_cartan),
    (2, "Properness engine: SL(2) model and (a_L, a_H) symmetry", 30.0, check_properness),
    (3, "SL(2) partition audit n <= 8", 120.0, check_sl2_audit),
    (4, "p_V exact values and direct-sum identity", 60.0, check_pv),
    (5, "Volume lab: exact overlap, MC coverage, q estimates", 180.0, check_volume),
    (6, "Calabi-Markus audit p + q <= 8", 10.0, check_calabi_markus),
    (7, "Dimension identities and cocompact triples", 30.0, check_dimensions),
    (8, "Tangential table audit", 1.0, check_tangential),
    (9, "Sharpness constants on synthetic orbits", 5.0, check_sharpness),
    (10, "Determinism across thread counts", 60.0, check_determinism),
]


def run_check(number: int, seed: int = 0, threads: int = 1) -> CheckResult:
    for num, title, budget, fn in CHECKS:
        if num == number:
            t0 = time.perf_counter()
            ok, details = fn(seed=seed, threads=threads)
            return CheckResult(num, title, bool(ok), _jsonable(details), budget, time.perf_counter() - t0)
    raise KeyError(number)


def run_all(seed: int = 0, threads: int = 1, only: list[int] | None = None) -> list[CheckResult]:
    return [run_check(num, seed, threads) for num, *_ in CHECKS if only is None or num in only]


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x
