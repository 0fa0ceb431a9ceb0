import math

import numpy as np
import pytest

from properlab.cartan import SL, SO
from properlab.errors import InsufficientSignal, ProperlabInputError, SingularMap
from properlab.rootdata import build_root_datum
from properlab.tempered import weights_direct_sum, weights_standard
from properlab.volume import (
    MCConfig,
    Shape,
    decay_fit,
    exact_box_overlap,
    fit_decay,
    mc_overlap,
    overlap_series,
    q_estimate,
    sandwich_check,
)

BOX2 = Shape.box([1.0, 1.0])
A1, A2 = build_root_datum("A", 1), build_root_datum("A", 2)


def test_exact_examples():
    assert exact_box_overlap([1, 1], [1, -1], 3) == pytest.approx(4 * math.exp(-3), rel=1e-15)
    assert exact_box_overlap([2, 0.5, 3], [1, 1, -2], 0) == 4 * 1 * 6
    assert exact_box_overlap([1, 1, 1], [1, 1, -2], 1) == pytest.approx(8 * math.exp(-2), rel=1e-15)
    with pytest.raises(ProperlabInputError):
        exact_box_overlap([1, 1], [1, 1], 1)


def test_mc_examples():
    cfg = MCConfig(1_000_000, seed=3, shards=4)
    est, err = mc_overlap(BOX2, np.eye(2), cfg)
    assert est == 4.0 and err == 0.0
    est, err = mc_overlap(BOX2, np.diag([math.e, 1 / math.e]), cfg)
    assert abs(est - 4 / math.e) <= 3 * err
    est, err = mc_overlap(Shape.ball(2), np.eye(2), cfg)
    assert abs(est - math.pi) <= 3 * err


def test_mc_coverage():
    inside = 0
    rng = np.random.default_rng(8)
    for trial in range(200):
        R = rng.uniform(0.5, 2.0, 2)
        t = rng.uniform(0, 3)
        est, err = mc_overlap(Shape.box(R), np.diag([math.exp(t), math.exp(-t)]), MCConfig(20_000, seed=trial))
        inside += abs(est - exact_box_overlap(R, [1, -1], t)) <= 3 * err
    assert inside >= 198


def test_mc_inverse_symmetry():
    g = np.array([[2.0, 1.0], [1.0, 1.0]])  # det 1
    cfg = MCConfig(400_000, seed=1)
    a, ea = mc_overlap(BOX2, g, cfg)
    b, eb = mc_overlap(BOX2, np.linalg.inv(g), MCConfig(400_000, seed=2))
    assert abs(a - b) <= 3 * math.hypot(ea, eb)


def test_mc_determinism():
    S = Shape.box([1.0, 2.0, 0.5])
    g = np.diag([math.exp(0.4), 1.0, math.exp(-0.4)])
    cfg = MCConfig(300_000, seed=42, shards=6)
    ref = mc_overlap(S, g, cfg)
    assert mc_overlap(S, g, cfg, threads=3) == ref
    assert mc_overlap(S, g, cfg, threads=6) == ref
    assert mc_overlap(S, g, cfg, backend="python") == ref
    assert mc_overlap(S, g, MCConfig(300_000, seed=43, shards=6)) != ref


def test_mc_errors():
    with pytest.raises(SingularMap):
        mc_overlap(BOX2, np.array([[1.0, 1.0], [1.0, 1.0]]), MCConfig(1000))
    with pytest.raises(ProperlabInputError):
        MCConfig(999)
    with pytest.raises(ProperlabInputError):
        MCConfig(1000, shards=0)
    with pytest.raises(ProperlabInputError):
        Shape("box", 2, (1.0, -1.0))
    with pytest.raises(ProperlabInputError):
        mc_overlap(BOX2, np.eye(3), MCConfig(1000))


def test_shape_json():
    s = Shape.ball(3, 2.0, k_invariant=True)
    assert Shape.from_json(s.to_json()) == s
    assert Shape.box([1, 2]).volume == 8
    assert Shape.ball(2).volume == pytest.approx(math.pi)


@pytest.mark.parametrize("u", [(1, -1), (2, -2)])
def test_decay_fit_exact_sl2(u):
    fit = decay_fit(BOX2, A1, u, [0.5 * k for k in range(1, 12)], None)
    assert abs(fit.kappa - 0.5 * sum(abs(x) for x in u)) < 1e-6
    assert fit.r2 > 1 - 1e-12


def test_decay_fit_exact_sl3():
    S = Shape.box([1.0, 2.0, 3.0])
    for u in [(1, 0, -1), (2, -1, -1), (3, 1, -4)]:
        fit = decay_fit(S, A2, u, None, None)
        assert abs(fit.kappa - 0.5 * sum(abs(x) for x in u)) < 1e-6


def test_insufficient_signal():
    cfg = MCConfig(1000, seed=0)
    with pytest.raises(InsufficientSignal):
        decay_fit(BOX2, A1, (1, -1), [10.0, 11.0, 12.0, 13.0], cfg)
    with pytest.raises(InsufficientSignal):
        fit_decay(overlap_series(BOX2, [1, -1], [0.1, 0.2, 0.3], None), (1, -1))


def test_q_estimate_sl2():
    q = q_estimate(SL(2), BOX2, [[1, -1]], MCConfig(400_000, seed=0, shards=4))
    assert abs(q.q_hat - 2.0) <= 0.15


def test_q_estimate_direct_sum():
    ws = weights_direct_sum(weights_standard(2), weights_standard(2))
    q = q_estimate(SL(2), Shape.box([1.0] * 4), [[1, -1]], MCConfig(400_000, seed=0, shards=4), weights=ws)
    assert abs(q.q_hat - 1.0) <= 0.15


def test_q_estimate_k_invariant_ball():
    q = q_estimate(SL(2), Shape.ball(2, k_invariant=True), [[1, -1]], MCConfig(400_000, seed=0, shards=4))
    assert abs(q.q_hat - 2.0) <= 0.15


@pytest.mark.slow
def test_q_estimate_sl3():
    q = q_estimate(SL(3), Shape.box([1.0] * 3), [[1, 0, -1], [3, 1, -4]], MCConfig(1_000_000, seed=0, shards=8))
    assert abs(q.q_hat - 4.0) <= 0.3
    assert q.table[0]["ratio"] == q.q_hat


def test_q_estimate_wall_and_validation():
    cfg = MCConfig(100_000, seed=0)
    q = q_estimate(SL(3), Shape.box([1.0] * 3), [[1, 0, -1], [1, 1, -2]], cfg)
    assert len(q.table) == 1 and len(q.warnings) == 1
    with pytest.raises(ProperlabInputError):
        q_estimate(SL(3), Shape.box([1.0] * 3), [[-1, 0, 1]], cfg)
    with pytest.raises(ProperlabInputError):
        q_estimate(SL(3), Shape.box([1.0] * 3), [[1, 0, 0]], cfg)
    with pytest.raises(ProperlabInputError):
        q_estimate(SO(2, 1), Shape.box([1.0] * 3), [[1, 0, -1]], cfg)
    with pytest.raises(InsufficientSignal):
        q_estimate(SL(3), Shape.box([1.0] * 3), [[1, 1, -2]], cfg)


def test_sandwich():
    c1, c2, ok = sandwich_check(BOX2, (1, -1), [0.5 * k for k in range(1, 10)], None)
    assert ok and c1 == pytest.approx(4.0) and c2 == pytest.approx(4.0)
    c1, c2, ok = sandwich_check(BOX2, (1, -1), [0.5 * k for k in range(1, 10)], MCConfig(200_000, seed=5))
    assert ok and 0.5 < c1 <= c2 < 8
