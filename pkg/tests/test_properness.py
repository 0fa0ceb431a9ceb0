import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from properlab.cartan import SL, SO, MatrixGroupSpec
from properlab.cones import ConeUnion, PolyCone, RationalSubspace, asymptotic_cone
from properlab.errors import CapExceeded, EmptySamples, ProperlabInputError
from properlab.properness import (
    Partition,
    ReductivePair,
    calabi_markus,
    cocompact_standard_check,
    is_proper_reductive,
    is_proper_reductive_reference,
    is_sharp_cones,
    is_similar_reductive,
    is_similar_reductive_reference,
    partitions,
    sharpness_fit,
    sl2_formula_audit,
    sl2_irreducible_formula,
    sl2_proper_oracle,
    sl2_proper_printed_formula,
    sl2_proper_shortcut,
    sl2_ray,
    verify_witness,
)
from properlab.rootdata import build_root_datum

S = RationalSubspace.span
KINDS = [(f, r) for f in "ABCD" for r in range(1, 4) if not (f == "D" and r < 2)]


def _pair(family, rank, L, H):
    d = build_root_datum(family, rank)
    n = d.ambient_dim
    mk = lambda vs: S(vs, n) if vs else RationalSubspace.zero(n)
    return ReductivePair(d, mk(L), mk(H))


def test_sl2_model_not_proper():
    v = is_proper_reductive(_pair("A", 1, [(1, -1)], [(1, -1)]))
    assert not v.proper
    w, x = v.witness
    assert w == ((1, 0), (0, 1)) and x == (1, -1)


def test_trivial_a_L_is_proper():
    for f, r in KINDS:
        d = build_root_datum(f, r)
        full = S(d.a_basis(), d.ambient_dim)
        assert is_proper_reductive(ReductivePair(d, RationalSubspace.zero(d.ambient_dim), full)).proper


def test_sl3_witness():
    pair = _pair("A", 2, [(2, 0, -2)], [(1, -1, 0)])
    v = is_proper_reductive(pair)
    assert not v.proper
    w, x = v.witness
    assert tuple(sum(w[i][j] * c for j, c in enumerate((2, 0, -2))) for i in range(3)) == (2, -2, 0)
    assert verify_witness(pair, w, x)


def test_cap():
    pair = _pair("A", 4, [(1, -1, 0, 0, 0)], [(0, 0, 0, 1, -1)])
    with pytest.raises(CapExceeded):
        is_proper_reductive(pair, cap=100)


def test_pair_validation():
    d = build_root_datum("A", 2)
    with pytest.raises(ProperlabInputError):
        ReductivePair(d, S([(1, 0, 0)]), RationalSubspace.zero(3))
    with pytest.raises(ProperlabInputError):
        ReductivePair(d, S([(1, -1)]), RationalSubspace.zero(3))


def _random_pair(rng):
    d = build_root_datum(*rng.choice(KINDS))
    basis = d.a_basis()

    def sub():
        vecs = []
        for _ in range(rng.randint(0, len(basis))):
            c = [rng.randint(-2, 2) for _ in basis]
            vecs.append([sum(ci * b[i] for ci, b in zip(c, basis)) for i in range(d.ambient_dim)])
        vecs = [v for v in vecs if any(v)]
        return S(vecs, d.ambient_dim) if vecs else RationalSubspace.zero(d.ambient_dim)

    return ReductivePair(d, sub(), sub())


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9))
def test_kernel_matches_reference_and_is_symmetric(seed):
    pair = _random_pair(random.Random(seed))
    fast = is_proper_reductive(pair)
    assert fast.proper == is_proper_reductive_reference(pair).proper
    assert fast.proper == is_proper_reductive(pair.swapped()).proper
    if not fast.proper:
        assert verify_witness(pair, *fast.witness)
    assert is_similar_reductive(pair) == is_similar_reductive_reference(pair)


def test_backends_agree(backend):
    rng = random.Random(17)
    for _ in range(100):
        pair = _random_pair(rng)
        assert is_proper_reductive(pair, backend=backend) == is_proper_reductive(pair)


def test_calabi_markus_examples():
    for n in range(2, 6):
        assert not calabi_markus(MatrixGroupSpec("O", p=n, q=1), MatrixGroupSpec("O", p=n - 1, q=1))
    assert calabi_markus(SL(3), SL(2))
    assert not calabi_markus(SO(3, 2), SO(3, 2))
    with pytest.raises(ProperlabInputError):
        calabi_markus()


def test_calabi_markus_cross_check():
    d = build_root_datum("B", 2)
    full = S(d.a_basis(), 2)
    assert calabi_markus(ranks=(2, 1), pair=ReductivePair(d, full, S([(1, 0)])))
    assert not calabi_markus(ranks=(2, 2), pair=ReductivePair(d, full, full))


def test_cocompact_examples():
    for n in range(1, 5):
        assert cocompact_standard_check(4 * n, 2 * n, 2 * n)
    assert cocompact_standard_check(5, 5, 0)
    assert not cocompact_standard_check(3, 1, 1)


def test_partitions():
    assert [len(list(partitions(n))) for n in range(1, 9)] == [1, 2, 3, 5, 7, 11, 15, 22]
    p = Partition.from_multiplicities({3: 1, 2: 1})
    assert p.n == 5 and p.m(3) == 1 and str(p) == "3+2"


def test_sl2_ray_examples():
    assert sl2_ray(Partition.from_parts([2])) == (1, -1)
    assert sl2_ray(Partition.from_parts([3])) == (2, 0, -2)
    assert sl2_ray(Partition.from_multiplicities({2: 1, 1: 2})) == (1, -1, 0, 0)
    for n in range(1, 8):
        for p in partitions(n):
            assert sum(sl2_ray(p)) == 0


def test_sl2_examples():
    assert sl2_proper_oracle(Partition.from_parts([4]), 3)
    assert not sl2_proper_oracle(Partition.from_parts([3]), 2)
    p = Partition.from_multiplicities({3: 1, 2: 1})
    assert sl2_proper_oracle(p, 2) == sl2_proper_shortcut(p, 2)
    # zero ray counts as proper
    assert sl2_proper_oracle(Partition.from_parts([1, 1, 1]), 2)
    # the printed inequality misfires on an irreducible case
    five = Partition.from_parts([5])
    assert sl2_proper_oracle(five, 3) and sl2_irreducible_formula(5, 3)
    assert not sl2_proper_printed_formula(five, 3)


def test_sl2_audit_full_sweep():
    report = sl2_formula_audit(8)
    s = report.summary()
    assert s["cases"] == 350
    assert not report.shortcut_disagreements
    assert not report.irreducible_disagreements
    assert report.printed_disagreements
    assert any(r.partition == "5" and r.m == 3 for r in report.printed_disagreements)


def test_sl2_audit_threads_and_backends(backend):
    a = sl2_formula_audit(6, backend=backend).summary()
    b = sl2_formula_audit(6, threads=4).summary()
    assert a == b


def test_sharpness_line_at_angle():
    phi = math.pi / 4
    pts = [(k * math.cos(phi), k * math.sin(phi)) for k in range(1, 200)]
    fit = sharpness_fit(pts, ConeUnion.of([S([(1, 0)])]), [0.1 * i for i in range(8)])
    assert abs(fit.c_asymptotic - math.sqrt(2) / 2) < 1e-6
    assert all(fit.satisfied(c, C) for c, C in fit.constants)
    cs = [c for c, _ in fit.pareto]
    Cs = [C for _, C in fit.pareto]
    assert cs == sorted(cs) and Cs == sorted(Cs)


def test_sharpness_inside_mu_H():
    pts = [(k, 0) for k in range(1, 50)]
    fit = sharpness_fit(pts, ConeUnion.of([S([(1, 0)])]), [0.5])
    assert fit.c_asymptotic == 0
    assert fit.constants == ((0.5, 0.5 * 49),)


def test_sharpness_single_sample():
    fit = sharpness_fit([(3, 4)], ConeUnion.of([S([(0, 1)])]), [3 / 5])
    assert fit.constants == ((0.6, 0.0),)
    with pytest.raises(EmptySamples):
        sharpness_fit([], ConeUnion.of([S([(0, 1)])]), [0.5])


def test_sharp_cones_gives_positive_slope():
    rng = np.random.default_rng(4)
    v = np.array([2.0, 1.0])
    pts = [k * v + rng.uniform(-1, 1, 2) for k in range(1, 3000)]
    mu_H = ConeUnion.of([S([(1, 0)])])
    assert is_sharp_cones(asymptotic_cone(pts), mu_H)
    assert sharpness_fit(pts, mu_H, [0.1]).c_asymptotic > 0
