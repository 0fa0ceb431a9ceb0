import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from properlab.cones import (
    ConeUnion,
    PolyCone,
    RationalSubspace,
    asymptotic_cone,
    cones_intersect_nontrivially,
    distance_to_subspace_union,
    lp_feasible,
    pitchfork_unions,
    similar_subspace_unions,
    subspace_intersection,
    verify_witness,
)
from properlab.errors import EmptyTail, MixedMembers, ProperlabInputError

S = RationalSubspace.span


def test_intersection_examples():
    assert subspace_intersection(S([(1, 0)]), S([(0, 1)])).is_zero()
    assert subspace_intersection(S([(1, 1, -2)]), S([(1, 1, -2), (1, -1, 0)])) == S([(1, 1, -2)])
    assert subspace_intersection(S([(1, 0, -1)]), S([(0, 1, -1)])).is_zero()


def test_cone_examples():
    assert cones_intersect_nontrivially(PolyCone.of([(1, 0)]), PolyCone.of([(0, 1)])) == (False, None)
    ok, w = cones_intersect_nontrivially(PolyCone.of([(1, 1)]), PolyCone.of([(1, 0), (0, 1)]))
    assert ok and w == (1, 1)
    C = PolyCone.of([(2, -1, -1), (1, 1, -2)])
    D = PolyCone.of([(1, 0, -1)])
    ok, w = cones_intersect_nontrivially(C, D)
    assert ok and w == (1, 0, -1)


def test_lp():
    assert lp_feasible([[1, 1]], [1]) is not None
    assert lp_feasible([[1, 1], [1, 1]], [1, 2]) is None


def test_distance_examples():
    xaxis, yaxis = S([(1, 0)]), S([(0, 1)])
    assert distance_to_subspace_union((2, 0), ConeUnion.of([xaxis])) == 0
    assert distance_to_subspace_union((1, 1), ConeUnion.of([xaxis])) == 1
    assert distance_to_subspace_union((3, 4), ConeUnion.of([xaxis, yaxis])) == 3


def test_asymptotic_cone_examples():
    cone = asymptotic_cone([(n, 0) for n in range(1, 101)], radius_floor=10)
    assert cone.generators == ((Fraction(1), Fraction(0)),)
    cone = asymptotic_cone([(n, math.log(n)) for n in range(1, 10_001)])
    (g,) = cone.generators
    assert math.atan2(float(g[1]), float(g[0])) < 1e-3
    with pytest.raises(EmptyTail):
        asymptotic_cone([(1, 0), (0, 1)], radius_floor=5)


def test_similarity_rejects_cones():
    with pytest.raises(MixedMembers):
        similar_subspace_unions(ConeUnion.of([PolyCone.of([(1, 0)])]), ConeUnion.of([S([(1, 0)])]))


def test_json_roundtrip():
    V = S([(Fraction(1, 2), 1, 0), (0, 0, 3)])
    assert RationalSubspace.from_json(V.to_json()) == V
    assert V.to_json()["basis"][0] == ["1", "2", "0"]
    C = PolyCone.of([(1, -1, 0)])
    assert PolyCone.from_json(C.to_json()) == C
    U = ConeUnion.of([V, C])
    assert ConeUnion.from_json(U.to_json()) == U
    with pytest.raises(ProperlabInputError):
        RationalSubspace.from_json({"basis": [[1, 0]], "extra": 1})


def _rand_subspace(rng, dim=3):
    k = rng.randint(0, dim)
    vecs = [[rng.randint(-2, 2) for _ in range(dim)] for _ in range(k)]
    vecs = [v for v in vecs if any(v)]
    return S(vecs, dim) if vecs else RationalSubspace.zero(dim)


def _rand_cone(rng, dim=3):
    gens = [[rng.randint(-2, 2) for _ in range(dim)] for _ in range(rng.randint(1, 3))]
    gens = [g for g in gens if any(g)] or [[1] + [0] * (dim - 1)]
    return PolyCone.of(gens)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_pitchfork_symmetric_and_witnessed(seed):
    rng = random.Random(seed)
    A = ConeUnion.of([_rand_cone(rng) if rng.random() < 0.5 else _rand_subspace(rng) or _rand_cone(rng) for _ in range(2)])
    B = ConeUnion.of([_rand_cone(rng) for _ in range(2)])
    assert pitchfork_unions(A, B) == pitchfork_unions(B, A)
    for a in A.members:
        for b in B.members:
            ok, w = cones_intersect_nontrivially(a, b)
            if ok:
                assert verify_witness(a, b, w)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_similarity_is_equivalence(seed):
    rng = random.Random(seed)
    pool = [_rand_subspace(rng, 2) for _ in range(3)]
    unions = [ConeUnion.of(rng.sample(pool, rng.randint(1, 3))) for _ in range(3)]
    A, B, C = unions
    assert similar_subspace_unions(A, A)
    assert similar_subspace_unions(A, B) == similar_subspace_unions(B, A)
    if similar_subspace_unions(A, B) and similar_subspace_unions(B, C):
        assert similar_subspace_unions(A, C)
    # similar unions see the same pitchfork verdicts
    A2 = ConeUnion.of(list(A.members) + [A.members[0]])
    D = ConeUnion.of([_rand_cone(rng, 2)])
    assert similar_subspace_unions(A, A2)
    assert pitchfork_unions(A, D) == pitchfork_unions(A2, D)
