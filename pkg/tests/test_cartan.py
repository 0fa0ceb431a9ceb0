import numpy as np
import pytest

from properlab.cartan import (
    GL,
    SL,
    SO,
    SU,
    U,
    MatrixGroupSpec,
    Sp,
    algebra_dim,
    cartan_dims,
    cartan_projection_gl,
    lie_algebra_basis,
    pair_signature,
    real_rank,
    real_rank_bruteforce,
    standard_embedding,
    torus_intersection,
)
from properlab.errors import NotASubalgebraOfG, ProperlabInputError, SingularMatrix
from properlab.linalg import rank


def _orth(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def test_basis_examples():
    assert cartan_dims(SL(2)) == (1, 2)
    assert cartan_dims(SO(2, 1)) == (1, 2)
    assert lie_algebra_basis(SO(2, 1)).dim == 3


@pytest.mark.parametrize("spec", [SL(3), SO(2, 2), U(2, 1), SU(2, 1), Sp(2), GL(2)])
def test_basis_invariants(spec):
    b = lie_algebra_basis(spec)
    assert rank(b.basis) == b.dim == algebra_dim(spec)
    for M in b.matrices()[: len(b.k_part)]:
        assert np.array_equal(-M.T, M)  # theta X = X on k
    for M in b.matrices()[len(b.k_part):]:
        assert np.array_equal(-M.T, -M)  # theta X = -X on p


@pytest.mark.parametrize("n", range(1, 9))
def test_sl_and_sp_dims(n):
    assert cartan_dims(SL(n))[1] == n * (n + 1) // 2 - 1
    assert cartan_dims(Sp(n))[1] == n * (n + 1)


@pytest.mark.parametrize("p,q", [(p, q) for p in range(0, 5) for q in range(0, 5) if p + q >= 1])
def test_indefinite_dims(p, q):
    k, pp = cartan_dims(SO(p, q))
    assert pp == p * q and k + pp == algebra_dim(SO(p, q))
    assert cartan_dims(U(p, q))[1] == 2 * p * q
    assert cartan_dims(SU(p, q))[1] == 2 * p * q


def test_so_2n_2():
    for n in range(1, 4):
        assert cartan_dims(SO(2 * n, 2))[1] == 4 * n


def test_pair_signature_examples():
    for p, q in [(2, 1), (3, 2), (3, 1), (2, 2)]:
        G, H = MatrixGroupSpec("O", p=p, q=q), MatrixGroupSpec("O", p=p - 1, q=q)
        assert pair_signature(G, standard_embedding(H, G)) == (q, p - 1)
    G = SO(3, 2)
    assert pair_signature(G, lie_algebra_basis(G)) == (0, 0)


def test_pair_signature_rejects_non_subalgebra():
    G = SL(3)
    with pytest.raises(NotASubalgebraOfG):
        pair_signature(G, lie_algebra_basis(GL(3)))
    with pytest.raises(NotASubalgebraOfG):
        pair_signature(G, lie_algebra_basis(SL(2)))


def test_unitary_realification_embedding():
    G = SO(4, 2)
    d, e = pair_signature(G, standard_embedding(U(2, 1), G))
    assert d == cartan_dims(G)[1] - cartan_dims(U(2, 1))[1]
    assert e == cartan_dims(G)[0] - cartan_dims(U(2, 1))[0]


@pytest.mark.parametrize("spec", [SO(3, 1), SO(2, 2), SL(2), SL(3), SU(2, 2), U(2, 1), Sp(2), SO(4, 2)])
def test_real_rank_bruteforce(spec):
    assert real_rank_bruteforce(spec) == real_rank(spec)


def test_real_rank_examples():
    assert real_rank(SO(5, 1)) == 1
    assert real_rank(SL(2)) == 1
    assert real_rank(SU(2, 2)) == 2


def test_torus_intersection():
    G, H = SO(3, 3), SO(2, 3)
    a_h = torus_intersection(G, standard_embedding(H, G))
    assert len(a_h) == 2 and all(v[2] == 0 for v in a_h)


def test_mu_examples():
    assert np.all(cartan_projection_gl(np.eye(4)) == 0.0)
    assert np.allclose(cartan_projection_gl(np.diag([np.e**2, np.e**-2])), [2, -2], atol=1e-12)
    rng = np.random.default_rng(3)
    for _ in range(20):
        g = _orth(rng, 3) @ np.diag(np.exp([3.0, 1.0, -4.0])) @ _orth(rng, 3)
        assert np.allclose(cartan_projection_gl(g), [3, 1, -4], atol=1e-9)


def test_mu_errors():
    with pytest.raises(SingularMatrix):
        cartan_projection_gl([[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(SingularMatrix):
        cartan_projection_gl(np.diag([1.0, 1e-13]))
    with pytest.raises(ProperlabInputError):
        cartan_projection_gl([[1.0, 2.0]])


def test_mu_invariants():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        g = rng.standard_normal((4, 4))
        mu = cartan_projection_gl(g)
        assert np.all(np.diff(mu) <= 0)
        assert np.allclose(cartan_projection_gl(_orth(rng, 4) @ g @ _orth(rng, 4)), mu, atol=1e-9)
        assert abs(mu.sum() - np.log(abs(np.linalg.det(g)))) < 1e-9
    for _ in range(100):
        g = rng.standard_normal((5, 5))
        assert np.allclose(cartan_projection_gl(np.linalg.inv(g)), np.sort(-cartan_projection_gl(g))[::-1], atol=1e-9)


def test_spec_json():
    s = MatrixGroupSpec.from_json({"family": "SO", "p": 2, "q": 1})
    assert s == SO(2, 1) and MatrixGroupSpec.from_json(s.to_json()) == s
    with pytest.raises(ProperlabInputError):
        MatrixGroupSpec.from_json({"family": "SO", "p": 2, "q": 1, "r": 0})
    with pytest.raises(ProperlabInputError):
        MatrixGroupSpec("SO", p=0, q=0)
