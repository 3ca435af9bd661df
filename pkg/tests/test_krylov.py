from fractions import Fraction as F

import numpy as np
import pytest

from mopiep import BandedHessenberg, BreakdownError, Synthetic, ValidationError, build_system, starting_vectors
from mopiep.krylov import (BiorthogonalPair, KrylovOptions, biorthogonal_rescale, iep_kryl, iep_krylreorth,
                           krylreorth_solve, monic_rescale, normalize_start, truncate_bandwidth)
from mopiep.model import StartingData
from mopiep.scalar import RATIONAL

from conftest import FIXTURES, h3, s3


def same(H, G, tol=0.0):
    for a, b in zip((H.sub, H.diag, H.super1, H.super2), (G.sub, G.diag, G.super1, G.super2)):
        d = [abs(float(x) - float(y)) if tol else x - y for x, y in zip(a, b)]
        if tol:
            assert max(d, default=0) <= tol
        else:
            assert all(v == 0 for v in d)


def test_kryl_s3_exact(S3, H3):
    pair, H = iep_kryl(S3.nodes, starting_vectors(S3))
    same(H, H3)
    assert list(pair.V[:, 1]) == [-1, 0, 1]
    assert list(pair.V[:, 2]) == [0, F(-2, 3), F(2, 3)]
    assert list(pair.W[:, 2]) == [F(1, 2), -1, F(1, 2)]
    assert pair.W[:, 2] @ pair.V[:, 2] == 1


def test_kryl_recurrences_exact(S3, H3):
    pair, H = iep_kryl(S3.nodes, starting_vectors(S3))
    Z = S3.nodes[:, None]
    D = H.to_dense()
    assert np.all(Z * pair.V - pair.V @ D == 0)
    assert np.all(Z * pair.W - pair.W @ D.T == 0)
    assert np.all(pair.W.T @ pair.V == RATIONAL.eye(3))


def test_kryl_breakdown_on_degenerate():
    from mopiep import DiscreteSystem
    s = DiscreteSystem.from_json((FIXTURES / "degenerate.json").read_text())
    with pytest.raises(BreakdownError) as exc:
        iep_kryl(s.nodes, starting_vectors(s))
    assert exc.value.step == 2


@pytest.mark.parametrize("strategy", ["full", "partial"])
def test_krylreorth_s3_double(strategy):
    s = s3("double")
    _, _, H = krylreorth_solve(s.nodes, starting_vectors(s), KrylovOptions(strategy))
    same(H, h3(), tol=1e-14)


def test_krylreorth_unit_columns():
    s = build_system(Synthetic("chebyshev", 2), 40)
    pair, HV, HW = iep_krylreorth(s.nodes, normalize_start(starting_vectors(s)))
    eps = 2.0 ** -52
    assert np.max(np.abs(np.linalg.norm(pair.V, axis=0) - 1)) <= 4 * eps
    assert np.max(np.abs(np.linalg.norm(pair.W, axis=0) - 1)) <= 4 * eps
    off = pair.W.T @ pair.V - np.diag(pair.sigma)
    assert np.abs(off).max() <= 1e-12


def test_krylreorth_exact_matches_kryl(S3, H3):
    _, _, H = krylreorth_solve(S3.nodes, starting_vectors(S3))
    same(H, H3)


def test_krylreorth_breakdown_degenerate_start():
    z = np.array([1.0, 2.0, 3.0])
    e1 = np.array([1.0, 0.0, 0.0])
    start = StartingData(e1, np.array([0.0, 1.0, 0.0]), e1, 1.0, 1.0, 1.0)
    with pytest.raises(BreakdownError) as exc:
        iep_krylreorth(z, start, KrylovOptions("full"))
    assert exc.value.step == 2


def test_options_validated():
    with pytest.raises(ValidationError):
        KrylovOptions("none")
    with pytest.raises(ValidationError):
        KrylovOptions(breakdown_tol=-1.0)


def test_truncate_bandwidth():
    HV = np.zeros((5, 5))
    HV[0, 3] = 1e-16
    HV[0, 2] = 1.0
    T, _ = truncate_bandwidth(HV, np.zeros((5, 5)))
    assert T[0, 3] == 0 and T[0, 2] == 1
    T2, _ = truncate_bandwidth(T, np.zeros((5, 5)))
    assert np.array_equal(T, T2)
    rng = np.random.default_rng(0)
    U = np.triu(rng.random((5, 5)))
    V, W = truncate_bandwidth(U, U.copy())
    assert np.count_nonzero(V) == 3 * 5 - 3
    assert np.count_nonzero(W) == 2 * 5 - 1


def test_biorthogonal_rescale():
    V = np.eye(2)
    W = np.eye(2)
    HW = np.array([[1.0, 2.0], [3.0, 4.0]])
    Wt, Vt, H = biorthogonal_rescale(BiorthogonalPair(V, W, np.array([1.0, -2.0])), HW)
    assert np.array_equal(Vt[:, 1], [0.0, -0.5])
    assert np.array_equal(H.to_dense(), HW.T)
    Wt, Vt, _ = biorthogonal_rescale(BiorthogonalPair(V, W, np.ones(2)), HW)
    assert np.array_equal(Vt, V)
    with pytest.raises(BreakdownError):
        biorthogonal_rescale(BiorthogonalPair(V, W, np.array([1.0, 0.0])), HW)


def test_monic_rescale():
    H = BandedHessenberg(np.array([2.0, 0.5]), np.ones(3), np.ones(2), np.ones(1))
    M = monic_rescale(H)
    assert list(M.sub) == [1, 1] and list(M.super1) == [2, 0.5] and list(M.super2) == [1]
    assert list(M.diag) == [1, 1, 1] and M.monic
    again = monic_rescale(M)
    assert list(again.super1) == list(M.super1)
    with pytest.raises(BreakdownError):
        monic_rescale(BandedHessenberg(np.array([0.0, 1.0]), np.ones(3), np.ones(2), np.ones(1)))


def test_monic_rescale_preserves_char_poly():
    from mopiep.diagnostics import eval_typeII
    H = BandedHessenberg(RATIONAL.asarray([F(2), F(1, 3)]), RATIONAL.asarray([1, 2, 3]),
                         RATIONAL.asarray([F(1, 2), 5]), RATIONAL.asarray([7]))
    M = monic_rescale(H)
    D = H.to_dense()
    for x in (F(0), F(1), F(5, 2)):
        # det(x I - H) by exact elimination vs P_N(x) of the monic form
        A = RATIONAL.eye(3) * x - D
        det = A[0, 0] * (A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1]) \
            - A[0, 1] * (A[1, 0] * A[2, 2] - A[1, 2] * A[2, 0]) \
            + A[0, 2] * (A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0])
        P, _ = eval_typeII(M, x)
        assert P[3] == det


@pytest.mark.parametrize("seed", [1, 5])
def test_trace_equals_node_sum(seed):
    # the node sum is ~0 for symmetric nodes, so measure against the summed terms
    s = build_system(Synthetic("chebyshev", seed), 50)
    _, _, H = krylreorth_solve(s.nodes, starting_vectors(s))
    assert abs(H.diag.sum() - s.nodes.sum()) <= 1e-12 * np.abs(H.diag).sum()


@pytest.mark.parametrize("N", [10, 30, 50])
def test_kryl_recurrence_residual_double(N):
    s = build_system(Synthetic("chebyshev", 3), N)
    pair, H = iep_kryl(s.nodes, starting_vectors(s), breakdown_tol=0.0)
    Z = s.nodes[:, None]
    D = H.to_dense()
    eps = 2.0 ** -52
    bound = 50 * N * eps * np.abs(s.nodes).max()
    assert np.linalg.norm(Z * pair.V - pair.V @ D) <= bound * np.linalg.norm(pair.V)
    # the last two W columns stand for the unbuilt w_{N+1}, which is only
    # small while biorthogonality holds, so only enforced columns are checked
    RW = Z * pair.W - pair.W @ D.T
    assert np.linalg.norm(RW[:, :N - 2]) <= bound * np.linalg.norm(pair.W)
