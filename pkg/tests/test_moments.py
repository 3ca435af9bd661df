from fractions import Fraction as F

import numpy as np
import pytest

from mopiep import BandedHessenberg, BreakdownError, DiscreteSystem, Kravchuk, build_system, starting_vectors
from mopiep.moments import (growth_factor, krylov_basis_matrices, ldu_factorize, moment_matrix, oracle_solve,
                            reference_solve)
from mopiep.scalar import RATIONAL

from conftest import FIXTURES

t = F(1, 3)


def test_krylov_bases_s3(S3):
    KV, KW = krylov_basis_matrices(S3.nodes, starting_vectors(S3), 3)
    assert KV.T.tolist() == [[1, 1, 1], [0, 1, 2], [0, 1, 4]]
    assert KW.T.tolist() == [[t, t, t], [-2 * t, t, t], [0, t, 2 * t]]


def test_krylov_bases_small_m(S3):
    st = starting_vectors(S3)
    KV, KW = krylov_basis_matrices(S3.nodes, st, 1)
    assert KV[:, 0].tolist() == st.v1.tolist() and KW[:, 0].tolist() == st.w1.tolist()
    _, KW = krylov_basis_matrices(S3.nodes, st, 2)
    assert KW[:, 1].tolist() == st.w2.tolist()


def test_moment_matrix_s3(S3):
    KV, KW = krylov_basis_matrices(S3.nodes, starting_vectors(S3), 3)
    M = moment_matrix(KW, KV).entries
    assert M.tolist() == [[1, 1, F(5, 3)], [0, 1, F(5, 3)], [1, F(5, 3), 3]]
    KV1, KW1 = krylov_basis_matrices(S3.nodes, starting_vectors(S3), 1)
    assert moment_matrix(KW1, KV1).entries.tolist() == [[1]]
    Q = np.linalg.qr(np.random.default_rng(0).random((4, 4)))[0]
    assert np.allclose(moment_matrix(Q, Q).entries, np.eye(4))


def test_ldu_s3(S3):
    KV, KW = krylov_basis_matrices(S3.nodes, starting_vectors(S3), 3)
    L, D, U = ldu_factorize(moment_matrix(KW, KV))
    assert L.tolist() == [[1, 0, 0], [0, 1, 0], [1, F(2, 3), 1]]
    assert D.tolist() == [1, 1, F(2, 9)]
    assert U.tolist() == [[1, 1, F(5, 3)], [0, 1, F(5, 3)], [0, 0, 1]]


def test_ldu_identity_and_breakdown():
    L, D, U = ldu_factorize(RATIONAL.eye(3))
    assert np.array_equal(L, RATIONAL.eye(3)) and D.tolist() == [1, 1, 1]
    with pytest.raises(BreakdownError, match="not strongly regular"):
        ldu_factorize(RATIONAL.asarray([[0, 1], [1, 0]]))


def test_oracle_s3(S3, H3):
    W, V, H = oracle_solve(S3)
    assert V.T.tolist() == [[1, 1, 1], [-1, 0, 1], [0, F(-2, 3), F(2, 3)]]
    assert H.to_dense().tolist() == H3.to_dense().tolist()
    assert np.array_equal(W.T @ V, RATIONAL.eye(3))
    assert np.array_equal(S3.nodes[:, None] * V, V @ H.to_dense())


def test_oracle_kravchuk3_fixture():
    ref = BandedHessenberg.from_json((FIXTURES / "kravchuk3_oracle.json").read_text())
    _, _, H = oracle_solve(build_system(Kravchuk(), 3))
    assert H.to_dense().tolist() == ref.to_dense().tolist()


def test_oracle_non_normal():
    s = DiscreteSystem.from_json((FIXTURES / "degenerate.json").read_text())
    with pytest.raises(BreakdownError):
        oracle_solve(s)


def test_oracle_extended_matches_rational():
    s = build_system(Kravchuk(), 8)
    _, _, Hr = oracle_solve(s)
    _, _, He = oracle_solve(s, "extended")
    d = (He.to_dense() - RATIONAL.asarray(Hr.to_dense())).to_float()
    assert np.abs(d).max() <= 1e-20 * np.abs(He.to_dense().to_float()).max()


def test_reference_uses_exact_path_for_rational():
    s = build_system(Kravchuk(), 6)
    assert reference_solve(s).kind is RATIONAL
    assert reference_solve(s.astype("double")).kind.name == "extended"


def test_growth_factor_basics():
    assert growth_factor(np.eye(3)) == 1
    assert growth_factor(np.array([[1e-8, 1.0], [1.0, 1.0]])) > 1e7
