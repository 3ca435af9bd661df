from fractions import Fraction as F

import numpy as np
import pytest

from mopiep import BandedHessenberg, ConvergenceError, Hahn, ValidationError, build_system, solve
from mopiep.diagnostics import (backward_errors, biorth_loss, biorth_loss_scaled, conditioning_estimate,
                                eval_typeII, forward_error, recover_nodes, recover_weights, spectral_norm)
from mopiep.scalar import RATIONAL

from conftest import h3, s3


def test_spectral_norm_examples():
    assert spectral_norm(np.eye(3)) == pytest.approx(1, rel=1e-12)
    assert spectral_norm(np.diag([3.0, -4.0])) == pytest.approx(4, rel=1e-9)
    assert spectral_norm(np.array([[0.0, 1.0], [0.0, 0.0]])) == pytest.approx(1, rel=1e-12)
    assert spectral_norm(np.zeros((3, 3))) == 0


def test_spectral_norm_matches_svd():
    A = np.random.default_rng(2).standard_normal((30, 20))
    assert spectral_norm(A) == pytest.approx(np.linalg.norm(A, 2), rel=1e-9)
    v, ok = spectral_norm(A, return_info=True)
    assert ok


def test_forward_error_examples(H3):
    assert forward_error(H3, H3) == 0
    D = H3.to_dense().astype(float)
    n = np.linalg.norm(D, 2)
    P = D.copy()
    P[2, 2] += n
    assert forward_error(BandedHessenberg.from_dense(P), BandedHessenberg.from_dense(D)) == pytest.approx(1, rel=1e-9)
    Q = D + 1e-3
    Q[2, 0] = 0
    e1 = forward_error(Q, D)
    assert forward_error(7 * Q, 7 * D) == pytest.approx(e1, rel=1e-9)


def test_eval_typeII_examples(H3):
    P, _ = eval_typeII(H3, F(0))
    assert list(P) == [1, -1, 0, 0]
    for x in (F(1, 2), F(3)):
        P, _ = eval_typeII(H3, x)
        assert P[1] == x - 1


def test_eval_typeII_leading_behaviour():
    rng = np.random.default_rng(5)
    N = 8
    H = BandedHessenberg(np.ones(N - 1), rng.uniform(-1, 1, N), rng.uniform(-1, 1, N - 1),
                         rng.uniform(-1, 1, N - 2), monic=True)
    x1, x2 = 1e4, 2e4
    r = eval_typeII(H, x1)[0][N] / eval_typeII(H, x2)[0][N]
    assert r == pytest.approx((x1 / x2) ** N, rel=1e-2)


def test_eval_typeII_derivative():
    H = h3().astype("double")
    x, h = 0.7, 1e-6
    _, dP = eval_typeII(H, x)
    fd = (eval_typeII(H, x + h)[0] - eval_typeII(H, x - h)[0]) / (2 * h)
    np.testing.assert_allclose(dP, fd, atol=1e-8)


def test_recover_nodes_examples(H3):
    z = recover_nodes(H3.astype("double"), np.array([0.1, 0.9, 2.1]))
    np.testing.assert_allclose(z.to_float(), [0, 1, 2], atol=1e-14)
    exact = recover_nodes(H3, RATIONAL.asarray([2, 0, 1]))
    assert list(exact) == [0, 1, 2]
    with pytest.raises(ValidationError):
        recover_nodes(H3, np.array([0.1, 0.1, 2.0]))


def test_recover_nodes_collision(H3):
    with pytest.raises(ConvergenceError):
        recover_nodes(H3.astype("double"), np.array([1.9, 1.95, 2.05]))


def test_recover_weights_examples(H3):
    a1, a2 = recover_weights(H3, RATIONAL.asarray([0, 1, 2]), 3, 4, -1)
    assert list(a1) == [1, 1, 1] and list(a2) == [2, 1, 1]
    z0, _ = recover_weights(H3, RATIONAL.asarray([0, 1, 2]), 0, 4, -1)
    assert list(z0) == [0, 0, 0]
    b1, _ = recover_weights(H3, RATIONAL.asarray([0, 1, 2]), 6, 4, -1)
    assert list(b1) == [2, 2, 2]


def test_backward_errors_exact_zero(S3):
    H = solve(S3, "oracle").H
    assert backward_errors(S3, H) == {"backward_nodes": 0, "backward_w1": 0, "backward_w2": 0}


def test_backward_errors_perturbed_b0(H3):
    S = s3("double")
    d = H3.astype("double")
    P = BandedHessenberg(d.sub, d.diag + np.array([1e-8, 0, 0]), d.super1, d.super2, monic=True)
    e = backward_errors(S, P)["backward_nodes"]
    assert 1e-10 < e < 1e-6


def test_backward_errors_hahn10_core():
    s = build_system(Hahn(), 10)
    e = backward_errors(s, solve(s, "core", kind="double").H)
    assert max(e.values()) <= 1e-12


def test_conditioning_examples():
    s = build_system(Hahn(), 12)
    assert conditioning_estimate(s, 0.0, 5, 1) == 0
    a = conditioning_estimate(s, 1e-16, 3, 1)
    b = conditioning_estimate(s, 2e-16, 3, 1)
    assert b >= a > 0
    with pytest.raises(ValidationError):
        conditioning_estimate(s, -1.0)


def test_conditioning_independent_of_workers():
    s = build_system(Hahn(), 10)
    assert conditioning_estimate(s, 1e-15, 4, 3, workers=1) == conditioning_estimate(s, 1e-15, 4, 3, workers=3)


def test_conditioning_hahn20_tracks_core_error():
    from mopiep.moments import reference_solve
    s = build_system(Hahn(), 20)
    c = conditioning_estimate(s, 2.0 ** -52, 5, 0)
    e = forward_error(solve(s, "core", kind="double").H, reference_solve(s))
    assert c / 100 <= e <= 100 * c


def test_biorth_loss_examples(S3):
    sol = solve(S3, "oracle")
    assert biorth_loss(sol.W, sol.V) == 0
    assert biorth_loss(np.eye(4), np.eye(4)) == 0
    d = solve(s3("double"), "kryl")
    assert biorth_loss(d.W, d.V) <= 1e-14
    assert biorth_loss_scaled(d.W, d.V, s3("double").nodes) <= 1e-14
