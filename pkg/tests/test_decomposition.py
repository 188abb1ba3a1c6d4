"""Operator decomposition methods: linear, featurized, kernelized, variational."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagtime.basis import (
    IdentityFeatures,
    IndicatorFeatures,
    MonomialFeatures,
    WithConstant,
)
from lagtime.covariance import covariances_from_pairs, lagged_pairs
from lagtime.decomposition import (
    contiguous_folds,
    dmd_fit,
    edmd_fit,
    kernel_cca_fit,
    kernel_edmd_fit,
    kvad_feature_score,
    kvad_fit,
    kvad_score,
    tica_fit,
    vamp_fit,
    vamp_score,
    vamp_score_cv,
)
from lagtime.errors import InvalidArgument, UndefinedScore
from lagtime.kernels import GaussianKernel
from lagtime.markov import MarkovStateModel, msm_to_koopman


def linear_system_pairs(n=400, d=3, seed=0, noise=0.0):
    """Pairs from x' = A x (+ noise), A a known stable matrix."""
    rng = np.random.default_rng(seed)
    A = 0.8 * np.linalg.qr(rng.standard_normal((d, d)))[0]
    X = rng.standard_normal((n, d))
    Y = X @ A.T + noise * rng.standard_normal((n, d))
    return X, Y, A


class TestDmd:
    def test_recovers_linear_operator(self):
        X, Y, A = linear_system_pairs()
        model = dmd_fit(X, Y)
        # propagate(X) = X @ K, and Y = X @ A.T exactly
        np.testing.assert_allclose(model.K, A.T, atol=1e-10)
        np.testing.assert_allclose(model.propagate(X), Y, atol=1e-9)

    def test_eigenvalues_of_known_operator(self):
        X, Y, A = linear_system_pairs(d=4, seed=3)
        model = dmd_fit(X, Y)
        model.project(X[:5], 2)  # forces eigendecomposition
        got = np.sort_complex(model.eigenvalues)
        want = np.sort_complex(np.linalg.eigvals(A.T))
        np.testing.assert_allclose(got, want, atol=1e-9)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InvalidArgument):
            dmd_fit(np.zeros((5, 2)), np.zeros((4, 2)))


class TestEdmd:
    def test_identity_features_match_dmd(self):
        # Acceptance oracle: EDMD with the identity basis is DMD.
        X, Y, _ = linear_system_pairs(n=300, d=3, seed=1, noise=0.05)
        dmd = dmd_fit(X, Y)
        edmd = edmd_fit(X, Y, IdentityFeatures(3))
        np.testing.assert_allclose(edmd.K, dmd.K, atol=1e-10)

    def test_indicator_features_give_empirical_transition_matrix(self):
        rng = np.random.default_rng(4)
        states = rng.integers(0, 3, size=500)
        X, Y = states[:-1, None].astype(float), states[1:, None].astype(float)
        model = edmd_fit(X, Y, IndicatorFeatures(3))
        counts = np.zeros((3, 3))
        for a, b in zip(states[:-1], states[1:]):
            counts[a, b] += 1
        P = counts / counts.sum(axis=1, keepdims=True)
        np.testing.assert_allclose(model.K, P, atol=1e-10)

    def test_propagation_predicts_features(self):
        X, Y, _ = linear_system_pairs(n=2000, d=2, seed=2, noise=0.01)
        psi = MonomialFeatures(2, max_degree=2)
        model = edmd_fit(X, Y, psi)
        pred = model.propagate(X)
        resid = np.linalg.norm(pred - psi(Y)) / np.linalg.norm(psi(Y))
        assert resid < 0.05


class TestTica:
    def test_requires_symmetrized_covariances(self):
        X, Y, _ = linear_system_pairs()
        cov = covariances_from_pairs(X, Y, remove_mean=True)
        with pytest.raises(InvalidArgument):
            tica_fit(cov)

    def test_autoregressive_coefficient_recovered(self):
        # x_{t+1} = a x_t + xi with known a: the dominant autocorrelation is a.
        rng = np.random.default_rng(0)
        a = 0.9
        x = np.empty(200_000)
        x[0] = 0.0
        noise = rng.standard_normal(x.size - 1)
        for i in range(x.size - 1):
            x[i + 1] = a * x[i] + noise[i]
        X, Y = lagged_pairs(x[:, None], 1)
        cov = covariances_from_pairs(X, Y, remove_mean=True, symmetrize=True)
        model = tica_fit(cov)
        assert model.sigma[0] == pytest.approx(a, abs=0.01)

    def test_eigenvalues_real_descending_unit_variance(self):
        rng = np.random.default_rng(5)
        traj = rng.standard_normal((5000, 4)).cumsum(axis=0) * 0.01
        traj += rng.standard_normal((5000, 4))
        X, Y = lagged_pairs(traj, 2)
        cov = covariances_from_pairs(X, Y, remove_mean=True, symmetrize=True)
        model = tica_fit(cov)
        assert model.sigma.dtype.kind == "f"
        assert np.all(np.diff(model.sigma) <= 1e-12)
        # components have unit variance under c00
        gram = model.U.T @ cov.c00 @ model.U
        np.testing.assert_allclose(gram, np.eye(gram.shape[0]), atol=1e-8)


class TestVamp:
    def test_two_state_chain_score_limit(self):
        # Variational limit for P = [[0.95, 0.05], [0.05, 0.95]]: the
        # singular values are (1, 0.9), so the squared sum is 1.81.
        P = np.array([[0.95, 0.05], [0.05, 0.95]])
        model = msm_to_koopman(MarkovStateModel(P))
        assert vamp_score(model, r=2) == pytest.approx(1.81, abs=1e-6)
        assert model.sigma[0] == pytest.approx(1.0, abs=1e-10)
        assert model.sigma[1] == pytest.approx(0.9, abs=1e-10)

    def test_whitened_orthogonality(self):
        X, Y, _ = linear_system_pairs(n=500, d=3, seed=7, noise=0.1)
        cov = covariances_from_pairs(X, Y, remove_mean=True)
        model = vamp_fit(cov)
        np.testing.assert_allclose(
            model.U.T @ cov.c00 @ model.U, np.eye(model.n_components), atol=1e-8
        )
        np.testing.assert_allclose(
            model.V.T @ cov.ctt @ model.V, np.eye(model.n_components), atol=1e-8
        )

    def test_singular_values_descending_and_bounded(self):
        rng = np.random.default_rng(11)
        traj = np.tanh(rng.standard_normal((4000, 3)).cumsum(axis=0) * 0.05)
        X, Y = lagged_pairs(traj, 1)
        F0, F1 = WithConstant(IdentityFeatures(3))(X), WithConstant(IdentityFeatures(3))(Y)
        cov = covariances_from_pairs(F0, F1, remove_mean=False)
        model = vamp_fit(cov)
        assert np.all(np.diff(model.sigma) <= 1e-12)
        assert model.sigma[0] == pytest.approx(1.0, abs=1e-10)  # constant pair
        assert np.all(model.sigma <= 1.0 + 1e-8)

    def test_forward_relation_on_training_data(self):
        # E[V^T chi1(y)] = diag(sigma) E[U^T chi0(x)] over the training pairs.
        X, Y, _ = linear_system_pairs(n=800, d=3, seed=13, noise=0.2)
        cov = covariances_from_pairs(X, Y, remove_mean=True)
        model = vamp_fit(cov)
        lhs = model.backward(Y).mean(axis=0)
        rhs = model.forward(X).mean(axis=0)
        np.testing.assert_allclose(lhs, rhs, atol=1e-8)

    def test_score_r1_and_invalid_r(self):
        P = np.array([[0.9, 0.1], [0.2, 0.8]])
        model = msm_to_koopman(MarkovStateModel(P))
        s1 = vamp_score(model, r=1)
        s2 = vamp_score(model, r=2)
        assert s1 >= s2  # singular values are <= 1
        with pytest.raises(UndefinedScore):
            vamp_score(model, r=0.5)

    def test_timescales_from_singular_values(self):
        P = np.array([[0.95, 0.05], [0.05, 0.95]])
        model = msm_to_koopman(MarkovStateModel(P))
        ts = model.timescales()
        assert ts.shape == (2,)
        assert ts[0] == np.inf  # the stationary pair does not relax
        assert ts[1] == pytest.approx(-1.0 / np.log(0.9), rel=1e-10)


class TestVariationalDominance:
    def test_nested_monomial_bases_never_score_lower(self):
        # Enlarging the ansatz can only improve the variational score on the
        # same data: monomials of degree d are contained in degree d+1.
        rng = np.random.default_rng(17)
        traj = np.tanh(rng.standard_normal((3000, 2)).cumsum(axis=0) * 0.03)
        X, Y = lagged_pairs(traj, 1)
        scores = []
        for degree in (1, 2, 3, 4):
            psi = MonomialFeatures(2, max_degree=degree)
            cov = covariances_from_pairs(psi(X), psi(Y), remove_mean=False)
            scores.append(vamp_score(vamp_fit(cov), r=2))
        assert all(b >= a - 1e-9 for a, b in zip(scores, scores[1:])), scores


class TestVampScoreCv:
    def test_contiguous_folds_partition(self):
        folds = contiguous_folds(10, 3)
        assert [f.tolist() for f in folds] == [[0, 1, 2, 3], [4, 5, 6], [7, 8, 9]]
        with pytest.raises(InvalidArgument):
            contiguous_folds(5, 1)

    def test_returns_one_score_per_fold_deterministically(self):
        rng = np.random.default_rng(23)
        traj = rng.standard_normal((600, 2)).cumsum(axis=0) * 0.1
        X, Y = lagged_pairs(traj, 1)
        F0 = WithConstant(IdentityFeatures(2))(X)
        F1 = WithConstant(IdentityFeatures(2))(Y)
        mean1, std1, s1 = vamp_score_cv(F0, F1, r=2, n_folds=5, remove_mean=False)
        mean2, _, s2 = vamp_score_cv(F0, F1, r=2, n_folds=5, remove_mean=False)
        assert s1.shape == (5,)
        np.testing.assert_array_equal(s1, s2)
        assert mean1 == mean2 == pytest.approx(s1.mean())
        assert std1 == pytest.approx(s1.std())
        assert np.all(np.isfinite(s1))


class TestKernelEdmd:
    def test_indicator_kernel_matches_discrete_transition_matrix(self):
        # A kernel that is 1 exactly for equal discrete states reproduces the
        # empirical transition matrix, pinning down the index convention.
        class StateMatchKernel:
            def pairwise(self, A, B):
                return (A[:, 0][:, None] == B[:, 0][None, :]).astype(float)

        rng = np.random.default_rng(29)
        states = rng.integers(0, 3, size=400)
        X, Y = states[:-1, None].astype(float), states[1:, None].astype(float)
        model = kernel_edmd_fit(X, Y, StateMatchKernel(), epsilon=1e-10)
        # propagate()[i, j] predicts P(state(y) = state(anchor j) | probe i);
        # reading one anchor per state recovers the empirical transition matrix.
        ref = edmd_fit(X, Y, IndicatorFeatures(3)).K
        probe = np.array([[0.0], [1.0], [2.0]])
        prop = model.propagate(probe)
        anchors = [int(np.flatnonzero(X[:, 0] == s)[0]) for s in range(3)]
        np.testing.assert_allclose(prop[:, anchors], ref, atol=1e-6)

    def test_eigenvalues_sorted_by_magnitude(self):
        rng = np.random.default_rng(31)
        traj = np.tanh(rng.standard_normal((300, 2)).cumsum(axis=0) * 0.05)
        X, Y = traj[:-1], traj[1:]
        model = kernel_edmd_fit(X, Y, GaussianKernel(1.0), epsilon=1e-6)
        mags = np.abs(model.eigenvalues)
        assert np.all(np.diff(mags) <= 1e-12)

    def test_projection_shape_and_determinism(self):
        rng = np.random.default_rng(37)
        X = rng.standard_normal((120, 2))
        Y = X * 0.9 + 0.05 * rng.standard_normal((120, 2))
        m1 = kernel_edmd_fit(X, Y, GaussianKernel(0.8), epsilon=1e-5)
        m2 = kernel_edmd_fit(X, Y, GaussianKernel(0.8), epsilon=1e-5)
        p1, p2 = m1.project(X, 3), m2.project(X, 3)
        np.testing.assert_array_equal(p1, p2)
        assert p1.shape == (120, 3)


class TestKernelCca:
    def test_correlations_in_unit_interval_descending(self):
        rng = np.random.default_rng(41)
        X = rng.standard_normal((250, 2))
        Y = 0.7 * X + 0.3 * rng.standard_normal((250, 2))
        model = kernel_cca_fit(X, Y, GaussianKernel(1.0), n_components=5, epsilon=1e-3)
        s = model.eigenvalues
        assert np.all(s <= 1.0 + 1e-10) and np.all(s >= -1e-12)
        assert np.all(np.diff(np.real(s)) <= 1e-12)

    def test_strong_dependence_scores_higher_than_independence(self):
        rng = np.random.default_rng(43)
        X = rng.standard_normal((300, 1))
        dependent = kernel_cca_fit(
            X, np.sin(2 * X) + 0.05 * rng.standard_normal((300, 1)),
            GaussianKernel(1.0), n_components=1, epsilon=1e-3,
        )
        independent = kernel_cca_fit(
            X, rng.standard_normal((300, 1)),
            GaussianKernel(1.0), n_components=1, epsilon=1e-3,
        )
        assert dependent.eigenvalues[0] > independent.eigenvalues[0] + 0.2

    def test_projection_evaluates_anywhere(self):
        rng = np.random.default_rng(47)
        X = rng.standard_normal((150, 2))
        Y = np.roll(X, 1, axis=0)
        model = kernel_cca_fit(X, Y, GaussianKernel(1.0), n_components=3, epsilon=1e-2)
        fresh = rng.standard_normal((20, 2))
        proj = model.project(fresh, 3)
        assert proj.shape == (20, 3)
        assert np.all(np.isfinite(proj))

    def test_validation(self):
        X = np.zeros((10, 1))
        with pytest.raises(InvalidArgument):
            kernel_cca_fit(X, X, GaussianKernel(1.0), n_components=3, epsilon=-1.0)
        with pytest.raises(InvalidArgument):
            kernel_cca_fit(X, X, GaussianKernel(1.0), n_components=11, epsilon=1e-3)
        with pytest.raises(InvalidArgument):
            kernel_cca_fit(
                X, X, GaussianKernel(1.0), n_components=2, epsilon=1e-3,
                normalization="bogus",
            )


class TestKvad:
    @staticmethod
    def _pairs(n=300, seed=53):
        rng = np.random.default_rng(seed)
        X = rng.uniform(-2, 2, size=(n, 1))
        Y = np.sign(X) + 0.2 * rng.standard_normal((n, 1))
        return X, Y

    def test_score_monotone_in_feature_span(self):
        # Richer nested feature sets never lower the embedded predictability.
        X, Y = self._pairs()
        kernel = GaussianKernel(0.5)
        scores = [
            kvad_feature_score(MonomialFeatures(1, max_degree=d)(X), Y, kernel)
            for d in (1, 2, 3, 5)
        ]
        assert all(b >= a - 1e-12 for a, b in zip(scores, scores[1:])), scores

    def test_fitted_score_dominates_constant_baseline(self):
        X, Y = self._pairs()
        kernel = GaussianKernel(0.5)
        model = kvad_fit(X, Y, IdentityFeatures(1), kernel)
        baseline = kvad_feature_score(np.ones((X.shape[0], 1)), Y, kernel)
        assert model.score >= baseline - 1e-12

    def test_transition_weights_rows_predict_forward_kernel_mass(self):
        X, Y = self._pairs()
        model = kvad_fit(X, Y, MonomialFeatures(1, max_degree=2), GaussianKernel(0.5))
        W = model.transition_weights(X)
        assert W.shape == (X.shape[0], X.shape[0])
        # the constant feature keeps predicted densities normalized exactly
        np.testing.assert_allclose(W.sum(axis=1), 1.0, atol=1e-8)

    def test_rescoring_on_fresh_data(self):
        X, Y = self._pairs(seed=57)
        model = kvad_fit(X, Y, MonomialFeatures(1, max_degree=2), GaussianKernel(0.5))
        X2, Y2 = self._pairs(seed=59)
        fresh = kvad_score(model, X2, Y2)
        assert np.isfinite(fresh) and fresh > 0

    def test_projection_shape_and_mismatch(self):
        X, Y = self._pairs()
        model = kvad_fit(X, Y, MonomialFeatures(1, max_degree=2), GaussianKernel(0.5))
        proj = model.project(X, 2)
        assert proj.shape == (X.shape[0], 2)
        with pytest.raises(InvalidArgument):
            kvad_fit(X[:10], Y[:9], IdentityFeatures(1), GaussianKernel(0.5))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_vamp_score_never_exceeds_rank_bound(seed):
    """VAMP-2 of a whitened model is at most its component count."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((60, 3))
    Y = rng.standard_normal((60, 3))
    cov = covariances_from_pairs(X, Y, remove_mean=True)
    model = vamp_fit(cov)
    assert vamp_score(model, r=2) <= model.n_components + 1e-8
