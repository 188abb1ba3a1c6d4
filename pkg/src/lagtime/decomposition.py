"""Spectral estimators for transfer operators of stochastic dynamics.

All estimators produce model objects that share three conventions:

* data matrices have rows as frames;
* operator matrices ``K`` act by ``propagate(x) = K.T @ f(x)``, i.e. in row
  layout the forward prediction of the feature vector is ``f(X) @ K``;
* dominant components come first (descending eigenvalue modulus or singular
  value), and ``project`` evaluates them on new data.

The linear-algebra regularization parameter ``epsilon`` is an absolute
eigenvalue cutoff (see :mod:`lagtime.numerics`); the kernel estimators use a
local Tikhonov shift ``n * epsilon`` on their Gram matrices instead, which is
the customary convention for those methods.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .basis import FeatureMap, IdentityFeatures, LinearFeatures, WithConstant
from .covariance import CovarianceModel, covariances_from_pairs
from .errors import InvalidArgument, UndefinedScore
from .kernels import Kernel, KernelSectionFeatures, gram_matrix
from .numerics import pinv_truncated, sym_inverse_sqrt, truncated_svd

__all__ = [
    "TransferOperatorModel",
    "CovarianceKoopmanModel",
    "KVADModel",
    "dmd_fit",
    "edmd_fit",
    "tica_fit",
    "vamp_fit",
    "vamp_score",
    "vamp_score_cv",
    "kernel_edmd_fit",
    "kernel_cca_fit",
    "kvad_fit",
    "kvad_score",
    "kvad_feature_score",
    "project",
    "contiguous_folds",
]


# ---------------------------------------------------------------------------
# models


@dataclass
class TransferOperatorModel:
    """Finite-dimensional transfer-operator approximation.

    ``K`` maps the input feature space onto the output feature space via
    ``propagate(x) = K.T @ f(x)``; in row layout ``propagate(X) = f(X) @ K``.

    ``projection_matrix`` holds coefficients of the dominant components in
    ``f``-space, one column per component, dominant first. When absent it is
    derived from the eigendecomposition of ``K`` on demand.
    """

    f: FeatureMap
    g: FeatureMap
    K: NDArray
    method: str = "edmd"
    eigenvalues: Optional[NDArray] = None
    projection_matrix: Optional[NDArray] = None

    def propagate(self, X: NDArray) -> NDArray:
        """Predicted forward feature values, row-wise."""
        return self.f(X) @ self.K

    def _ensure_projection(self) -> NDArray:
        if self.projection_matrix is None:
            if self.K.shape[0] != self.K.shape[1]:
                raise InvalidArgument(
                    "projection requires a square operator or an explicit projection matrix"
                )
            evals, evecs = np.linalg.eig(self.K)
            order = np.argsort(-np.abs(evals), kind="stable")
            self.eigenvalues = evals[order]
            self.projection_matrix = evecs[:, order]
        return self.projection_matrix

    def project(self, X: NDArray, n_components: int) -> NDArray:
        """Dominant components evaluated on ``X`` (real parts), columns descending."""
        P = self._ensure_projection()
        if not (1 <= n_components <= P.shape[1]):
            raise InvalidArgument(
                f"n_components must be in 1..{P.shape[1]}, got {n_components}"
            )
        return np.real(self.f(X) @ P[:, :n_components])


@dataclass
class CovarianceKoopmanModel:
    """Operator model in whitened coordinates, decomposed by singular value.

    The feature maps ``chi0``/``chi1`` lift raw observations; ``U`` and ``V``
    carry whitened singular directions so that ``U.T @ c00 @ U`` is the
    identity on the retained rank. ``K = diag(sigma)``, and the forward
    relation ``E[V.T chi1(y)] = diag(sigma) E[U.T chi0(x)]`` holds for the
    training distribution.
    """

    U: NDArray
    V: NDArray
    sigma: NDArray
    covariances: CovarianceModel
    chi0: FeatureMap
    chi1: FeatureMap
    method: str = "vamp"

    @property
    def K(self) -> NDArray:
        return np.diag(self.sigma)

    @property
    def n_components(self) -> int:
        return int(self.sigma.size)

    def _center0(self, F: NDArray) -> NDArray:
        if self.covariances.mean_removed:
            return F - self.covariances.mean_0
        return F

    def _center1(self, F: NDArray) -> NDArray:
        if self.covariances.mean_removed:
            return F - self.covariances.mean_t
        return F

    def forward(self, X: NDArray) -> NDArray:
        """Instantaneous singular functions evaluated on raw observations."""
        return self._center0(self.chi0(X)) @ self.U

    def backward(self, Y: NDArray) -> NDArray:
        """Time-lagged singular functions evaluated on raw observations."""
        return self._center1(self.chi1(Y)) @ self.V

    def propagate(self, X: NDArray) -> NDArray:
        """Forward prediction in the lagged singular basis."""
        return self.forward(X) * self.sigma

    def project(self, X: NDArray, n_components: int) -> NDArray:
        if not (1 <= n_components <= self.n_components):
            raise InvalidArgument(
                f"n_components must be in 1..{self.n_components}, got {n_components}"
            )
        return self.forward(X)[:, :n_components]

    def timescales(self, lag_duration: Optional[float] = None) -> NDArray:
        """Implied relaxation timescales ``-lag / log |sigma_i|``.

        Values with ``|sigma_i| >= 1`` map to infinity. ``lag_duration``
        defaults to the lag the covariances were estimated at.
        """
        lag = self.covariances.lag if lag_duration is None else lag_duration
        mags = np.abs(self.sigma)
        out = np.full(mags.shape, np.inf)
        small = mags < 1.0
        with np.errstate(divide="ignore"):
            out[small] = -lag / np.log(mags[small])
        return out

    def score(self, r: float = 2, test_cov: Optional[CovarianceModel] = None,
              epsilon: float = 1e-12) -> float:
        return vamp_score(self, r=r, test_cov=test_cov, epsilon=epsilon)


@dataclass
class KVADModel:
    """Transition-density ansatz ``p(x, y) ~= f(x)^T q(y)``.

    ``q`` is carried nonparametrically as weights over the training forward
    samples: ``q_j = sum_i q_weights[i, j] * delta(y - y_train[i])``. The
    feature map stored here already includes the prepended constant that the
    fit adds so the ansatz can represent the marginal of ``y``.
    """

    f: FeatureMap
    q_weights: NDArray
    K: NDArray
    kernel: Kernel
    y_train: NDArray
    score: float
    feature_mean: NDArray
    projection_matrix: NDArray
    singular_values: NDArray
    method: str = "kvad"

    def transition_weights(self, X: NDArray) -> NDArray:
        """Rows: predicted weights over training forward samples for each x."""
        return self.f(X) @ self.q_weights.T

    def propagate(self, X: NDArray) -> NDArray:
        return self.f(X) @ self.K

    def project(self, X: NDArray, n_components: int) -> NDArray:
        if not (1 <= n_components <= self.projection_matrix.shape[1]):
            raise InvalidArgument(
                f"n_components must be in 1..{self.projection_matrix.shape[1]}, "
                f"got {n_components}"
            )
        F = self.f(X) - self.feature_mean
        return F @ self.projection_matrix[:, :n_components]


def project(model, X: NDArray, n_components: int) -> NDArray:
    """Evaluate a fitted model's dominant components on new data.

    Works for every model type in this module; columns are ordered by
    descending dominance (eigenvalue modulus or singular value).
    """
    return model.project(X, n_components)


# ---------------------------------------------------------------------------
# linear estimators


def _as_frames(X: NDArray, name: str = "X") -> NDArray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise InvalidArgument(f"{name} must be a matrix with rows as frames")
    return X


def dmd_fit(X: NDArray, Y: NDArray) -> TransferOperatorModel:
    """Linear one-step propagator by least squares on raw observations.

    Solves ``min_K || Y - X K ||_F`` through an SVD-based pseudoinverse, so
    ``propagate(x) = K.T x`` is the best linear forward model of the pairs.
    """
    X, Y = _as_frames(X), _as_frames(Y, "Y")
    if X.shape != Y.shape:
        raise InvalidArgument(f"X and Y must have identical shapes: {X.shape} vs {Y.shape}")
    K = pinv_truncated(X) @ Y
    return TransferOperatorModel(
        f=IdentityFeatures(X.shape[1]),
        g=IdentityFeatures(X.shape[1]),
        K=K,
        method="dmd",
    )


def edmd_fit(X: NDArray, Y: NDArray, psi: FeatureMap, epsilon: float = 1e-12
             ) -> TransferOperatorModel:
    """Galerkin projection of the forward operator onto a feature basis.

    Solves the regression ``psi(Y) ~= psi(X) K`` through the normal equations
    ``K = C00^+ C0t`` on raw (uncentered) second moments, with ``epsilon`` as
    eigenvalue cutoff for the pseudoinverse. With identity features this
    reduces to :func:`dmd_fit`; with indicator features on a discrete state
    signal, ``K`` is the empirical transition matrix.
    """
    X, Y = _as_frames(X), _as_frames(Y, "Y")
    if X.shape != Y.shape:
        raise InvalidArgument(f"X and Y must have identical shapes: {X.shape} vs {Y.shape}")
    F0, F1 = psi(X), psi(Y)
    n = F0.shape[0]
    if n < 2:
        raise InvalidArgument("need at least two pairs")
    c00 = F0.T @ F0 / (n - 1)
    c0t = F0.T @ F1 / (n - 1)
    white = sym_inverse_sqrt(0.5 * (c00 + c00.T), epsilon)
    K = white.transform.T @ white.transform @ c0t
    return TransferOperatorModel(f=psi, g=psi, K=K, method="edmd")


def tica_fit(cov: CovarianceModel, n_components: Optional[int] = None,
             epsilon: float = 1e-12, chi: Optional[FeatureMap] = None
             ) -> CovarianceKoopmanModel:
    """Time-lagged independent component analysis.

    Solves the generalized symmetric eigenproblem ``c0t v = lambda c00 v`` on
    reversibly symmetrized covariances; eigenvalues are real and descending,
    components are normalized to unit variance under ``c00``.

    Raises
    ------
    InvalidArgument
        If the covariance model was not estimated with symmetrization, which
        the reversible formulation requires.
    """
    if not cov.symmetrized:
        raise InvalidArgument("tica_fit requires reversibly symmetrized covariances")
    white = sym_inverse_sqrt(cov.c00, epsilon)
    W = white.transform
    reduced = W @ (0.5 * (cov.c0t + cov.c0t.T)) @ W.T
    reduced = 0.5 * (reduced + reduced.T)
    evals, evecs = np.linalg.eigh(reduced)
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    V = W.T @ evecs[:, order]
    if n_components is not None:
        if not (1 <= n_components <= evals.size):
            raise InvalidArgument(f"n_components must be in 1..{evals.size}")
        evals, V = evals[:n_components], V[:, :n_components]
    chi = chi if chi is not None else IdentityFeatures(cov.dim)
    return CovarianceKoopmanModel(
        U=V, V=V.copy(), sigma=evals, covariances=cov, chi0=chi, chi1=chi,
        method="tica",
    )


def vamp_fit(cov: CovarianceModel, n_components: Optional[int] = None,
             epsilon: float = 1e-12, chi0: Optional[FeatureMap] = None,
             chi1: Optional[FeatureMap] = None) -> CovarianceKoopmanModel:
    """Variational approach for Markov processes: whitened SVD of ``c0t``.

    Whitens both covariance sides with inverse square roots (eigenvalue
    cutoff ``epsilon``), decomposes ``W0 c0t W1^T`` by singular value, and
    back-transforms: ``U = W0^T Uhat``, ``V = W1^T Vhat``. Works for
    non-reversible and non-stationary pairs; singular values are descending
    and, because they are canonical correlations of the feature spaces, never
    exceed one beyond round-off.
    """
    w0 = sym_inverse_sqrt(cov.c00, epsilon)
    w1 = sym_inverse_sqrt(cov.ctt, epsilon)
    M = w0.transform @ cov.c0t @ w1.transform.T
    k_max = min(M.shape)
    k = k_max if n_components is None else n_components
    if not (1 <= k <= k_max):
        raise InvalidArgument(f"n_components must be in 1..{k_max}, got {n_components}")
    Uh, sigma, Vh = truncated_svd(M, k)
    chi0 = chi0 if chi0 is not None else IdentityFeatures(cov.dim)
    chi1 = chi1 if chi1 is not None else IdentityFeatures(cov.dim)
    return CovarianceKoopmanModel(
        U=w0.transform.T @ Uh,
        V=w1.transform.T @ Vh,
        sigma=sigma,
        covariances=cov,
        chi0=chi0,
        chi1=chi1,
        method="vamp",
    )


def vamp_score(model: CovarianceKoopmanModel, r: float = 2,
               test_cov: Optional[CovarianceModel] = None,
               epsilon: float = 1e-12) -> float:
    """VAMP-r score: sum of singular values raised to the power ``r``.

    Without ``test_cov`` this scores the training singular values. With a
    held-out covariance model, the trained subspaces are re-orthogonalized
    against the test covariances and the singular values of the projected
    operator are scored, which is the standard out-of-sample protocol. The
    test covariances must be estimated with the same centering convention as
    the training covariances.
    """
    if r < 1:
        raise UndefinedScore(f"VAMP-r requires r >= 1, got {r}")
    if test_cov is None:
        return float(np.sum(np.abs(model.sigma) ** r))
    if test_cov.mean_removed != model.covariances.mean_removed:
        raise InvalidArgument("test covariances use a different centering convention")
    U, V = model.U, model.V
    a = sym_inverse_sqrt(U.T @ test_cov.c00 @ U, epsilon)
    b = sym_inverse_sqrt(V.T @ test_cov.ctt @ V, epsilon)
    S = a.transform @ (U.T @ test_cov.c0t @ V) @ b.transform.T
    svals = np.linalg.svd(S, compute_uv=False)
    return float(np.sum(svals**r))


def contiguous_folds(n: int, n_folds: int) -> list[NDArray]:
    """Split ``0..n-1`` into contiguous, nearly equal blocks."""
    if not (2 <= n_folds <= n):
        raise InvalidArgument(f"n_folds must be in 2..{n}, got {n_folds}")
    return [idx for idx in np.array_split(np.arange(n), n_folds)]


def vamp_score_cv(F0: NDArray, F1: NDArray, r: float = 2, n_folds: int = 10,
                  n_components: Optional[int] = None, epsilon: float = 1e-12,
                  remove_mean: bool = False) -> tuple[float, float, NDArray]:
    """Cross-validated VAMP-r score over contiguous pair blocks.

    ``F0``/``F1`` are featurized pairs (rows aligned). Each fold holds out one
    contiguous block: the model is fitted on the remaining pairs and scored
    against the held-out covariances. Returns mean, standard deviation, and
    the per-fold scores.
    """
    F0, F1 = _as_frames(F0, "F0"), _as_frames(F1, "F1")
    folds = contiguous_folds(F0.shape[0], n_folds)
    scores = []
    for test_idx in folds:
        mask = np.ones(F0.shape[0], dtype=bool)
        mask[test_idx] = False
        cov_train = covariances_from_pairs(F0[mask], F1[mask], remove_mean=remove_mean)
        cov_test = covariances_from_pairs(F0[test_idx], F1[test_idx], remove_mean=remove_mean)
        model = vamp_fit(cov_train, n_components=n_components, epsilon=epsilon)
        scores.append(vamp_score(model, r=r, test_cov=cov_test, epsilon=epsilon))
    scores = np.array(scores)
    return float(scores.mean()), float(scores.std()), scores


# ---------------------------------------------------------------------------
# kernel estimators


def kernel_edmd_fit(X: NDArray, Y: NDArray, kernel: Kernel, epsilon: float,
                    n_components: Optional[int] = None) -> TransferOperatorModel:
    """Forward-operator regression in a reproducing kernel space.

    Features are kernel sections anchored at the instantaneous points, with
    Gram matrices left uncentered. The operator solves
    ``(G + n epsilon I)^{-1} G_fwd`` where ``G[i, j] = k(x_i, x_j)`` and
    ``G_fwd[i, j] = k(y_i, x_j)``; its eigenvectors give the dominant
    eigenfunctions as kernel expansions over the anchors, ordered by
    eigenvalue modulus.
    """
    X, Y = _as_frames(X), _as_frames(Y, "Y")
    if X.shape != Y.shape:
        raise InvalidArgument(f"X and Y must have identical shapes: {X.shape} vs {Y.shape}")
    if epsilon < 0:
        raise InvalidArgument(f"epsilon must be non-negative, got {epsilon}")
    n = X.shape[0]
    G = gram_matrix(kernel, X)
    G_fwd = gram_matrix(kernel, Y, X)
    K = np.linalg.solve(G + n * epsilon * np.eye(n), G_fwd)
    evals, evecs = np.linalg.eig(K)
    order = np.argsort(-np.abs(evals), kind="stable")
    evals, evecs = evals[order], evecs[:, order]
    if n_components is not None:
        if not (1 <= n_components <= n):
            raise InvalidArgument(f"n_components must be in 1..{n}")
        evecs = evecs[:, :n_components]
    sections = KernelSectionFeatures(kernel, X, centered=False)
    return TransferOperatorModel(
        f=sections, g=sections, K=K, method="kernel_edmd",
        eigenvalues=evals, projection_matrix=evecs,
    )


def kernel_cca_fit(X: NDArray, Y: NDArray, kernel: Kernel, n_components: int,
                   epsilon: float, normalization: str = "empirical"
                   ) -> TransferOperatorModel:
    """Canonical correlation analysis between kernel spaces of X and Y.

    Centers both Gram matrices and solves the regularized eigenproblem

        ((G_X + n eps I)^{-1} G_X) ((G_Y + n eps I)^{-1} G_Y) v = rho v

    in its whitened symmetric form, so correlations ``rho`` are real, lie in
    [0, 1] up to round-off, and come out descending. Singular functions are
    kernel expansions over the training points and can be evaluated anywhere.

    Parameters
    ----------
    normalization : {"empirical", "gram"}
        "empirical" scales each singular function to unit empirical second
        moment on the training points; "gram" scales its coefficient vector
        to unit Euclidean norm.
    """
    X, Y = _as_frames(X), _as_frames(Y, "Y")
    if X.shape[0] != Y.shape[0]:
        raise InvalidArgument("X and Y must pair the same number of frames")
    if normalization not in ("empirical", "gram"):
        raise InvalidArgument(f"unknown normalization {normalization!r}")
    if epsilon <= 0:
        raise InvalidArgument(f"epsilon must be positive, got {epsilon}")
    n = X.shape[0]
    if not (1 <= n_components <= n):
        raise InvalidArgument(f"n_components must be in 1..{n}")

    def smoother_half(G):
        # Symmetric PSD half-power of (G + n eps I)^{-1} G.
        evals, Q = np.linalg.eigh(G)
        evals = np.clip(evals, 0.0, None)
        ratio = evals / (evals + n * epsilon)
        return Q, ratio

    def centered(G):
        col = G.mean(axis=0, keepdims=True)
        row = G.mean(axis=1, keepdims=True)
        return G - col - row + G.mean()

    Gx = centered(gram_matrix(kernel, X))
    Gy = centered(gram_matrix(kernel, Y))
    Qx, rx = smoother_half(Gx)
    Qy, ry = smoother_half(Gy)

    def half_apply(Q, ratio, M):
        # (Q sqrt(ratio) Q^T) @ M
        return Q @ (np.sqrt(ratio)[:, None] * (Q.T @ M))

    Py = Qy @ (ry[:, None] * Qy.T)
    S = half_apply(Qx, rx, half_apply(Qx, rx, Py).T)
    S = 0.5 * (S + S.T)
    rho, W = np.linalg.eigh(S)
    order = np.argsort(-rho, kind="stable")[:n_components]
    rho = np.clip(rho[order], 0.0, None)
    v = half_apply(Qx, rx, W[:, order])

    # Right side: same spectrum with the roles of X and Y exchanged.
    S2 = half_apply(Qy, ry, half_apply(Qy, ry, Qx @ (rx[:, None] * Qx.T)).T)
    S2 = 0.5 * (S2 + S2.T)
    rho2, W2 = np.linalg.eigh(S2)
    order2 = np.argsort(-rho2, kind="stable")[:n_components]
    v2 = half_apply(Qy, ry, W2[:, order2])

    def expansion_coefficients(G, vectors):
        coeff = np.linalg.solve(G + n * epsilon * np.eye(n), vectors)
        values = G @ coeff
        if normalization == "empirical":
            scale = np.linalg.norm(values, axis=0) / np.sqrt(n)
        else:
            scale = np.linalg.norm(coeff, axis=0)
        scale[scale == 0.0] = 1.0
        return coeff / scale

    alpha = expansion_coefficients(Gx, v)
    beta = expansion_coefficients(Gy, v2)
    f = KernelSectionFeatures(kernel, X, centered=True).then(LinearFeatures(alpha))
    g = KernelSectionFeatures(kernel, Y, centered=True).then(LinearFeatures(beta))
    return TransferOperatorModel(
        f=f, g=g, K=np.diag(rho), method="kernel_cca",
        eigenvalues=rho, projection_matrix=np.eye(n_components),
    )


# ---------------------------------------------------------------------------
# kernel-embedded density estimation


def kvad_feature_score(F: NDArray, Y: NDArray, kernel: Kernel,
                       epsilon: float = 1e-12) -> float:
    """Kernel-embedded predictability of forward samples from features.

    Measures how much of the kernel mass of ``Y`` the column span of ``F``
    captures: ``trace(G_Y P_F) / n`` with ``P_F`` the orthogonal projector
    onto the span of ``F``. Monotone in the feature span, so richer feature
    sets never score lower on the same data.
    """
    F = _as_frames(F, "F")
    Y = _as_frames(Y, "Y")
    if F.shape[0] != Y.shape[0]:
        raise InvalidArgument("F and Y must have the same number of rows")
    n = F.shape[0]
    G_Y = gram_matrix(kernel, Y)
    C = F.T @ F
    white = sym_inverse_sqrt(0.5 * (C + C.T), epsilon)
    B = F @ white.transform.T  # orthonormal columns spanning col(F)
    return float(np.sum((G_Y @ B) * B) / n)


def kvad_fit(X: NDArray, Y: NDArray, f: FeatureMap, kernel: Kernel,
             epsilon: float = 1e-12, n_components: Optional[int] = None) -> KVADModel:
    """Fit the transition-density ansatz ``p(x, y) ~= f(x)^T q(y)``.

    A constant feature is prepended to ``f`` so the ansatz contains the
    marginal of ``Y`` (the constant-only baseline); ``q`` is then estimated
    nonparametrically by least squares in the kernel embedding of the forward
    samples, which makes the fitted score dominate the baseline by
    construction.
    """
    X, Y = _as_frames(X), _as_frames(Y, "Y")
    if X.shape[0] != Y.shape[0]:
        raise InvalidArgument("X and Y must pair the same number of frames")
    fa = WithConstant(f)
    F = fa(X)
    n, m = F.shape
    if n_components is None:
        n_components = m
    G_Y = gram_matrix(kernel, Y)
    C = F.T @ F
    q_weights = F @ pinv_truncated(0.5 * (C + C.T))  # n x m, optimal embedded weights
    K = q_weights.T @ fa(Y)
    score = kvad_feature_score(F, Y, kernel, epsilon=epsilon)

    # Dominant directions in feature space by embedded predictability per
    # unit variance; these play the role of singular functions for this model.
    mean_f = F.mean(axis=0)
    Fc = F - mean_f
    c00 = Fc.T @ Fc / n
    white = sym_inverse_sqrt(c00, max(epsilon, 1e-12))
    inner = white.transform @ (Fc.T @ G_Y @ Fc / (n * n)) @ white.transform.T
    inner = 0.5 * (inner + inner.T)
    evals, evecs = np.linalg.eigh(inner)
    order = np.argsort(-evals, kind="stable")
    evals, evecs = evals[order], evecs[:, order]
    proj = white.transform.T @ evecs
    k = min(n_components, proj.shape[1])
    return KVADModel(
        f=fa,
        q_weights=q_weights,
        K=K,
        kernel=kernel,
        y_train=Y,
        score=score,
        feature_mean=mean_f,
        projection_matrix=proj[:, :k],
        singular_values=evals[:k],
    )


def kvad_score(model: KVADModel, X: NDArray, Y: NDArray,
               kernel: Optional[Kernel] = None) -> float:
    """Score the model's feature space on (possibly new) paired data.

    Re-estimates the optimal ``q`` for the model's features on the given
    pairs and returns the kernel-embedded predictability. A different kernel
    than the one used for fitting may be supplied for scoring.
    """
    kernel = model.kernel if kernel is None else kernel
    return kvad_feature_score(model.f(X), Y, kernel)
