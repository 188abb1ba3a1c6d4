"""Dense symmetric linear algebra used by the spectral estimators.

All routines share one regularization convention: ``epsilon`` is an absolute
eigenvalue cutoff. Eigenvalues less than or equal to ``epsilon`` are discarded
(rank truncation); nothing is added to the diagonal. Estimators that prefer
Tikhonov-style shifts implement them locally on their own matrices.

Sorting is descending and stable: ties keep the order in which the underlying
decomposition produced them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateInput, InvalidArgument

__all__ = [
    "SpectralDecomposition",
    "WhiteningTransform",
    "sym_inverse_sqrt",
    "generalized_eig_sym",
    "truncated_svd",
]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues with matching eigenvectors, sorted descending.

    Attributes
    ----------
    eigenvalues : ndarray of shape (k,)
        Sorted descending; by value for symmetric problems, by modulus where a
        routine documents modulus ordering.
    eigenvectors : ndarray of shape (n, k)
        Right eigenvectors, one column per eigenvalue.
    left_eigenvectors : ndarray of shape (n, k), optional
        Populated by routines that also compute the left system.
    """

    eigenvalues: NDArray
    eigenvectors: NDArray
    left_eigenvectors: Optional[NDArray] = None


@dataclass(frozen=True)
class WhiteningTransform:
    """Affine map ``x -> transform @ (x - mean)`` that whitens a covariance.

    ``transform`` has shape (rank, d); applying it to data distributed with
    covariance C yields unit covariance on the retained subspace.
    """

    transform: NDArray
    mean: NDArray = field(default=None)  # type: ignore[assignment]
    rank: int = 0

    def __post_init__(self):
        if self.mean is None:
            object.__setattr__(self, "mean", np.zeros(self.transform.shape[1]))
        if self.rank == 0:
            object.__setattr__(self, "rank", self.transform.shape[0])

    def apply(self, X: NDArray) -> NDArray:
        """Whiten rows of ``X``."""
        X = np.asarray(X, dtype=np.float64)
        return (X - self.mean) @ self.transform.T


def _check_square_symmetric(C: NDArray, name: str, rtol: float = 1e-10) -> NDArray:
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidArgument(f"{name} must be a square matrix, got shape {C.shape}")
    scale = max(np.abs(C).max(), 1.0) if C.size else 1.0
    if not np.allclose(C, C.T, atol=rtol * scale, rtol=0.0):
        raise InvalidArgument(f"{name} must be symmetric within relative tolerance {rtol:g}")
    return C


def sym_inverse_sqrt(C: NDArray, epsilon: float = 1e-12) -> WhiteningTransform:
    """Inverse square root of a symmetric positive semi-definite matrix.

    Eigenvalues of ``C`` that are less than or equal to ``epsilon`` are
    discarded, so the returned transform spans only the numerically reliable
    subspace.

    Parameters
    ----------
    C : ndarray of shape (d, d)
        Symmetric positive semi-definite matrix.
    epsilon : float, default 1e-12
        Absolute eigenvalue cutoff.

    Returns
    -------
    WhiteningTransform
        With ``transform`` of shape (rank, d) such that
        ``transform @ C @ transform.T`` is the identity on the retained rank.

    Raises
    ------
    InvalidArgument
        If ``C`` is not square or not symmetric.
    DegenerateInput
        If no eigenvalue survives the cutoff.
    """
    C = _check_square_symmetric(C, "C")
    evals, evecs = np.linalg.eigh(C)
    order = np.argsort(-evals, kind="stable")
    evals, evecs = evals[order], evecs[:, order]
    keep = evals > epsilon
    if not np.any(keep):
        raise DegenerateInput(
            f"matrix rank collapsed to zero under eigenvalue cutoff {epsilon:g}"
        )
    evals, evecs = evals[keep], evecs[:, keep]
    transform = (evecs / np.sqrt(evals)).T
    return WhiteningTransform(transform=transform, mean=np.zeros(C.shape[0]), rank=int(evals.size))


def generalized_eig_sym(A: NDArray, B: NDArray, epsilon: float = 1e-12) -> SpectralDecomposition:
    """Solve ``A v = lam B v`` for symmetric A and symmetric PSD B.

    The problem is reduced to an ordinary symmetric eigenproblem by whitening
    with ``sym_inverse_sqrt(B, epsilon)``; directions of B below the cutoff do
    not participate. Eigenvalues are real and descending, eigenvector columns
    are normalized to unit Euclidean norm.

    Raises
    ------
    DegenerateInput
        If the retained rank of ``B`` is zero.
    """
    A = _check_square_symmetric(A, "A")
    white = sym_inverse_sqrt(B, epsilon)
    W = white.transform
    Aw = W @ A @ W.T
    Aw = 0.5 * (Aw + Aw.T)
    evals, evecs = np.linalg.eigh(Aw)
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    vectors = W.T @ evecs[:, order]
    norms = np.linalg.norm(vectors, axis=0)
    norms[norms == 0.0] = 1.0
    return SpectralDecomposition(eigenvalues=evals, eigenvectors=vectors / norms)


def truncated_svd(M: NDArray, k: Optional[int] = None) -> tuple[NDArray, NDArray, NDArray]:
    """Top-``k`` singular triplets of a matrix.

    Parameters
    ----------
    M : ndarray of shape (m, n)
    k : int, optional
        Number of singular triplets to keep; defaults to ``min(m, n)``.

    Returns
    -------
    (U, sigma, V)
        ``U`` of shape (m, k), ``sigma`` descending of shape (k,), ``V`` of
        shape (n, k), with ``M ~= U @ diag(sigma) @ V.T``.

    Raises
    ------
    InvalidArgument
        If ``k`` is not in ``1..min(m, n)``.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise InvalidArgument(f"expected a matrix, got array of ndim {M.ndim}")
    full = min(M.shape)
    if k is None:
        k = full
    if not (1 <= k <= full):
        raise InvalidArgument(f"k must be in 1..{full}, got {k}")
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    return U[:, :k], s[:k], Vh[:k].T


def pinv_truncated(M: NDArray, rcond: Optional[float] = None) -> NDArray:
    """Moore-Penrose pseudoinverse through :func:`truncated_svd`.

    Singular values below ``rcond * sigma_max`` are treated as zero. The
    default ``rcond`` matches the usual dense-LAPACK heuristic
    ``max(m, n) * machine_eps``.
    """
    M = np.asarray(M, dtype=np.float64)
    U, s, V = truncated_svd(M)
    if rcond is None:
        rcond = max(M.shape) * np.finfo(np.float64).eps
    cutoff = rcond * (s[0] if s.size else 0.0)
    nonzero = s > cutoff
    inv = np.zeros_like(s)
    inv[nonzero] = 1.0 / s[nonzero]
    return (V * inv) @ U.T
