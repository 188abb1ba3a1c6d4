"""Positive-definite kernels and blockwise Gram matrix assembly."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .basis import FeatureMap
from .errors import InvalidArgument

__all__ = [
    "Kernel",
    "GaussianKernel",
    "PolynomialKernel",
    "gram_matrix",
    "kernel_eval",
    "KernelSectionFeatures",
]


class Kernel:
    """Base class for positive-definite kernels on R^d."""

    def pairwise(self, A: NDArray, B: NDArray) -> NDArray:
        """Kernel matrix with entries ``k(A[i], B[j])``."""
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianKernel(Kernel):
    """``k(x, y) = exp(-||x - y||^2 / (2 sigma^2))``."""

    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise InvalidArgument(f"sigma must be positive, got {self.sigma}")

    def pairwise(self, A, B):
        sq = (
            np.sum(A * A, axis=1)[:, None]
            + np.sum(B * B, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-sq / (2.0 * self.sigma**2))


@dataclass(frozen=True)
class PolynomialKernel(Kernel):
    """``k(x, y) = (c + x . y) ** p``."""

    degree: int
    constant: float = 1.0

    def __post_init__(self):
        if self.degree < 1:
            raise InvalidArgument(f"degree must be at least 1, got {self.degree}")
        if self.constant < 0:
            raise InvalidArgument(f"constant must be non-negative, got {self.constant}")

    def pairwise(self, A, B):
        return (self.constant + A @ B.T) ** self.degree


def _as_points(X: NDArray, name: str) -> NDArray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise InvalidArgument(f"{name} must be a matrix of points, got ndim {X.ndim}")
    return X


def kernel_eval(kernel: Kernel, x: NDArray, y: NDArray) -> float:
    """Evaluate a kernel on a single pair of points."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise InvalidArgument(f"point dimensions differ: {x.shape[0]} vs {y.shape[0]}")
    return float(kernel.pairwise(x[None, :], y[None, :])[0, 0])


def gram_matrix(
    kernel: Kernel,
    A: NDArray,
    B: Optional[NDArray] = None,
    block_size: int = 512,
) -> NDArray:
    """Assemble the Gram matrix ``G[i, j] = k(A[i], B[j])`` blockwise.

    When ``B`` is omitted (or is ``A`` itself) the result is made exactly
    symmetric by mirroring the upper triangle, so ``G == G.T`` holds
    bit-for-bit.

    Parameters
    ----------
    kernel : Kernel
    A : ndarray of shape (m, d)
    B : ndarray of shape (n, d), optional
    block_size : int, default 512
        Rows per block; bounds peak memory of intermediate products.
    """
    A = _as_points(A, "A")
    symmetric = B is None or B is A
    B = A if symmetric else _as_points(B, "B")
    if A.shape[1] != B.shape[1]:
        raise InvalidArgument(f"point dimensions differ: {A.shape[1]} vs {B.shape[1]}")
    if block_size <= 0:
        raise InvalidArgument(f"block_size must be positive, got {block_size}")
    m, n = A.shape[0], B.shape[0]
    G = np.empty((m, n))
    for i in range(0, m, block_size):
        hi = min(i + block_size, m)
        for j in range(0, n, block_size):
            hj = min(j + block_size, n)
            if symmetric and j < i:
                G[i:hi, j:hj] = G[j:hj, i:hi].T
            else:
                G[i:hi, j:hj] = kernel.pairwise(A[i:hi], B[j:hj])
    if symmetric:
        upper = np.triu(G)
        G = upper + np.triu(G, 1).T
    return G


class KernelSectionFeatures(FeatureMap):
    """Kernel sections anchored at a fixed point set: ``x -> [k(x, z_j)]_j``.

    With ``centered=True`` the sections are centered with respect to the
    anchor set's empirical distribution, which matches Gram-matrix centering:
    evaluating on the anchors themselves reproduces the centered Gram matrix.
    """

    def __init__(self, kernel: Kernel, points: NDArray, centered: bool = False):
        points = _as_points(points, "points")
        if points.shape[0] == 0:
            raise InvalidArgument("need at least one anchor point")
        self.kernel = kernel
        self.points = points
        self.centered = bool(centered)
        self.dimension_in = points.shape[1]
        self.dimension_out = points.shape[0]
        if centered:
            G = gram_matrix(kernel, points)
            self._col_means = G.mean(axis=0)
            self._grand_mean = float(G.mean())
        else:
            self._col_means = None
            self._grand_mean = 0.0

    def _evaluate(self, X):
        G = gram_matrix(self.kernel, X, self.points)
        if self.centered:
            G = G - self._col_means[None, :] - G.mean(axis=1, keepdims=True) + self._grand_mean
        return G
