"""Gaussian affinity graphs and their normalized kernel matrices.

Builds the fully connected affinity matrix

    w_ij = exp(-||x_i - x_j||^2 / epsilon)

over a point cloud, normalizes it either symmetrically
(D^{-1/2} W D^{-1/2}) or asymmetrically (D^{-1} W, row stochastic), and
forms the graph Laplacian I - W. The two normalizations are similar
matrices and share their eigenvalue multiset; the symmetric one is what
the eigensolvers in :mod:`specapprox.spectral` expect.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import DegenerateGraphError, InputError, ParameterError

SYMMETRIC = "symmetric"
ASYMMETRIC = "asymmetric"


@dataclass
class PointCloud:
    """n observations in d dimensions with optional integer labels."""

    points: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise InputError(f"points must be 2-D, got shape {pts.shape}")
        n, d = pts.shape
        if n < 2 or d < 1:
            raise ParameterError(f"need at least 2 points and 1 dimension, got {n} x {d}")
        if not np.all(np.isfinite(pts)):
            raise InputError("points contain non-finite coordinates")
        self.points = pts
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (n,):
                raise InputError(f"labels must have length {n}, got shape {labels.shape}")
            self.labels = labels

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass
class KernelMatrix:
    """A raw affinity matrix together with its degrees and normalized form.

    ``w_tilde`` is the symmetric affinity matrix with unit diagonal,
    ``degree`` its row sums, and ``w`` the normalized matrix under ``mode``.
    ``epsilon`` records the bandwidth the affinities were built with.
    """

    w_tilde: np.ndarray
    degree: np.ndarray
    w: np.ndarray
    mode: str
    epsilon: float


def _as_points(points) -> np.ndarray:
    if isinstance(points, PointCloud):
        return points.points
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise InputError(f"points must be 2-D, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise InputError("points contain non-finite coordinates")
    return pts


def pairwise_affinity(points, epsilon: float) -> np.ndarray:
    """Gaussian affinities exp(-||x_i - x_j||^2 / epsilon) for all pairs.

    Parameters
    ----------
    points : PointCloud or (n, d) array
        Observations; coordinates must be finite.
    epsilon : float
        Positive kernel bandwidth.

    Returns
    -------
    (n, n) ndarray
        Exactly symmetric matrix with unit diagonal and entries in (0, 1].
    """
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise ParameterError(f"epsilon must be positive and finite, got {epsilon}")
    pts = _as_points(points)
    sq = np.einsum("ij,ij->i", pts, pts)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T)
    # cancellation can leave tiny negatives; symmetrize so the result is
    # independent of construction order
    d2 = 0.5 * (d2 + d2.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    d2 /= -epsilon
    return np.exp(d2, out=d2)


def normalize(w_tilde: np.ndarray, mode: str = SYMMETRIC, epsilon: float = 1.0) -> KernelMatrix:
    """Normalize a raw affinity matrix by its degrees.

    ``symmetric`` mode forms D^{-1/2} W D^{-1/2}; ``asymmetric`` forms
    D^{-1} W, whose rows sum to one. The two share eigenvalues.

    Parameters
    ----------
    w_tilde : (n, n) array
        Symmetric nonnegative affinities with positive row sums.
    mode : str
        ``"symmetric"`` or ``"asymmetric"``.
    epsilon : float
        Bandwidth recorded on the result for provenance.
    """
    if mode not in (SYMMETRIC, ASYMMETRIC):
        raise ParameterError(f"unknown normalization mode {mode!r}")
    wt = np.asarray(w_tilde, dtype=np.float64)
    if wt.ndim != 2 or wt.shape[0] != wt.shape[1]:
        raise InputError(f"affinity matrix must be square, got shape {wt.shape}")
    if not np.allclose(wt, wt.T, rtol=0.0, atol=1e-10):
        raise InputError("affinity matrix is not symmetric")
    if np.any(wt < 0):
        raise InputError("affinity matrix has negative entries")
    degree = wt.sum(axis=1)
    if np.any(degree <= 0):
        raise DegenerateGraphError("a row of the affinity matrix sums to zero")
    if mode == SYMMETRIC:
        inv_sqrt = 1.0 / np.sqrt(degree)
        w = wt * np.outer(inv_sqrt, inv_sqrt)
    else:
        w = wt / degree[:, None]
    return KernelMatrix(w_tilde=wt, degree=degree, w=w, mode=mode, epsilon=float(epsilon))


def gaussian_kernel(points, epsilon: float, mode: str = SYMMETRIC) -> KernelMatrix:
    """Build and normalize the Gaussian affinity matrix in one step."""
    return normalize(pairwise_affinity(points, epsilon), mode=mode, epsilon=epsilon)


def laplacian(kernel) -> np.ndarray:
    """Graph Laplacian I - W of a kernel matrix.

    Shares eigenvectors with W; its eigenvalues are 1 - lambda(W). Accepts
    a :class:`KernelMatrix` or the normalized matrix itself.
    """
    w = kernel.w if isinstance(kernel, KernelMatrix) else np.asarray(kernel, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise InputError(f"normalized matrix must be square, got shape {w.shape}")
    return np.eye(w.shape[0]) - w
