"""Exact and randomized eigendecompositions of symmetric kernel matrices.

Three routes to the top eigenpairs of a symmetric n x n matrix W:

* :func:`exact_eig` - dense solve, the baseline everything is compared to.
* :func:`nystrom` - eigendecompose the m x m principal submatrix at a set of
  landmark rows/columns and extend: lambda_hat = (n/m) lambda and
  u_hat = sqrt(m/n) (1/lambda) W[:, M] u. Landmarks come from
  :func:`sample_landmarks`, uniformly or in proportion to a weight vector
  (typically the diagonal of W).
* :func:`gaussian_projection` - randomized range finder: sketch Y = W Omega
  with Gaussian Omega, orthonormalize Y into Q, solve the small least-squares
  problem B (Q^T Omega) = Q^T Y, and lift B's eigenvectors through Q. The
  returned basis Q U_hat keeps orthonormal columns; the Nystrom extension
  does not.

All decompositions carry their provenance (method, m, seed, landmarks) and
use a fixed sign convention so runs are comparable across methods and seeds.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .exceptions import (
    DegenerateSubmatrixError,
    InputError,
    NumericalError,
    ParameterError,
)
from .rng import make_rng, standard_normal

EXACT = "exact"
NYSTROM_UNIFORM = "nystrom_uniform"
NYSTROM_WEIGHTED = "nystrom_weighted"
GAUSSIAN_PROJECTION = "gaussian_projection"

UNIFORM = "uniform"
WEIGHTED = "weighted"

#: relative magnitude below which submatrix eigenvalues are considered zero
DEFAULT_RANK_TOLERANCE = 1e-12

_SKETCH_CONDITION_LIMIT = 1e12


@dataclass
class SpectralDecomposition:
    """Eigenvalues (non-increasing) and eigenvectors with provenance.

    ``eigenvectors`` holds one eigenvector per column. ``m`` is the
    approximation rank (n for the exact method), ``seed`` the RNG seed
    (0 for exact), and ``landmark_indices`` the sampled subset for the
    Nystrom methods (0-based, sorted).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    method: str
    m: int
    seed: int
    landmark_indices: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]

    @property
    def k(self) -> int:
        return self.eigenvectors.shape[1]


@dataclass
class LandmarkSample:
    """A without-replacement sample of m row/column indices (0-based, sorted)."""

    indices: np.ndarray
    scheme: str
    seed: int

    @property
    def m(self) -> int:
        return self.indices.shape[0]


def sign_normalize(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the entry of largest magnitude is positive.

    Ties go to the lowest row index. Returns a new array.
    """
    out = np.array(vectors, dtype=np.float64, copy=True)
    if out.size == 0:
        return out
    lead = np.argmax(np.abs(out), axis=0)
    flip = out[lead, np.arange(out.shape[1])] < 0
    out[:, flip] *= -1.0
    return out


def _check_symmetric(w, atol: float = 1e-10) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise InputError(f"matrix must be square, got shape {w.shape}")
    if not np.allclose(w, w.T, rtol=0.0, atol=atol):
        raise InputError("matrix is not symmetric")
    return w


def exact_eig(w, k: int) -> SpectralDecomposition:
    """Top-k eigenpairs of a symmetric matrix by algebraic eigenvalue.

    Parameters
    ----------
    w : (n, n) array
        Symmetric within 1e-10.
    k : int
        Number of pairs, 1 <= k <= n.
    """
    w = _check_symmetric(w)
    n = w.shape[0]
    if not 1 <= k <= n:
        raise ParameterError(f"k must be in [1, {n}], got {k}")
    try:
        vals, vecs = scipy.linalg.eigh(w, subset_by_index=[n - k, n - 1])
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed to converge: {exc}") from exc
    order = np.argsort(vals, kind="stable")[::-1]
    return SpectralDecomposition(
        eigenvalues=vals[order],
        eigenvectors=sign_normalize(vecs[:, order]),
        method=EXACT,
        m=n,
        seed=0,
    )


def sample_landmarks(weights, m: int, scheme: str = UNIFORM, seed: int = 0) -> LandmarkSample:
    """Sample m distinct indices from {0..n-1} without replacement.

    ``uniform`` ignores the weight values (only their count matters).
    ``weighted`` draws in proportion to the weights via exponential races,
    which is equivalent to sequential draws with renormalization after each
    removal and is deterministic under the seed.

    Parameters
    ----------
    weights : (n,) array
        Nonnegative sampling weights; under the weighted scheme at least m
        of them must be strictly positive.
    m : int
        Sample size, 1 <= m <= n.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1:
        raise InputError(f"weights must be a vector, got shape {w.shape}")
    n = w.shape[0]
    if not 1 <= m <= n:
        raise ParameterError(f"m must be in [1, {n}], got {m}")
    if scheme not in (UNIFORM, WEIGHTED):
        raise ParameterError(f"unknown sampling scheme {scheme!r}")
    rng = make_rng(seed)
    if scheme == UNIFORM:
        chosen = rng.permutation(n)[:m]
    else:
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InputError("weights must be finite and nonnegative")
        if np.count_nonzero(w > 0) < m:
            raise InputError(f"weighted sampling of {m} needs at least {m} positive weights")
        u = np.empty(n)
        u[:] = np.inf
        positive = w > 0
        from .rng import uniform_open

        draws = uniform_open(rng, n)
        u[positive] = -np.log(draws[positive]) / w[positive]
        chosen = np.argsort(u, kind="stable")[:m]
    return LandmarkSample(indices=np.sort(chosen).astype(np.int64), scheme=scheme, seed=int(seed))


def nystrom(
    w,
    sample: LandmarkSample,
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
) -> SpectralDecomposition:
    """Nystrom extension of the eigenpairs of W's landmark submatrix.

    Eigendecomposes W[M, M] and extends each pair to all n rows:
    lambda_hat = (n/m) lambda, u_hat = sqrt(m/n) (1/lambda) W[:, M] u.
    Pairs whose submatrix eigenvalue magnitude falls at or below
    ``rank_tolerance`` times the largest magnitude are dropped, guarding the
    division by lambda.

    Returns up to m eigenpairs, eigenvalues non-increasing. The extended
    eigenvectors are in general not orthonormal.
    """
    w = _check_symmetric(w)
    n = w.shape[0]
    idx = np.asarray(sample.indices, dtype=np.int64)
    m = idx.shape[0]
    if m < 1 or m > n:
        raise InputError(f"sample size {m} invalid for a {n} x {n} matrix")
    if np.any(idx < 0) or np.any(idx >= n) or np.unique(idx).shape[0] != m:
        raise InputError("landmark indices must be distinct and within range")
    sub = w[np.ix_(idx, idx)]
    try:
        vals, vecs = scipy.linalg.eigh(sub)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed on the landmark submatrix: {exc}") from exc
    vals = vals[::-1]
    vecs = vecs[:, ::-1]
    largest = np.max(np.abs(vals))
    keep = np.abs(vals) > rank_tolerance * largest
    if largest == 0.0 or not np.any(keep):
        raise DegenerateSubmatrixError(
            "all eigenvalues of the landmark submatrix are below the rank tolerance"
        )
    vals = vals[keep]
    vecs = vecs[:, keep]
    scale = np.sqrt(m / n)
    extended = scale * (w[:, idx] @ (vecs / vals))
    method = NYSTROM_UNIFORM if sample.scheme == UNIFORM else NYSTROM_WEIGHTED
    return SpectralDecomposition(
        eigenvalues=(n / m) * vals,
        eigenvectors=sign_normalize(extended),
        method=method,
        m=m,
        seed=sample.seed,
        landmark_indices=idx.copy(),
    )


def orthonormal_columns(y: np.ndarray, drop_tol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis for the column space of y.

    Modified Gram-Schmidt with one re-orthogonalization pass per column.
    Columns whose residual norm falls at or below ``drop_tol`` times their
    original norm are dropped, revealing the numerical rank.
    """
    y = np.asarray(y, dtype=np.float64)
    n, k = y.shape
    basis = np.empty((n, k))
    ref = np.linalg.norm(y, axis=0)
    r = 0
    for j in range(k):
        v = y[:, j].copy()
        for _ in range(2):
            if r:
                v -= basis[:, :r] @ (basis[:, :r].T @ v)
        norm = np.linalg.norm(v)
        if ref[j] > 0 and norm > drop_tol * ref[j]:
            basis[:, r] = v / norm
            r += 1
    return basis[:, :r].copy()


def gaussian_projection(w, m: int, seed: int = 0) -> SpectralDecomposition:
    """Approximate eigenpairs of W via a Gaussian random sketch.

    Draws an n x m Gaussian matrix Omega, forms the sketch Y = W Omega,
    orthonormalizes it into Q, solves the least-squares problem
    B (Q^T Omega) = Q^T Y for the small matrix B, symmetrizes B, and lifts
    its eigenvectors: the returned eigenvector matrix Q U_hat has
    orthonormal columns. A fixed seed reproduces Omega and hence the output
    exactly.

    Raises
    ------
    NumericalError
        If Q^T Omega is numerically rank deficient (condition number above
        1e12); a different seed or a larger m usually fixes this.
    """
    w = _check_symmetric(w)
    n = w.shape[0]
    if not 1 <= m <= n:
        raise ParameterError(f"m must be in [1, {n}], got {m}")
    rng = make_rng(seed)
    omega = standard_normal(rng, (n, m))
    sketch = w @ omega
    basis = orthonormal_columns(sketch)
    if basis.shape[1] == 0:
        raise DegenerateSubmatrixError("the sketch W @ Omega has no numerical rank")
    bt_omega = basis.T @ omega
    singular = scipy.linalg.svdvals(bt_omega)
    if singular[-1] <= 0 or singular[0] / singular[-1] > _SKETCH_CONDITION_LIMIT:
        raise NumericalError(
            "Q^T Omega is numerically rank deficient; try a different seed or a larger m"
        )
    bt_sketch = basis.T @ sketch
    # least-squares B (Q^T Omega) = Q^T Y, minimum-norm on rank deficiency
    solution, _, _, _ = scipy.linalg.lstsq(bt_omega.T, bt_sketch.T, lapack_driver="gelsy")
    small = solution.T
    small = 0.5 * (small + small.T)
    vals, vecs = scipy.linalg.eigh(small)
    vals = vals[::-1]
    vecs = vecs[:, ::-1]
    return SpectralDecomposition(
        eigenvalues=vals,
        eigenvectors=sign_normalize(basis @ vecs),
        method=GAUSSIAN_PROJECTION,
        m=m,
        seed=int(seed),
    )


def reconstruction_error(w, dec: SpectralDecomposition) -> float:
    """Frobenius norm of W - U diag(lambda) U^T."""
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise InputError(f"matrix must be square, got shape {w.shape}")
    if dec.eigenvectors.shape[0] != w.shape[0]:
        raise InputError(
            f"decomposition has {dec.eigenvectors.shape[0]} rows, matrix has {w.shape[0]}"
        )
    approx = (dec.eigenvectors * dec.eigenvalues) @ dec.eigenvectors.T
    return float(np.linalg.norm(w - approx, "fro"))


def save_decomposition(dec: SpectralDecomposition, values_path, vectors_path) -> None:
    """Write a decomposition as a CSV pair with a metadata header.

    The eigenvalues file starts with ``# key=value`` comment lines carrying
    method, m, seed and landmark indices, then one eigenvalue per line. The
    eigenvectors file is the plain n x k matrix.
    """
    with open(values_path, "w") as fh:
        fh.write(f"# method={dec.method}\n")
        fh.write(f"# m={dec.m}\n")
        fh.write(f"# seed={dec.seed}\n")
        if dec.landmark_indices is not None:
            fh.write("# landmarks=" + ",".join(str(i) for i in dec.landmark_indices) + "\n")
        for value in dec.eigenvalues:
            fh.write(f"{value!r}\n")
    np.savetxt(vectors_path, dec.eigenvectors, delimiter=",", fmt="%r")


def load_decomposition(values_path, vectors_path) -> SpectralDecomposition:
    """Read back a decomposition written by :func:`save_decomposition`."""
    meta = {}
    values = []
    with open(values_path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val.strip()
            else:
                values.append(float(line))
    landmarks = None
    if "landmarks" in meta and meta["landmarks"]:
        landmarks = np.array([int(t) for t in meta["landmarks"].split(",")], dtype=np.int64)
    vectors = np.loadtxt(vectors_path, delimiter=",", ndmin=2)
    return SpectralDecomposition(
        eigenvalues=np.asarray(values, dtype=np.float64),
        eigenvectors=vectors,
        method=meta.get("method", EXACT),
        m=int(meta.get("m", vectors.shape[1])),
        seed=int(meta.get("seed", 0)),
        landmark_indices=landmarks,
    )
