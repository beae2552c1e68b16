"""Dense linear algebra kernels.

Cholesky solves go through LAPACK (scipy). The symmetric eigensolver is a
cyclic-by-row Jacobi method compiled with numba; it is the reference
solver used by the Laplacian oracle. A LAPACK path (``method="lapack"``) is
kept next to it for timing baselines, where an interpreted solver would
inflate every speed-up.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from numba import njit

from .errors import (
    EmptyResult,
    NotConverged,
    NotPositiveDefinite,
    NotSymmetric,
    OracleTooLarge,
    ShapeMismatch,
)


@dataclass(frozen=True)
class Tolerances:
    symmetry_rtol: float = 1e-10
    jacobi_max_sweeps: int = 100
    jacobi_max_n: int = 2000
    jacobi_offdiag_rtol: float = 1e-13
    gram_schmidt_scale: float = 1e-10
    rank_rtol: float = 1e-10


TOL = Tolerances()


def as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeMismatch(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf")
    return a


def check_symmetric(a, rtol=TOL.symmetry_rtol, name="matrix"):
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"{name} must be square, got {a.shape}")
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > rtol * max(scale, np.finfo(float).tiny):
        raise NotSymmetric(f"{name} is not symmetric to within {rtol:g} relative")


def cholesky_solve(a, b):
    """Solve ``a @ x = b`` for symmetric positive definite ``a``."""
    a = as_matrix(a, "a")
    vector = np.ndim(b) == 1
    b = as_matrix(b, "b")
    check_symmetric(a, name="a")
    if b.shape[0] != a.shape[0]:
        raise ShapeMismatch(f"a is {a.shape}, b is {b.shape}")
    try:
        factor = la.cho_factor(a, lower=True, check_finite=False)
    except la.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    if np.any(np.diag(factor[0]) <= 0):
        raise NotPositiveDefinite("non-positive pivot in Cholesky factor")
    x = la.cho_solve(factor, b, check_finite=False)
    return x[:, 0] if vector else x


def gram_schmidt(m, tol=None, metric=None):
    """Orthonormalize the columns of ``m`` by modified Gram-Schmidt.

    Columns whose norm after projection falls below ``tol`` (default
    ``1e-10 * sqrt(n)``) are dropped; the remaining columns keep their
    original order. Each column is projected twice, which keeps
    ``Q.T @ Q`` at the identity to rounding even for ill-conditioned input.

    Parameters
    ----------
    m : array (n, k)
    tol : float, optional
    metric : array (n, n), optional
        Symmetric positive semi-definite matrix defining the inner product
        ``<a, b> = a.T @ metric @ b``. Euclidean when omitted.

    Returns
    -------
    q : array (n, k')
    """
    m = as_matrix(m, "m")
    n, k = m.shape
    if tol is None:
        tol = TOL.gram_schmidt_scale * np.sqrt(n)
    if metric is None:
        inner = np.dot
    else:
        metric = np.asarray(metric, dtype=np.float64)

        def inner(u, v):
            return u @ (metric @ v)

    basis = []
    for j in range(k):
        v = m[:, j].copy()
        for _ in range(2):
            for q in basis:
                v -= inner(q, v) * q
        norm_sq = inner(v, v)
        norm = np.sqrt(norm_sq) if norm_sq > 0 else 0.0
        if norm < tol:
            continue
        basis.append(v / norm)
    if not basis:
        raise EmptyResult("all columns are numerically dependent")
    return np.column_stack(basis)


@njit(cache=True)
def _jacobi_sweeps(a, vt, max_sweeps, offdiag_tol):
    # a is symmetric and updated in place; vt holds eigenvectors as rows so
    # that every inner loop runs over contiguous memory
    n = a.shape[0]
    # rotations on entries below this cannot keep the off-diagonal norm
    # above offdiag_tol, so they are skipped
    skip = offdiag_tol / max(n, 1)
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += a[i, j] * a[i, j]
        if np.sqrt(2.0 * off) <= offdiag_tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    if k == p or k == q:
                        continue
                    apk = a[p, k]
                    aqk = a[q, k]
                    new_p = c * apk - s * aqk
                    new_q = s * apk + c * aqk
                    a[p, k] = new_p
                    a[k, p] = new_p
                    a[q, k] = new_q
                    a[k, q] = new_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vpk = vt[p, k]
                    vqk = vt[q, k]
                    vt[p, k] = c * vpk - s * vqk
                    vt[q, k] = s * vpk + c * vqk
    return -1


@dataclass
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray


def _canonical_signs(vectors):
    # first non-negligible entry of each vector made positive
    idx = np.argmax(np.abs(vectors) > 1e-12 * np.abs(vectors).max(axis=0), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def symmetric_eig(a, method="jacobi", tol=TOL):
    """Full eigendecomposition of a symmetric matrix, values descending.

    ``method="jacobi"`` runs cyclic-by-row Jacobi rotations (capped at
    ``tol.jacobi_max_n`` rows and ``tol.jacobi_max_sweeps`` sweeps);
    ``method="lapack"`` calls ``scipy.linalg.eigh``.
    """
    a = as_matrix(a, "a")
    check_symmetric(a, tol.symmetry_rtol, "a")
    n = a.shape[0]
    a = 0.5 * (a + a.T)
    if method == "lapack":
        values, vectors = la.eigh(a, check_finite=False)
    elif method == "jacobi":
        if n > tol.jacobi_max_n:
            raise OracleTooLarge(
                f"Jacobi solver is capped at n={tol.jacobi_max_n}, got n={n}"
            )
        work = np.array(a, order="C")
        rows = np.eye(n)
        scale = np.linalg.norm(a)
        sweeps = _jacobi_sweeps(work, rows, tol.jacobi_max_sweeps,
                                tol.jacobi_offdiag_rtol * scale)
        vectors = rows.T
        if sweeps < 0:
            raise NotConverged(
                f"Jacobi did not converge in {tol.jacobi_max_sweeps} sweeps"
            )
        values = np.diag(work).copy()
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(-values, kind="stable")
    return EigenResult(values[order], _canonical_signs(vectors[:, order]))


def generalized_sym_eig(a, b, ridge=0.0, method="jacobi"):
    """Solve ``a v = lam (b + ridge I) v`` by Cholesky whitening.

    Returned eigenvectors are in the original coordinates and
    ``(b + ridge I)``-orthonormal. ``method="lapack"`` hands the pair to
    LAPACK's symmetric-definite driver instead.
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape != b.shape:
        raise ShapeMismatch(f"a is {a.shape}, b is {b.shape}")
    check_symmetric(a, name="a")
    check_symmetric(b, name="b")
    metric = b + ridge * np.eye(b.shape[0])
    if method == "lapack":
        try:
            values, vectors = la.eigh(a, metric, check_finite=False)
        except la.LinAlgError as exc:
            raise NotPositiveDefinite(str(exc)) from None
        order = np.argsort(-values, kind="stable")
        return EigenResult(values[order], _canonical_signs(vectors[:, order]))
    try:
        low = la.cholesky(metric, lower=True, check_finite=False)
    except la.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    half = la.solve_triangular(low, a, lower=True, check_finite=False)
    whitened = la.solve_triangular(low, half.T, lower=True, check_finite=False)
    whitened = 0.5 * (whitened + whitened.T)
    res = symmetric_eig(whitened, method=method)
    vectors = la.solve_triangular(low.T, res.vectors, lower=False, check_finite=False)
    return EigenResult(res.values, vectors)


def numerical_rank(a, rtol=TOL.rank_rtol):
    s = np.linalg.svd(np.asarray(a, dtype=np.float64), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def principal_angles(a, b):
    """Principal angles (radians, ascending) between column spaces."""
    return la.subspace_angles(np.asarray(a, float), np.asarray(b, float))[::-1]
