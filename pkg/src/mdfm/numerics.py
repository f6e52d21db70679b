"""Dense symmetric linear algebra: SPD solves and eigendecompositions.

Matrices are plain ``float64`` numpy arrays. Two eigensolvers are exposed:
:func:`sym_eigen` (LAPACK ``syevd`` through numpy, used on the hot path) and
:func:`jacobi_eigen`, a cyclic Jacobi implementation kept as an independent
reference. Both return eigenvalues in descending order with the same sign
convention, so their outputs are interchangeable.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NotPositiveDefinite, NotSymmetric, ShapeMismatch

SYMMETRY_RTOL = 1e-10


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-D, got shape {a.shape}")
    return a


def check_symmetric(a: np.ndarray, rtol: float = SYMMETRY_RTOL) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {a.shape}")
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > rtol * max(scale, np.finfo(float).tiny):
        raise NotSymmetric("matrix is not symmetric within tolerance")


def solve_spd(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` for symmetric positive-definite ``a``.

    Uses a Cholesky factorization; the inverse is never formed. A 1-D ``b``
    yields a 1-D solution.

    Raises
    ------
    NotPositiveDefinite
        If the factorization meets a non-positive pivot.
    ShapeMismatch
        If ``a`` is not square or ``b`` has the wrong number of rows.
    """
    a = np.asarray(a, dtype=np.float64)
    b_in = np.asarray(b, dtype=np.float64)
    check_symmetric(a)
    if a.shape[0] < 1:
        raise ShapeMismatch("empty system")
    if b_in.shape[0] != a.shape[0]:
        raise ShapeMismatch(f"rhs has {b_in.shape[0]} rows, system has {a.shape[0]}")
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    return scipy.linalg.cho_solve(factor, b_in)


def _canonical_signs(vecs: np.ndarray) -> np.ndarray:
    # Flip each column so its largest-magnitude entry is non-negative.
    if vecs.size == 0:
        return vecs
    pivot = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[pivot, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def sym_eigen(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns ``(values, vectors)`` with ``values`` sorted descending and the
    i-th column of ``vectors`` the matching unit eigenvector, sign-fixed so
    its largest-magnitude component is non-negative.
    """
    a = np.asarray(a, dtype=np.float64)
    check_symmetric(a)
    values, vectors = np.linalg.eigh(0.5 * (a + a.T))
    values = values[::-1].copy()
    vectors = vectors[:, ::-1]
    return values, _canonical_signs(np.ascontiguousarray(vectors))


def jacobi_eigen(a, tol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver with the same output contract as :func:`sym_eigen`.

    Sweeps over all off-diagonal pairs until the off-diagonal Frobenius norm
    falls below ``tol * ||a||_F``. Quadratic per rotation, so only suited to
    small matrices.

    Raises
    ------
    NoConvergence
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    a = np.asarray(a, dtype=np.float64)
    check_symmetric(a)
    n = a.shape[0]
    m = 0.5 * (a + a.T)
    v = np.eye(n)
    threshold = tol * np.linalg.norm(m)

    def off_norm(x):
        return np.linalg.norm(x - np.diag(np.diag(x)))

    for _ in range(max_sweeps):
        if off_norm(m) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if apq == 0.0:
                    continue
                theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # m <- J^T m J with J the (p, q) Givens rotation
                mp = m[:, p].copy()
                mq = m[:, q].copy()
                m[:, p] = c * mp - s * mq
                m[:, q] = s * mp + c * mq
                mp = m[p, :].copy()
                mq = m[q, :].copy()
                m[p, :] = c * mp - s * mq
                m[q, :] = s * mp + c * mq
                m[p, q] = m[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        if off_norm(m) > threshold:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")

    values = np.diag(m).copy()
    order = np.argsort(-values, kind="stable")
    return values[order], _canonical_signs(v[:, order])
