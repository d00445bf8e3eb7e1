"""Dense linear algebra kernels sized for desk-scale problems.

Matrices are plain 2-D ``numpy.ndarray`` objects of dtype float64. Every
public function validates its input through :func:`as_matrix`, so 1-D
vectors are accepted and promoted to a single column.
"""

from dataclasses import dataclass

import numpy as np

from .constants import TOL
from .errors import (
    AsymmetryError,
    DimensionError,
    NonConvergenceError,
    RankDeficiencyError,
)


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite, non-empty 2-D float64 array.

    A 1-D input is treated as a column vector.
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got {arr.ndim} dimensions")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must have at least one row and column, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    return arr


@dataclass(frozen=True)
class QrFactorization:
    """Thin QR factors ``a = q @ r`` with the detected numerical rank."""

    q: np.ndarray
    r: np.ndarray
    rank: int


def qr_decompose(a):
    """Thin Householder QR factorization.

    Parameters
    ----------
    a : array_like, shape (m, n)
        Input with ``m >= n``.

    Returns
    -------
    QrFactorization
        ``q`` has orthonormal columns, ``r`` is upper triangular with a
        non-negative diagonal. ``rank`` counts the diagonal entries of ``r``
        whose magnitude exceeds ``1e-12`` times the largest one.
    """
    a = as_matrix(a, "a")
    m, n = a.shape
    if m < n:
        raise DimensionError(f"qr_decompose needs rows >= cols, got {m}x{n}")

    r = a.copy()
    reflectors = []
    for k in range(n):
        x = r[k:, k]
        norm_x = np.linalg.norm(x)
        v = x.copy()
        if norm_x == 0.0:
            reflectors.append(None)
            continue
        alpha = -norm_x if x[0] >= 0 else norm_x
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            reflectors.append(None)
            continue
        v /= vnorm
        r[k:, k:] -= 2.0 * np.outer(v, v @ r[k:, k:])
        reflectors.append(v)

    q = np.eye(m, n)
    for k in range(n - 1, -1, -1):
        v = reflectors[k]
        if v is not None:
            q[k:, :] -= 2.0 * np.outer(v, v @ q[k:, :])

    r = np.triu(r[:n, :])
    # flip signs so the diagonal of r is non-negative
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    r = signs[:, None] * r
    q = q * signs[None, :]

    diag = np.abs(np.diag(r))
    lead = diag.max() if diag.size else 0.0
    rank = int(np.count_nonzero(diag > TOL.qr_rank_relative * lead)) if lead > 0 else 0
    return QrFactorization(q=q, r=r, rank=rank)


def _back_substitute(r, b):
    n = r.shape[0]
    x = np.zeros((n, b.shape[1]))
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - r[i, i + 1:] @ x[i + 1:]) / r[i, i]
    return x


def least_squares(a, b):
    """Solve ``min ||a x - b||_F`` column by column.

    Raises
    ------
    RankDeficiencyError
        If ``a`` does not have full column rank, which for a dictionary
        means duplicated or collinear atoms were selected together.
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[0] != b.shape[0]:
        raise DimensionError(
            f"row mismatch: a is {a.shape[0]}x{a.shape[1]}, b is {b.shape[0]}x{b.shape[1]}"
        )
    if a.shape[0] < a.shape[1]:
        raise RankDeficiencyError(
            f"a is {a.shape[0]}x{a.shape[1]}; more columns than rows cannot be full rank",
            rank=a.shape[0], cols=a.shape[1],
        )
    fac = qr_decompose(a)
    if fac.rank < a.shape[1]:
        raise RankDeficiencyError(
            f"matrix has numerical rank {fac.rank} < {a.shape[1]} columns",
            rank=fac.rank, cols=a.shape[1],
        )
    return _back_substitute(fac.r, fac.q.T @ b)


def project_onto_span(basis, y):
    """Orthogonal projection of the columns of ``y`` onto ``span(basis)``."""
    basis = as_matrix(basis, "basis")
    y = as_matrix(y, "y")
    return basis @ least_squares(basis, y)


def symmetric_eigen_extremes(g):
    """Smallest and largest eigenvalue of a symmetric matrix.

    Uses cyclic Jacobi rotations until every off-diagonal entry is at most
    ``1e-12 * ||g||_F``, giving up after 100 sweeps.

    Returns
    -------
    tuple of float
        ``(min_eig, max_eig)``.
    """
    g = as_matrix(g, "g")
    n, n2 = g.shape
    if n != n2:
        raise DimensionError(f"g must be square, got {n}x{n2}")
    fro = np.linalg.norm(g)
    if np.max(np.abs(g - g.T), initial=0.0) > TOL.symmetry_relative * max(fro, 1.0):
        raise AsymmetryError("g is not symmetric")

    a = 0.5 * (g + g.T)
    threshold = TOL.jacobi_offdiag_relative * fro
    for _ in range(TOL.jacobi_max_sweeps + 1):
        off = np.abs(a - np.diag(np.diag(a)))
        if off.max(initial=0.0) <= threshold:
            eig = np.diag(a)
            return float(eig.min()), float(eig.max())
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
    raise NonConvergenceError(f"Jacobi did not converge in {TOL.jacobi_max_sweeps} sweeps")


def spectral_norm(m):
    """Largest singular value, from the extreme eigenvalue of the smaller Gram matrix."""
    m = as_matrix(m, "m")
    gram = m.T @ m if m.shape[1] <= m.shape[0] else m @ m.T
    _, top = symmetric_eigen_extremes(gram)
    return float(np.sqrt(max(top, 0.0)))


def inf_induced_norm(m):
    """The l-infinity induced norm, i.e. the maximum absolute row sum."""
    m = as_matrix(m, "m")
    return float(np.abs(m).sum(axis=1).max())
