"""Small dense complex linear algebra used throughout the simulator.

Everything operates on ``numpy`` ``complex128`` arrays. Matrices in this
project are at most a few hundred on a side, so nothing here tries to exploit
sparsity.
"""

import numpy as np
from scipy.linalg import solve_triangular

# Cholesky pivots at or below this fraction of the largest diagonal entry of
# the normal matrix are treated as zero.
PIVOT_THRESHOLD = 1e-12


class SingularSystemError(np.linalg.LinAlgError):
    """Raised when the regularized normal equations cannot be solved."""


def as_matrix(a):
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def as_vector(v):
    x = np.asarray(v, dtype=np.complex128)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector contains non-finite entries")
    return x


def matmul(a, b):
    """Complex matrix product with explicit dimension checking."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def hermitian(a):
    """Conjugate transpose."""
    return as_matrix(a).conj().T


def frobenius_norm(a) -> float:
    a = np.asarray(a, dtype=np.complex128)
    return float(np.sqrt(np.sum(a.real**2 + a.imag**2)))


def solve_regularized(m, rhs, sigma2: float):
    """Solve ``(M^H M + sigma2 I) x = M^H rhs``.

    This is the linear MMSE estimate of ``x`` from ``rhs = M x + n`` when
    ``x`` has unit-energy entries and the noise has variance ``sigma2``.

    Parameters
    ----------
    m : (rows, cols) array_like
    rhs : (rows,) array_like
    sigma2 : float
        Non-negative regularization. With ``sigma2 == 0`` this is the
        zero-forcing (least-squares) solution and ``M^H M`` must be
        invertible.

    Returns
    -------
    x : (cols,) ndarray

    Raises
    ------
    SingularSystemError
        If a Cholesky pivot of the normal matrix falls below
        ``PIVOT_THRESHOLD`` relative to its largest diagonal entry.
    """
    m = as_matrix(m)
    rhs = as_vector(rhs)
    if sigma2 < 0:
        raise ValueError("sigma2 must be non-negative")
    if m.shape[0] != rhs.shape[0]:
        raise ValueError(f"rhs length {rhs.shape[0]} does not match {m.shape}")

    mh = m.conj().T
    normal = mh @ m
    normal[np.diag_indices_from(normal)] += sigma2
    b = mh @ rhs

    scale = float(np.max(normal.diagonal().real, initial=0.0))
    if scale <= 0.0:
        raise SingularSystemError("normal matrix is zero")
    try:
        chol = np.linalg.cholesky(normal)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
    if np.min(chol.diagonal().real) ** 2 <= PIVOT_THRESHOLD * scale:
        raise SingularSystemError("regularized normal matrix is numerically singular")

    w = solve_triangular(chol, b, lower=True)
    return solve_triangular(chol.conj().T, w, lower=False)
