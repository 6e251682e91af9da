"""Dense complex linear algebra substrate.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; the helpers here
validate shapes, wrap the LAPACK drivers with residual checks, and provide the
JSON encoding used across the package (a complex scalar is ``[re, im]``, a
matrix is a list of rows of scalars).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_cmatrix",
    "as_square",
    "det",
    "eig",
    "svd",
    "solve",
    "hadamard_bound",
    "random_cmatrix",
    "complex_to_json",
    "complex_from_json",
    "matrix_to_json",
    "matrix_from_json",
]


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair; ``bound(scale)`` gives ``abs + rel*scale``."""

    abs: float = 1e-10
    rel: float = 1e-9

    def bound(self, scale=0.0):
        return self.abs + self.rel * scale


DEFAULT_TOL = Tolerance()


def as_cmatrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D complex128 array (copy-free when possible)."""
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def as_square(M, name="matrix"):
    arr = as_cmatrix(M, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def det(M):
    """Determinant by LU with partial pivoting."""
    M = as_square(M)
    return complex(np.linalg.det(M))


def eig(M, tol=DEFAULT_TOL):
    """Eigenpairs of a square matrix.

    Returns ``(values, vectors)`` with unit-norm eigenvectors as columns. Every
    pair is checked for ``||Mv - lam v|| <= tol.bound(||M||)``.
    """
    M = as_square(M)
    try:
        w, V = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericError(f"eigenvalue iteration failed: {exc}") from exc
    scale = np.linalg.norm(M, 2)
    res = np.linalg.norm(M @ V - V * w, axis=0)
    worst = float(res.max()) if res.size else 0.0
    if worst > tol.bound(scale):
        raise NumericError("eigenpair residual too large", residual=worst)
    return w, V


def svd(M, tol=DEFAULT_TOL):
    """``M = W @ diag(s) @ Vh`` with ``s`` non-increasing.

    Returns ``(W, s, V)`` where ``V = Vh^*`` so that ``M = W diag(s) V^*``.
    """
    M = as_cmatrix(M)
    try:
        W, s, Vh = np.linalg.svd(M)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericError(f"SVD did not converge: {exc}") from exc
    k = s.size
    recon = (W[:, :k] * s) @ Vh[:k, :]
    scale = s[0] if k else 0.0
    err = float(np.linalg.norm(recon - M, 2))
    if err > tol.bound(scale):
        raise NumericError("SVD reconstruction residual too large", residual=err)
    return W, s, Vh.conj().T


def solve(M, rhs):
    M = as_square(M)
    return np.linalg.solve(M, rhs)


def hadamard_bound(M):
    """Product of the row norms of ``M`` (stacked over leading axes).

    Upper bound for ``|det M|``; dividing by it gives a scale-free measure of how
    close ``M`` is to singular.
    """
    return np.prod(np.linalg.norm(M, axis=-1), axis=-1)


def random_cmatrix(rng, shape, radius=1.0):
    """Entries uniform in the complex disc of the given radius."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, size=shape))
    phi = rng.uniform(0.0, 2 * np.pi, size=shape)
    return r * np.exp(1j * phi)


# --- JSON codec ----------------------------------------------------------


def complex_to_json(c):
    c = complex(c)
    return [float(c.real), float(c.imag)]


def complex_from_json(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ValueError(f"complex scalar must be [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def matrix_to_json(M):
    M = np.asarray(M, dtype=np.complex128)
    return [[complex_to_json(x) for x in row] for row in M]


def matrix_from_json(rows, name="matrix"):
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValueError(f"{name} must be a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DimensionError(f"{name} rows have unequal lengths")
    return as_cmatrix([[complex_from_json(x) for x in r] for r in rows], name)
