"""Reductions of complex symmetric matrices and the generalized Bishop form."""

from dataclasses import dataclass

import numpy as np

from .cmatrix import as_square, matrix_to_json, svd
from .errors import NumericError, PreconditionError
from .quadric import QuadricPair

__all__ = [
    "TakagiFactorization",
    "BishopForm",
    "takagi_factorize",
    "symmetric_to_identity",
    "bishop_normal_form",
]


@dataclass(frozen=True, eq=False)
class TakagiFactorization:
    U: np.ndarray
    sigma: np.ndarray

    def reconstruct(self):
        return (self.U * self.sigma) @ self.U.T


@dataclass(frozen=True, eq=False)
class BishopForm:
    gammas: np.ndarray
    P: np.ndarray

    def to_json(self):
        return {"gammas": [float(g) for g in self.gammas], "P": matrix_to_json(self.P)}


def _check_symmetric(B, tol):
    asym = np.linalg.norm(B - B.T)
    if asym > tol * max(1.0, np.linalg.norm(B)):
        raise PreconditionError(f"matrix is not symmetric (||B - B^T|| = {asym:.3g})")


def _unitary_sqrt(Q):
    # principal square root of a unitary matrix via its (normal) Schur form
    from scipy.linalg import schur

    T, Z = schur(Q, output="complex")
    d = np.sqrt(np.diag(T))
    return (Z * d) @ Z.conj().T


def takagi_factorize(B, tol=1e-10, cluster_rtol=1e-8):
    """``B = U diag(sigma) U^T`` for complex symmetric ``B``, ``sigma`` non-increasing.

    Starts from the SVD ``B = V S W^*``. Symmetry gives ``conj(W) = V Q`` with
    ``Q`` block-diagonal over clusters of equal singular values, unitary and
    symmetric on each nonzero cluster; ``U = V sqrt(Q)`` then satisfies the
    factorization.
    """
    B = as_square(B, "B")
    _check_symmetric(B, tol)
    n = B.shape[0]
    V, s, W = svd(B)
    if s[0] == 0.0:
        return TakagiFactorization(np.eye(n, dtype=complex), np.zeros(n))
    U = V.copy()
    cut = cluster_rtol * s[0]
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and s[stop - 1] - s[stop] <= cut:
            stop += 1
        if s[start] > cut:
            idx = slice(start, stop)
            Q = V[:, idx].conj().T @ W[:, idx].conj()
            U[:, idx] = V[:, idx] @ _unitary_sqrt(Q)
        start = stop
    fac = TakagiFactorization(U, s)
    err = np.linalg.norm(fac.reconstruct() - B, 2)
    if err > 1e-9 * s[0] + 1e-14:
        raise NumericError("Takagi reconstruction failed", residual=float(err))
    return fac


def symmetric_to_identity(B, tol=1e-12):
    """Return ``S`` with ``S^T B S = I`` for nonsingular complex symmetric ``B``."""
    B = as_square(B, "B")
    fac = takagi_factorize(B)
    if fac.sigma[-1] <= tol * max(1.0, fac.sigma[0]):
        raise PreconditionError("B is singular")
    return fac.U.conj() / np.sqrt(fac.sigma)


def bishop_normal_form(pair, tol=1e-10):
    """Reduce ``(A, B)`` with ``A > 0`` to ``(I, diag(gammas))``, gammas ascending.

    ``A`` is first sent to ``I`` by ``*``-congruence with the inverse Cholesky
    factor; the unitary Takagi factor of the transformed ``B`` then diagonalizes
    it without disturbing ``A = I``.
    """
    A = pair.A
    if np.linalg.norm(A - A.conj().T) > tol * max(1.0, np.linalg.norm(A)):
        raise PreconditionError("A is not Hermitian")
    Ah = (A + A.conj().T) / 2
    lam = np.linalg.eigvalsh(Ah)
    if lam[0] <= tol * max(1.0, lam[-1]):
        raise PreconditionError(
            "A is not positive definite; semidefinite A has no diagonal normal form in general"
        )
    L = np.linalg.cholesky(Ah)
    P1 = np.linalg.inv(L).conj().T
    B1 = P1.T @ pair.B @ P1
    fac = takagi_factorize((B1 + B1.T) / 2)
    order = np.argsort(fac.sigma, kind="stable")
    P = P1 @ fac.U.conj()[:, order]
    return BishopForm(fac.sigma[order].copy(), P)


def bishop_pair(form):
    """The normal-form pair ``(I, diag(gammas))``."""
    n = len(form.gammas)
    return QuadricPair(np.eye(n), np.diag(form.gammas))
