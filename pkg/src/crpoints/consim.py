"""Consimilarity ``A ~ S A conj(S)^{-1}`` in the generic nonsingular regime.

Everything is driven by the spectrum of ``A conj(A)`` (the con-spectrum):
positive eigenvalues give diagonal entries, negative eigenvalues (always of
even multiplicity) and conjugate pairs of nonreal eigenvalues give 2x2 blocks
``[[0, 1], [lam, 0]]``.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag
from scipy.optimize import linear_sum_assignment

from .cmatrix import as_square, complex_to_json, eig, matrix_to_json, random_cmatrix
from .errors import GenericityError, InternalConsistencyError, PreconditionError

__all__ = [
    "ConSpectrum",
    "ConsimForm",
    "JordanBlock",
    "SwapBlock",
    "con_spectrum",
    "structured_perturbation",
    "predicted_product_diagonal",
    "consim_diagonalize",
    "consimilar",
    "canonical_matrix",
    "CLUSTER_TOL",
]

CLUSTER_TOL = 1e-7


@dataclass(frozen=True)
class ConSpectrum:
    """Classified eigenvalues of ``A conj(A)`` as ``(value, multiplicity)`` lists."""

    positives: list
    negatives: list
    complex_pairs: list
    zeros: int = 0
    near_real_axis: bool = False
    pairing_error: float = 0.0

    @property
    def size(self):
        return (
            sum(m for _, m in self.positives)
            + sum(m for _, m in self.negatives)
            + 2 * sum(m for _, m in self.complex_pairs)
            + self.zeros
        )

    def is_generic(self):
        """Simple positive and nonreal eigenvalues, negatives exactly doubled, no zeros."""
        return (
            self.zeros == 0
            and all(m == 1 for _, m in self.positives)
            and all(m == 2 for _, m in self.negatives)
            and all(m == 1 for _, m in self.complex_pairs)
        )


@dataclass(frozen=True, eq=False)
class ConsimForm:
    D: np.ndarray
    lambdas: np.ndarray
    S: np.ndarray
    A: np.ndarray
    perturbation: np.ndarray = None
    residual: float = field(default=0.0)

    @property
    def canonical(self):
        return canonical_matrix(self.D, self.lambdas)

    def to_json(self):
        return {
            "D": [float(d) for d in self.D],
            "lambdas": [complex_to_json(x) for x in self.lambdas],
            "S": matrix_to_json(self.S),
            "perturbation": None if self.perturbation is None else matrix_to_json(self.perturbation),
        }


def canonical_matrix(D, lambdas):
    """``diag(D)`` followed by blocks ``[[0, 1], [lam, 0]]``."""
    blocks = [np.array([[d]], dtype=complex) for d in D]
    blocks += [np.array([[0, 1], [lam, 0]], dtype=complex) for lam in lambdas]
    return block_diag(*blocks) if blocks else np.zeros((0, 0), dtype=complex)


def _cluster(values, tol):
    """Group sorted values whose neighbours lie within ``tol * (1 + |v|)``."""
    groups = []
    for v in sorted(values, key=lambda x: (x.real, x.imag)):
        if groups and abs(v - groups[-1][-1]) <= tol * (1 + abs(v)):
            groups[-1].append(v)
        else:
            groups.append([v])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def con_spectrum(A, tol=CLUSTER_TOL):
    """Eigenvalues of ``A conj(A)`` classified into positive, negative and nonreal pairs.

    An eigenvalue is treated as real when ``|Im| <= tol * (1 + |lam|)``. Real
    eigenvalues within the band of each other are merged into one entry with a
    multiplicity; each nonreal eigenvalue with positive imaginary part is
    matched to a partner below the axis.
    """
    A = as_square(A, "A")
    lam, _ = eig(A @ A.conj())
    band = tol * (1 + np.abs(lam))
    is_real = np.abs(lam.imag) <= band
    near = bool(np.any(is_real & (np.abs(lam.imag) > 0.1 * band)))

    zero_band = tol * max(1.0, float(np.max(np.abs(lam))) if lam.size else 1.0)
    real_vals = lam[is_real].real
    zeros = int(np.sum(np.abs(real_vals) <= zero_band))
    pos = [complex(v) for v in real_vals if v > zero_band]
    neg = [complex(v) for v in real_vals if v < -zero_band]

    upper = lam[~is_real & (lam.imag > 0)]
    lower = lam[~is_real & (lam.imag < 0)]
    if upper.size != lower.size:
        raise InternalConsistencyError("nonreal eigenvalues of A conj(A) do not pair up")
    pairing_error = 0.0
    if upper.size:
        cost = np.abs(upper[:, None] - lower.conj()[None, :])
        r, c = linear_sum_assignment(cost)
        pairing_error = float(cost[r, c].max())
        upper = (upper[r] + lower[c].conj()) / 2

    if near:
        warnings.warn("con-spectrum has eigenvalues close to the real-axis band", stacklevel=2)
    return ConSpectrum(
        positives=[(v.real, m) for v, m in _cluster(pos, tol)],
        negatives=[(v.real, m) for v, m in _cluster(neg, tol)],
        complex_pairs=_cluster(list(upper), tol),
        zeros=zeros,
        near_real_axis=near,
        pairing_error=pairing_error,
    )


# --- structured perturbations ---------------------------------------------


@dataclass(frozen=True)
class JordanBlock:
    """``J_k(mu)``: ``mu`` on the diagonal, ones on the superdiagonal (``mu`` real)."""

    k: int
    mu: float

    @property
    def size(self):
        return self.k

    def matrix(self, eps=None):
        J = np.diag(np.full(self.k, self.mu, dtype=complex)) + np.diag(np.ones(self.k - 1), 1)
        if eps is not None:
            J = J + np.diag(eps)
        return J


@dataclass(frozen=True)
class SwapBlock:
    """``[[0, I_m], [J_m(b), 0]]`` with ``b`` negative or nonreal."""

    m: int
    b: complex

    @property
    def size(self):
        return 2 * self.m

    def matrix(self, delta=None):
        m = self.m
        K = JordanBlock(m, 0.0).matrix() + self.b * np.eye(m)
        if delta is not None:
            K = K + np.diag(delta)
        M = np.zeros((2 * m, 2 * m), dtype=complex)
        M[:m, m:] = np.eye(m)
        M[m:, :m] = K
        return M


def _split_eps(blocks, epsilons):
    eps = np.asarray(epsilons, dtype=float)
    need = sum(b.k if isinstance(b, JordanBlock) else b.m for b in blocks)
    if eps.size != need:
        raise PreconditionError(f"need {need} perturbation values, got {eps.size}")
    if np.unique(eps).size != eps.size:
        raise PreconditionError("perturbation values must be pairwise distinct")
    if np.any(np.abs(eps) > 0.1):
        raise PreconditionError("perturbation values must satisfy |eps| <= 0.1")
    out, i = [], 0
    for b in blocks:
        k = b.k if isinstance(b, JordanBlock) else b.m
        out.append(eps[i : i + k])
        i += k
    return out


def structured_perturbation(blocks, epsilons):
    """Direct sum of the blocks with distinct real shifts added to their diagonals.

    A Jordan block gets ``J_k(mu) + diag(eps)``; a swap block gets
    ``diag(delta)`` added to its lower-left ``J_m(b)``. In both cases the
    product ``M conj(M)`` is upper triangular (see ``predicted_product_diagonal``).
    """
    if isinstance(blocks, (JordanBlock, SwapBlock)):
        blocks = [blocks]
    parts = _split_eps(blocks, epsilons)
    for b in blocks:
        if isinstance(b, JordanBlock) and np.iscomplexobj(b.mu) and np.imag(b.mu) != 0:
            raise PreconditionError("Jordan block eigenvalue must be real")
    mats = [b.matrix(e) for b, e in zip(blocks, parts)]
    return block_diag(*mats)


def predicted_product_diagonal(blocks, epsilons):
    """Diagonal of ``M conj(M)`` for ``M = structured_perturbation(blocks, epsilons)``.

    Jordan block: ``(mu + eps_i)^2``. Swap block ``[[0, I], [K, 0]]``: the
    product is ``diag(conj(K), K)``, so the diagonal lists ``conj(b) + delta_i``
    first and then ``b + delta_i``.
    """
    if isinstance(blocks, (JordanBlock, SwapBlock)):
        blocks = [blocks]
    parts = _split_eps(blocks, epsilons)
    diag = []
    for b, e in zip(blocks, parts):
        if isinstance(b, JordanBlock):
            diag.extend((b.mu + e) ** 2)
        else:
            diag.extend(np.conj(b.b) + e)
            diag.extend(b.b + e)
    return np.array(diag, dtype=complex)


# --- diagonal form -------------------------------------------------------------


def _coneigenvector(A, v, root):
    # A conj(v) = mu v with mu = root^2  =>  w = A conj(v) + root v satisfies A conj(w) = root w
    w1 = A @ v.conj() + root * v
    w2 = A @ (1j * v).conj() + root * (1j * v)
    w = w1 if np.linalg.norm(w1) >= np.linalg.norm(w2) else w2
    return w / np.linalg.norm(w)


def _diagonalize_generic(A, tol):
    M = A @ A.conj()
    lam, V = eig(M)
    n = A.shape[0]
    band = tol * (1 + np.abs(lam))
    real = np.abs(lam.imag) <= band
    cols_D, D = [], []
    blocks = []
    used = np.zeros(n, dtype=bool)

    pos = np.flatnonzero(real & (lam.real > 0))
    for i in pos[np.argsort(lam.real[pos])]:
        root = np.sqrt(lam.real[i])
        D.append(root)
        cols_D.append(_coneigenvector(A, V[:, i], root))
        used[i] = True

    # negative eigenvalues: one block per cluster of two
    neg = np.flatnonzero(real & (lam.real < 0))
    neg = neg[np.argsort(lam.real[neg])]
    for a, b in zip(neg[::2], neg[1::2]):
        value = 0.5 * (lam.real[a] + lam.real[b])
        blocks.append((complex(value), V[:, a]))
        used[a] = used[b] = True

    up = np.flatnonzero(~real & (lam.imag > 0))
    up = up[np.lexsort((lam.imag[up], lam.real[up]))]
    for i in up:
        blocks.append((complex(lam[i]), V[:, i]))

    cols = list(cols_D)
    lambdas = []
    for value, v in blocks:
        t1 = A @ v.conj()
        scale = np.linalg.norm(t1)
        cols.extend([t1 / scale, v / scale])
        lambdas.append(value)
    T = np.column_stack(cols)
    S = np.linalg.inv(T)
    return np.array(D), np.array(lambdas, dtype=complex), S


def consim_diagonalize(A, seed=0, tol=CLUSTER_TOL, max_retries=5, delta=None):
    """Find ``S`` with ``S A conj(S)^{-1} = diag(D) + blocks [[0, 1], [lam, 0]]``.

    Columns of ``T = S^{-1}`` are coneigenvectors: for a positive eigenvalue
    ``mu`` of ``A conj(A)`` with eigenvector ``v``, ``w = A conj(v) + sqrt(mu) v``
    satisfies ``A conj(w) = sqrt(mu) w``; for a negative or nonreal ``lam``, the
    pair ``(A conj(v), v)`` spans a 2x2 block. When the con-spectrum is not
    generic, ``A`` is replaced by ``A + delta * G`` for a seeded random ``G``;
    the shift is returned as ``perturbation``.
    """
    A0 = as_square(A, "A")
    n = A0.shape[0]
    sv = np.linalg.svd(A0, compute_uv=False)
    if sv[-1] <= 1e-12 * max(1.0, sv[0]):
        raise PreconditionError("A is singular")
    rng = np.random.default_rng(seed)
    step = 1e-6 * max(sv[0], 1e-300) if delta is None else delta
    Acur, pert = A0, None
    for attempt in range(max_retries + 1):
        spec = con_spectrum(Acur, tol)
        if spec.is_generic():
            D, lambdas, S = _diagonalize_generic(Acur, tol)
            C = canonical_matrix(D, lambdas)
            if np.linalg.norm(Acur - C) <= 1e-12 * max(1.0, sv[0]):
                S = np.eye(n, dtype=complex)
            got = S @ Acur @ np.linalg.inv(S.conj())
            res = float(np.linalg.norm(got - C))
            return ConsimForm(D, lambdas, S, Acur, pert, res)
        if attempt == max_retries:
            break
        G = random_cmatrix(rng, (n, n))
        pert = step * G if pert is None else pert + step * G
        Acur = A0 + pert
    raise GenericityError(f"con-spectrum still not generic after {max_retries} perturbations")


def consimilar(A, B, tol=CLUSTER_TOL):
    """Whether nonsingular ``A`` and ``B`` are consimilar (generic spectra only)."""
    A = as_square(A, "A")
    B = as_square(B, "B")
    if A.shape != B.shape:
        return False
    for name, X in (("A", A), ("B", B)):
        sv = np.linalg.svd(X, compute_uv=False)
        if sv[-1] <= 1e-12 * max(1.0, sv[0]):
            raise PreconditionError(f"{name} is singular")
        if not con_spectrum(X, tol).is_generic():
            raise GenericityError(f"con-spectrum of {name} is not generic")
    la = np.linalg.eigvals(A @ A.conj())
    lb = np.linalg.eigvals(B @ B.conj())
    cost = np.abs(la[:, None] - lb[None, :])
    r, c = linear_sum_assignment(cost)
    return bool(np.all(cost[r, c] <= tol * (1 + np.abs(la[r]))))
