"""Quadric pairs ``(A, B)`` and their elliptic/hyperbolic classification.

A pair encodes the quadratic part of a complex point
``w = conj(z)^T A z + Re(z^T B z)``. Its type is the sign of the real
determinant of ``[[A, conj(B)], [B, conj(A)]]``.
"""

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .cmatrix import (
    as_square,
    hadamard_bound,
    matrix_from_json,
    matrix_to_json,
    random_cmatrix,
)
from .errors import (
    DimensionError,
    IllPosedCountError,
    InternalConsistencyError,
    InvalidGroupElementError,
    SamplingError,
)

__all__ = [
    "PointType",
    "PointClass",
    "QuadricPair",
    "GElement",
    "block_matrix",
    "block_determinants",
    "classification_determinant",
    "classify",
    "g_act",
    "direct_sum",
    "lai_count",
    "random_pair",
    "DEGENERATE_TOL",
]

# sigma_min <= DEGENERATE_TOL * sigma_max of the block matrix counts as degenerate
DEGENERATE_TOL = 1e-9
SYMMETRY_TOL = 1e-10


class PointType(str, enum.Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class PointClass:
    tag: PointType
    det: float
    band: float = 0.0

    def to_json(self):
        return {"class": self.tag.value, "det": float(self.det)}


def _freeze(a):
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QuadricPair:
    """The pair ``(A, B)``; ``B`` is replaced by its symmetric part on construction."""

    A: np.ndarray
    B: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        A = as_square(self.A, "A")
        B = as_square(self.B, "B")
        if A.shape != B.shape:
            raise DimensionError(f"A is {A.shape} but B is {B.shape}")
        asym = np.linalg.norm(B - B.T)
        if asym > SYMMETRY_TOL * max(1.0, np.linalg.norm(B)):
            warnings.warn(
                f"B is not symmetric (||B - B^T|| = {asym:.3g}); using (B + B^T)/2",
                stacklevel=3,
            )
        object.__setattr__(self, "A", _freeze(A))
        object.__setattr__(self, "B", _freeze((B + B.T) / 2))
        object.__setattr__(self, "n", A.shape[0])

    def __iter__(self):
        yield self.A
        yield self.B

    def __repr__(self):
        return f"QuadricPair(n={self.n}, A={self.A.tolist()}, B={self.B.tolist()})"

    def distance(self, other):
        """Frobenius distance between pairs of equal size."""
        return float(np.hypot(np.linalg.norm(self.A - other.A), np.linalg.norm(self.B - other.B)))

    def allclose(self, other, atol=1e-10):
        return self.n == other.n and self.distance(other) <= atol

    def to_json(self):
        return {"n": self.n, "A": matrix_to_json(self.A), "B": matrix_to_json(self.B)}

    @classmethod
    def from_json(cls, obj):
        A = matrix_from_json(obj["A"], "A")
        B = matrix_from_json(obj["B"], "B")
        if "n" in obj and int(obj["n"]) != A.shape[0]:
            raise DimensionError(f"declared n={obj['n']} but A is {A.shape}")
        return cls(A, B)


@dataclass(frozen=True, eq=False)
class GElement:
    """Element ``(zeta, P)`` of ``S^1 x GL(n, C) / Z_2``."""

    zeta: complex
    P: np.ndarray

    def __post_init__(self):
        zeta = complex(self.zeta)
        if abs(abs(zeta) - 1.0) > 1e-10:
            raise InvalidGroupElementError(f"|zeta| = {abs(zeta)} is not 1")
        P = as_square(self.P, "P")
        d = abs(np.linalg.det(P))
        if not d > 1e-12 * hadamard_bound(P):
            raise InvalidGroupElementError("P is singular")
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "P", _freeze(P))


def block_matrix(A, B):
    """``[[A, conj(B)], [B, conj(A)]]``; works on stacks of shape ``(..., n, n)``."""
    A = np.asarray(A)
    B = np.asarray(B)
    top = np.concatenate([A, B.conj()], axis=-1)
    bottom = np.concatenate([B, A.conj()], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def block_determinants(A, B):
    """Real parts of the block determinants and their Hadamard bounds, stacked."""
    M = block_matrix(A, B)
    d = np.linalg.det(M)
    return d.real, d.imag, hadamard_bound(M)


def classification_determinant(pair, tol=1e-9):
    """Real determinant of the block matrix of ``pair``.

    The value is real because swapping the block rows and columns maps the
    block matrix to its conjugate; an imaginary part above
    ``tol * (1 + |Re|)`` relative to the Hadamard scale signals a numerical
    breakdown.
    """
    re, im, h = block_determinants(pair.A, pair.B)
    re, im, h = float(re), float(im), float(h)
    if abs(im) > tol * (1.0 + abs(re)) and abs(im) > 1e-13 * h:
        raise InternalConsistencyError(
            f"block determinant has imaginary part {im:.3g} (real part {re:.3g})",
            residual=abs(im),
        )
    return re


def classify(pair, tol=DEGENERATE_TOL):
    """Elliptic / hyperbolic / degenerate by the sign of the block determinant.

    The pair is degenerate when the block matrix has ``sigma_min <= tol * sigma_max``,
    i.e. when the sign of its determinant is not numerically meaningful. The
    band is scale free and moves only by the conditioning of ``P`` under
    ``g_act``. ``band`` reports the equivalent determinant threshold.
    """
    d = classification_determinant(pair)
    s = np.linalg.svd(block_matrix(pair.A, pair.B), compute_uv=False)
    smax, smin = float(s[0]), float(s[-1])
    band = abs(d) * tol * smax / smin if smin > 0 else float("inf")
    if smin <= tol * smax or smax == 0:
        tag = PointType.DEGENERATE
    elif d > 0:
        tag = PointType.ELLIPTIC
    else:
        tag = PointType.HYPERBOLIC
    return PointClass(tag, d, band)


def g_act(g, pair):
    """``(zeta, P) . (A, B) = (zeta P^* A P, conj(zeta) P^T B P)``."""
    P = g.P
    if P.shape[0] != pair.n:
        raise DimensionError(f"P is {P.shape} but pair has n={pair.n}")
    A = g.zeta * (P.conj().T @ pair.A @ P)
    B = np.conj(g.zeta) * (P.T @ pair.B @ P)
    return QuadricPair(A, B)


def direct_sum(*pairs):
    if not pairs:
        raise DimensionError("direct_sum needs at least one pair")
    return QuadricPair(block_diag(*(p.A for p in pairs)), block_diag(*(p.B for p in pairs)))


def lai_count(points):
    """Elliptic minus hyperbolic count."""
    e = h = 0
    for p in points:
        tag = p.tag if isinstance(p, PointClass) else PointType(p)
        if tag is PointType.ELLIPTIC:
            e += 1
        elif tag is PointType.HYPERBOLIC:
            h += 1
        else:
            raise IllPosedCountError("index count is undefined with a degenerate point present")
    return e - h


def random_pair(n, seed, want=None, radius=1.0, max_draws=1000):
    """Seeded random pair with entries in the disc; optionally rejection-sampled to a type."""
    if n < 1:
        raise DimensionError("n must be >= 1")
    if want is not None:
        want = PointType(want)
    rng = np.random.default_rng(seed)
    for _ in range(max_draws):
        A = random_cmatrix(rng, (n, n), radius)
        B = random_cmatrix(rng, (n, n), radius)
        pair = QuadricPair(A, (B + B.T) / 2)
        if want is None or classify(pair).tag is want:
            return pair
    raise SamplingError(f"no {want.value} pair of size {n} in {max_draws} draws")
