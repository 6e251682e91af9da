"""Complex Hessians (Levi forms) of the model neighborhood functions.

Coordinates on ``C^{n+1}`` are ``zeta = (z_1, ..., z_n, w)``. The Levi form of
a real function ``f`` is ``L(V) = sum_jk H_jk V_j conj(V_k)`` with
``H_jk = d^2 f / d zeta_j d conj(zeta_k)``. Two model fields are provided:

* ``AllSquares``: ``f = (1 + |z|^2) |w - sum conj(z_k)^2 / 2|^2``
* ``MixedModulus``: ``f = (1 + |z'|^2) |w - |z_1|^2 - sum_{k>=2} conj(z_k)^2 / 2|^2``

Their Levi forms are also available in closed form and ``levi_value``
cross-checks the finite-difference value against it.
"""

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import null_space, orth

from .errors import DimensionError, InternalConsistencyError, PreconditionError

__all__ = [
    "ModelKind",
    "ScalarField",
    "LeviReport",
    "RestrictedLevi",
    "model_field",
    "scalar_field",
    "complex_hessian",
    "levi_value",
    "levi_closed_form",
    "all_squares_lower_bound",
    "pseudoconvexity_report",
    "restricted_levi_check",
    "MIXED_RADIUS",
    "ALL_SQUARES_RADIUS_SQ",
]

# sampling neighbourhoods of the origin used by the checks
ALL_SQUARES_RADIUS_SQ = 0.49
MIXED_RADIUS = 0.3

FD_STEP = 1e-4
CLOSED_FORM_RTOL = 1e-6


class ModelKind(str, enum.Enum):
    ALL_SQUARES = "AllSquares"
    MIXED_MODULUS = "MixedModulus"


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real function of ``zeta = (z, w)``; ``func`` is vectorized over leading axes.

    Model fields also carry ``psi`` (the defining function of ``Y``) and
    ``graph`` (``w = graph(z)`` on ``Y``).
    """

    n: int
    func: Callable
    kind: ModelKind = None
    psi: Callable = None
    graph: Callable = None

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        if zeta.shape[-1] != self.n + 1:
            raise DimensionError(f"expected points in C^{self.n + 1}, got shape {zeta.shape}")
        return self.func(zeta)

    def eval(self, z, w):
        z = np.asarray(z, dtype=complex)
        return self(np.concatenate([z, np.asarray(w, dtype=complex)[..., None]], axis=-1))


def scalar_field(n, func):
    """Wrap an arbitrary real function of ``zeta in C^{n+1}``."""
    return ScalarField(int(n), func)


def model_field(kind, n):
    kind = ModelKind(kind)
    if n < 1:
        raise DimensionError("n must be >= 1")

    if kind is ModelKind.ALL_SQUARES:

        def graph(z):
            return 0.5 * np.sum(np.conj(z) ** 2, axis=-1)

        def weight(z):
            return 1.0 + np.sum(np.abs(z) ** 2, axis=-1)

    else:

        def graph(z):
            return np.abs(z[..., 0]) ** 2 + 0.5 * np.sum(np.conj(z[..., 1:]) ** 2, axis=-1)

        def weight(z):
            return 1.0 + np.sum(np.abs(z[..., 1:]) ** 2, axis=-1)

    def psi(zeta):
        return zeta[..., -1] - graph(zeta[..., :-1])

    def func(zeta):
        return weight(zeta[..., :-1]) * np.abs(psi(zeta)) ** 2

    return ScalarField(n, func, kind, psi, graph)


def _real(zeta):
    return np.concatenate([zeta.real, zeta.imag], axis=-1)


def _hessian_real(field, x, h):
    # central second differences of f over real coordinates, batched over rows of x
    m, D = x.shape
    N = D // 2
    iu, ju = np.triu_indices(D, 1)
    E = np.eye(D)
    shifts = [np.zeros(D)]
    shifts += [s * E[a] for a in range(D) for s in (1.0, -1.0)]
    for a, b in zip(iu, ju):
        shifts += [E[a] + E[b], E[a] - E[b], -E[a] + E[b], -E[a] - E[b]]
    shifts = np.array(shifts)
    pts = x[:, None, :] + h[:, None, None] * shifts[None]
    f = field(pts[..., :N] + 1j * pts[..., N:]).real
    R = np.empty((m, D, D))
    h2 = h**2
    for a in range(D):
        R[:, a, a] = (f[:, 1 + 2 * a] - 2 * f[:, 0] + f[:, 2 + 2 * a]) / h2
    off = f[:, 1 + 2 * D :].reshape(m, -1, 4)
    vals = (off[..., 0] - off[..., 1] - off[..., 2] + off[..., 3]) / (4 * h2[:, None])
    R[:, iu, ju] = vals
    R[:, ju, iu] = vals
    return R


def complex_hessian(field, p, h=None):
    """``H_jk = d^2 f / d zeta_j d conj(zeta_k)`` by finite differences.

    Central differences over the ``2(n+1)`` real coordinates with step
    ``h = 1e-4 (1 + |p|)`` and one Richardson step (``h``, ``h/2``). ``p`` may
    be a single point or a stack of shape ``(m, n+1)``; the result is
    Hermitian-symmetrized.
    """
    p = np.asarray(p, dtype=complex)
    single = p.ndim == 1
    P = np.atleast_2d(p)
    if P.shape[-1] != field.n + 1:
        raise DimensionError(f"expected points in C^{field.n + 1}, got shape {p.shape}")
    x = _real(P)
    if h is None:
        h = FD_STEP * (1.0 + np.linalg.norm(P, axis=-1))
    else:
        if not np.all(np.asarray(h) > 0):
            raise PreconditionError("h must be positive")
        h = np.broadcast_to(np.asarray(h, dtype=float), (P.shape[0],))
    R = (4 * _hessian_real(field, x, h / 2) - _hessian_real(field, x, h)) / 3
    N = field.n + 1
    Rxx, Rxy = R[:, :N, :N], R[:, :N, N:]
    Ryx, Ryy = R[:, N:, :N], R[:, N:, N:]
    H = 0.25 * (Rxx + Ryy) + 0.25j * (Rxy - Ryx)
    H = 0.5 * (H + np.conj(np.swapaxes(H, -1, -2)))
    return H[0] if single else H


def _form(H, V):
    return np.einsum("...j,...jk,...k->...", V, H, np.conj(V)).real


def levi_closed_form(kind, p, V):
    """Exact Levi form of a model field at ``p`` on ``V = (Z, W)``; batched."""
    kind = ModelKind(kind)
    p = np.asarray(p, dtype=complex)
    V = np.asarray(V, dtype=complex)
    z, w = p[..., :-1], p[..., -1]
    Z, W = V[..., :-1], V[..., -1]
    if kind is ModelKind.ALL_SQUARES:
        u = 1 + np.sum(np.abs(z) ** 2, axis=-1)
        psi = w - 0.5 * np.sum(np.conj(z) ** 2, axis=-1)
        zZ = np.sum(z * Z, axis=-1)
        zZb = np.sum(z * np.conj(Z), axis=-1)
        zbZ = np.conj(zZb)
        return (
            u * (np.abs(W) ** 2 + np.abs(zZ) ** 2)
            + np.abs(psi) ** 2 * np.sum(np.abs(Z) ** 2, axis=-1)
            - 2 * np.real(psi * zZ * zZb)
            + 2 * np.real(psi * np.conj(W) * zbZ)
        )
    z1, zp = z[..., 0], z[..., 1:]
    Z1, Zp = Z[..., 0], Z[..., 1:]
    u = 1 + np.sum(np.abs(zp) ** 2, axis=-1)
    psi = w - np.abs(z1) ** 2 - 0.5 * np.sum(np.conj(zp) ** 2, axis=-1)
    a = np.conj(z1) * Z1
    zpZp = np.sum(zp * Zp, axis=-1)
    zpbZp = np.sum(np.conj(zp) * Zp, axis=-1)
    inner = (
        np.abs(W - a) ** 2 + np.abs(a + zpZp) ** 2 - 2 * np.real(psi) * np.abs(Z1) ** 2
    )
    dbar_g = np.conj(psi) * (-np.conj(a) - np.conj(zpZp)) + psi * (np.conj(W) - np.conj(a))
    return u * inner + np.abs(psi) ** 2 * np.sum(np.abs(Zp) ** 2, axis=-1) + 2 * np.real(zpbZp * dbar_g)


def all_squares_lower_bound(p, V):
    """Three-square lower bound for the AllSquares Levi form, valid for ``|z|^2 < 1/2``.

    With ``|Z| = 1``, ``z.Z = alpha |z|`` and ``z.conj(Z) = beta |z|`` the form
    is at least ``(|W| - |psi||z||beta|)^2 + |z|^2 (|alpha| - |psi||beta|)^2
    + |psi|^2 (1 - 2 |beta|^2 |z|^2)``; general ``V`` is handled by scaling.
    """
    p = np.asarray(p, dtype=complex)
    V = np.asarray(V, dtype=complex)
    z, w = p[..., :-1], p[..., -1]
    Z, W = V[..., :-1], V[..., -1]
    psi = np.abs(w - 0.5 * np.sum(np.conj(z) ** 2, axis=-1))
    s = np.linalg.norm(Z, axis=-1)
    r = np.linalg.norm(z, axis=-1)
    safe_s = np.where(s > 0, s, 1.0)
    safe_r = np.where(r > 0, r, 1.0)
    Zn = Z / safe_s[..., None]
    Wn = np.abs(W) / safe_s
    alpha = np.abs(np.sum(z * Zn, axis=-1)) / safe_r
    beta = np.abs(np.sum(z * np.conj(Zn), axis=-1)) / safe_r
    bound = (
        (Wn - psi * r * beta) ** 2
        + r**2 * (alpha - psi * beta) ** 2
        + psi**2 * (1 - 2 * beta**2 * r**2)
    )
    return np.where(s > 0, s**2 * bound, np.abs(W) ** 2)


def levi_value(field, p, V, h=None, check=True):
    """``L(V) = V^T H conj(V)`` from the FD Hessian; batched over ``p``, ``V``.

    For model fields the value is compared with ``levi_closed_form`` and an
    ``InternalConsistencyError`` is raised when they differ by more than
    ``1e-6 * |V|^2 * (1 + ||H||)``.
    """
    p = np.asarray(p, dtype=complex)
    V = np.asarray(V, dtype=complex)
    H = complex_hessian(field, p, h)
    val = _form(H, V)
    if check and field.kind is not None:
        exact = levi_closed_form(field.kind, p, V)
        scale = np.sum(np.abs(V) ** 2, axis=-1) * (1 + np.linalg.norm(H, axis=(-2, -1)))
        err = np.abs(val - exact)
        if np.any(err > CLOSED_FORM_RTOL * scale):
            worst = float(np.max(err / scale))
            raise InternalConsistencyError(
                f"FD and closed-form Levi values disagree (relative {worst:.3g})", residual=worst
            )
    return val if val.ndim else float(val)


@dataclass(frozen=True)
class LeviReport:
    point: np.ndarray
    num_positive: int
    num_negative: int
    num_zero: int
    min_eigenvalue: float
    on_y: bool
    eigenvalues: np.ndarray = None

    def to_json(self):
        return {
            "point": [[float(c.real), float(c.imag)] for c in self.point],
            "numPositive": self.num_positive,
            "numNegative": self.num_negative,
            "numZero": self.num_zero,
            "minEigenvalue": float(self.min_eigenvalue),
            "onY": self.on_y,
        }


def pseudoconvexity_report(field, p, tol=1e-6, H=None):
    """Eigenvalue sign counts of the Levi form at ``p``.

    Eigenvalues with ``|lambda| <= tol * (||H|| + 1)`` count as zero; ``on_y``
    is ``|psi(p)| <= tol`` (model fields only).
    """
    p = np.asarray(p, dtype=complex)
    if H is None:
        H = complex_hessian(field, p)
    lam = np.linalg.eigvalsh(H)
    band = tol * (np.linalg.norm(H, 2) + 1)
    on_y = bool(field.psi is not None and abs(field.psi(p)) <= tol)
    return LeviReport(
        p.copy(),
        int(np.sum(lam > band)),
        int(np.sum(lam < -band)),
        int(np.sum(np.abs(lam) <= band)),
        float(lam[0]),
        on_y,
        lam,
    )


@dataclass(frozen=True)
class RestrictedLevi:
    """Levi form on a real complement of ``T^C_p Y`` in ``T_p Y``.

    ``value`` is the minimum of the form over unit vectors of the complement
    (its smallest eigenvalue); ``vector`` attains it. ``vacuous`` marks a
    complex point, where the quotient is zero.
    """

    value: float
    vector: np.ndarray
    complex_dim: int
    vacuous: bool

    def to_json(self):
        return {
            "value": None if self.vacuous else float(self.value),
            "vacuous": self.vacuous,
            "complexTangentDim": self.complex_dim,
        }


def _graph_tangent(graph, z, h):
    # real basis of T Y for the graph w = graph(z), as vectors in R^{2(n+1)}
    n = z.size
    cols = []
    for k in range(n):
        for unit in (1.0, 1j):
            Z = np.zeros(n, dtype=complex)
            Z[k] = unit
            dw = (graph(z + h * Z) - graph(z - h * Z)) / (2 * h)
            V = np.concatenate([Z, [complex(dw)]])
            cols.append(_real(V))
    return np.array(cols).T


def restricted_levi_check(field, p, surface=None, tol=1e-8, rank_tol=1e-6):
    """Levi form of ``field`` on ``T_p Y / T^C_p Y`` at a point of ``Y``.

    ``Y`` is the graph ``w = g(z)`` with ``g = surface`` if given, else the
    field's own ``graph``. ``T^C = T cap iT`` is computed in real coordinates;
    the form is minimized over the orthogonal complement of ``T^C`` in ``T``.
    """
    p = np.asarray(p, dtype=complex)
    n = field.n
    if p.shape != (n + 1,):
        raise DimensionError(f"expected a point in C^{n + 1}")
    graph = surface if surface is not None else field.graph
    if graph is None:
        raise PreconditionError("no graph given for Y")
    z, w = p[:-1], p[-1]
    gz = complex(np.asarray(graph(z)).reshape(()))
    if abs(w - gz) > tol * (1 + np.linalg.norm(p) ** 2):
        raise PreconditionError(f"point is not on Y (|w - g(z)| = {abs(w - gz):.3g})")
    N = n + 1
    T = _graph_tangent(graph, z, 1e-6 * (1 + np.linalg.norm(z)))
    J = np.block([[np.zeros((N, N)), -np.eye(N)], [np.eye(N), np.zeros((N, N))]])
    K = null_space(np.hstack([T, -J @ T]), rcond=rank_tol)
    TC = orth(T @ K[: 2 * n], rcond=rank_tol) if K.size else np.zeros((2 * N, 0))
    cdim = TC.shape[1] // 2
    Q = orth(T)
    if TC.shape[1] >= Q.shape[1]:
        return RestrictedLevi(0.0, np.zeros(N, dtype=complex), cdim, True)
    comp = Q @ null_space(TC.T @ Q, rcond=rank_tol)
    Vs = (comp[:N] + 1j * comp[N:]).T
    H = complex_hessian(field, p)
    G = np.einsum("aj,jk,bk->ab", Vs, H, np.conj(Vs)).real
    G = 0.5 * (G + G.T)
    lam, vec = np.linalg.eigh(G)
    return RestrictedLevi(float(lam[0]), vec[:, 0] @ Vs, cdim, False)
