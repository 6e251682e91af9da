"""Glued graph surfaces and numerical search for their complex points.

Inside the ball ``|z| < eps`` the surface is
``w = conj(z)^T A(r) z + Re(z^T B(r) z)`` with ``r = (|z|/eps)^(1/n)`` and
``(A(r), B(r))`` running along a homotopy from the normal form (``r = 0``) to
the original pair (``r = 1``); outside it is the original quadric. A point of
a graph ``w = f(z)`` is complex exactly when ``d f / d conj(z) = 0``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .homotopy import HomotopyPath, certify
from .quadric import QuadricPair

__all__ = [
    "GraphSurface",
    "RadialProfile",
    "speed_profile",
    "ComplexPointList",
    "build_isotoped_graph",
    "constant_surface",
    "find_complex_points",
    "realified_matrix",
    "realified_determinant",
    "dbar",
]


# slack factor c in r |d(A, B)/dr| <= c * sigma_min; the radial term stays below
# the linear term of dbar when c < 4n/3
PROFILE_SLACK = 1.0
PROFILE_SAMPLES = 20001


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Monotone map from ``-log r`` to the path parameter.

    ``t(s)`` is the inverse of ``s = C(t) / c`` with
    ``C(t) = int_0^t |(A', B')| / sigma_min``, so the path moves in ``log r``
    at a speed bounded by ``c * sigma_min`` of the realified map.
    """

    cumulative: np.ndarray
    t: np.ndarray
    slack: float

    @property
    def log_range(self):
        return float(self.cumulative[-1] / self.slack)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            s = -np.log(r)
        return np.interp(self.slack * s, self.cumulative, self.t, right=1.0)


def speed_profile(path, n, samples=PROFILE_SAMPLES, slack=None):
    """Build the adaptive radial profile of ``path`` (see ``RadialProfile``)."""
    slack = PROFILE_SLACK * n if slack is None else slack
    t = np.linspace(0.0, 1.0, samples)
    A, B = path.evaluate_many(t)
    dA = np.gradient(A, t, axis=0)
    dB = np.gradient(B, t, axis=0)
    vel = np.sqrt(np.linalg.norm(dA, axis=(1, 2)) ** 2 + np.linalg.norm(dB, axis=(1, 2)) ** 2)
    Ar, Ai, Br, Bi = A.real, A.imag, B.real, B.imag
    M = np.block([[Ar + Br, -Ai - Bi], [Ai - Bi, Ar - Br]])
    sigma = np.linalg.svd(M, compute_uv=False)[:, -1]
    rate = vel / sigma
    # small floor keeps C strictly increasing on constant stretches
    rate = rate + 1e-3 * max(rate.mean(), 1e-3)
    C = np.concatenate([[0.0], np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(t))])
    return RadialProfile(C, t, float(slack))


@dataclass(frozen=True, eq=False)
class GraphSurface:
    """``w = f(z)`` glued from a homotopy inside ``|z| < epsilon``.

    With ``profile=None`` the path parameter is ``1 - r`` (the literal
    substitution); otherwise ``profile(r)`` is used.
    """

    pair: QuadricPair
    epsilon: float
    path: HomotopyPath = None
    profile: RadialProfile = None

    @property
    def n(self):
        return self.pair.n

    def radius_param(self, z):
        z = np.asarray(z, dtype=complex)
        rho = np.linalg.norm(z, axis=-1)
        return np.clip((rho / self.epsilon) ** (1.0 / self.n), 0.0, 1.0)

    def path_param(self, r):
        r = np.asarray(r, dtype=float)
        if self.profile is None:
            return 1.0 - r
        return self.profile(r)

    def pairs_at(self, r):
        """Stacked ``(A(r), B(r))``; ``r = 1`` is the path's source, ``r = 0`` its target."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if self.path is None:
            shape = (r.size, self.n, self.n)
            return np.broadcast_to(self.pair.A, shape), np.broadcast_to(self.pair.B, shape)
        A, B = self.path.evaluate_many(self.path_param(r))
        outside = r >= 1.0
        if np.any(outside):
            A[outside] = self.pair.A
            B[outside] = self.pair.B
        return A, B

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        flat = z.reshape(-1, self.n)
        A, B = self.pairs_at(self.radius_param(flat))
        herm = np.einsum("mi,mij,mj->m", flat.conj(), A, flat)
        sym = np.einsum("mi,mij,mj->m", flat, B, flat)
        return (herm + sym.real).reshape(z.shape[:-1])


def constant_surface(pair, epsilon=1.0):
    """The pure quadric of ``pair`` (no gluing)."""
    if not epsilon > 0:
        raise PreconditionError("epsilon must be positive")
    return GraphSurface(pair, float(epsilon), None)


def build_isotoped_graph(path, epsilon, profile="adaptive"):
    """Glue the homotopy into the ball of radius ``epsilon``.

    ``path`` must run from the pair to be replaced (its source) to a normal
    form, as produced by ``normal_form_path``; it must be certified.
    ``profile="literal"`` uses ``t = 1 - r``; ``"adaptive"`` reparametrizes the
    path by ``speed_profile`` so that the radial derivative of ``(A, B)`` cannot
    create extra complex points.
    """
    if profile not in ("adaptive", "literal"):
        raise PreconditionError(f"unknown profile {profile!r}")
    if not epsilon > 0:
        raise PreconditionError("epsilon must be positive")
    if isinstance(path, QuadricPair):
        return constant_surface(path, epsilon)
    cert = path.certificate if path.certificate is not None else certify(path)
    if not cert.passed:
        raise PreconditionError("path is not certified nondegenerate")
    prof = speed_profile(path, path.source.n) if profile == "adaptive" else None
    return GraphSurface(path.source, float(epsilon), path, prof)


def _steps(z, h_rel):
    return h_rel * (1.0 + np.linalg.norm(z, axis=-1))


def dbar(surface, z, h_rel=1e-5):
    """``d f / d conj(z_j)`` by central differences, batched over rows of ``z``."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    m, n = z.shape
    h = _steps(z, h_rel)[:, None]
    out = np.empty((m, n), dtype=complex)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        dx = (surface(z + h * e) - surface(z - h * e)) / (2 * h[:, 0])
        dy = (surface(z + 1j * h * e) - surface(z - 1j * h * e)) / (2 * h[:, 0])
        out[:, j] = 0.5 * (dx + 1j * dy)
    return out


def _to_real(z):
    return np.concatenate([z.real, z.imag], axis=-1)


def _to_complex(x):
    n = x.shape[-1] // 2
    return x[..., :n] + 1j * x[..., n:]


def _residual_map(surface, x):
    return _to_real(dbar(surface, _to_complex(x)))


def _jacobian(surface, x, g0, h_rel=1e-4):
    # forward differences of the (already FD) residual map
    m, d = x.shape
    J = np.empty((m, d, d))
    h = h_rel * (1.0 + np.linalg.norm(x, axis=-1))
    for k in range(d):
        xk = x.copy()
        xk[:, k] += h
        J[:, :, k] = (_residual_map(surface, xk) - g0) / h[:, None]
    return J


@dataclass(frozen=True)
class ComplexPointList:
    points: list = field(default_factory=list)
    non_isolated: bool = False
    seeds: int = 0

    def __len__(self):
        return len(self.points)

    def within(self, radius):
        return [(z, r) for z, r in self.points if np.linalg.norm(z) <= radius]

    def to_json(self):
        return {
            "non_isolated": self.non_isolated,
            "seeds": self.seeds,
            "roots": [
                {"z": [[float(c.real), float(c.imag)] for c in z], "residual": float(r)} for z, r in self.points
            ],
        }


def _merge(roots, residuals, tol):
    order = np.lexsort(np.round(roots, 9).T[::-1])
    kept = []
    for i in order:
        x = roots[i]
        for k, (y, r) in enumerate(kept):
            if np.linalg.norm(x - y) <= tol:
                if residuals[i] < r:
                    kept[k] = (x, residuals[i])
                break
        else:
            kept.append((x, residuals[i]))
    return kept


def find_complex_points(
    surface,
    radius,
    grid_per_axis=21,
    newton_iters=40,
    newton_tol=1e-8,
    merge_tol=1e-5,
):
    """Zeros of ``dbar(surface)`` in the real ``2n``-cube ``[-radius, radius]^{2n}``.

    Newton (Levenberg-regularized, FD Jacobian) is started from every point of
    a uniform grid; a seed converges when its residual is at most
    ``newton_tol`` and its Newton step at most ``merge_tol / 10``. Seeds that
    leave twice the cube or do not converge are dropped. Converged points are merged within
    ``merge_tol``. More than ``3 * grid_per_axis`` distinct roots is reported
    as a non-isolated zero set.
    """
    if radius > 1.5 * surface.epsilon:
        raise PreconditionError("radius must not exceed 1.5 * epsilon")
    n = surface.n
    d = 2 * n
    axis = np.linspace(-radius, radius, grid_per_axis)
    x = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    seeds = x.shape[0]
    active = np.ones(seeds, dtype=bool)
    done = np.zeros(seeds, dtype=bool)
    res = np.full(seeds, np.inf)
    # a root needs a small residual and a small Newton step: near the origin the
    # residual is already tiny while the iterate is still moving
    xtol = 0.1 * merge_tol
    for _ in range(newton_iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xa = x[idx]
        g = _residual_map(surface, xa)
        res[idx] = np.linalg.norm(g, axis=-1)
        J = _jacobian(surface, xa, g)
        Jt = np.swapaxes(J, -1, -2)
        JtJ = Jt @ J
        mu = 1e-12 * (np.einsum("mii->m", JtJ) + 1e-300)
        step = -np.linalg.solve(JtJ + mu[:, None, None] * np.eye(d), (Jt @ g[..., None]))[..., 0]
        size = np.linalg.norm(step, axis=-1)
        conv = (res[idx] <= newton_tol) & (size <= xtol)
        done[idx[conv]] = True
        active[idx[conv]] = False
        big = size > radius
        step[big] *= (radius / size[big])[:, None]
        xa = np.where(conv[:, None], xa, xa + step)
        x[idx] = xa
        escaped = np.max(np.abs(xa), axis=-1) > 2 * radius
        active[idx[escaped]] = False
    inside = done & (np.max(np.abs(x), axis=-1) <= radius * (1 + 1e-9))
    kept = _merge(x[inside], res[inside], merge_tol)
    points = [(_to_complex(xr), float(r)) for xr, r in kept]
    return ComplexPointList(points, len(points) > 3 * grid_per_axis, seeds)


def realified_matrix(pair):
    """Real ``2n x 2n`` matrix of ``z -> A z + conj(B) conj(z)`` in coordinates ``(Re z, Im z)``."""
    Ar, Ai = pair.A.real, pair.A.imag
    Br, Bi = pair.B.real, pair.B.imag
    return np.block([[Ar + Br, -Ai - Bi], [Ai - Bi, Ar - Br]])


def realified_determinant(pair):
    """Determinant of the linearized complex-point equation of the quadric.

    In the basis ``(z, conj(z))`` the real map becomes the block matrix
    ``[[A, conj(B)], [B, conj(A)]]``, so the two determinants agree exactly.
    """
    return float(np.linalg.det(realified_matrix(pair)))
