"""Nondegenerate homotopies of quadric pairs to the two normal forms.

A path is a list of segments, each an explicit closed-form family of pairs
``s -> (A_s, B_s)`` on ``[0, 1]``. Every segment is traversed through the
smoothstep ``3t^2 - 2t^3`` so that concatenations are C^1 and constant to
first order at the joints. Nondegeneracy (the block determinant never
vanishes) is certified by dense sampling of the scale-free determinant
``det / (product of row norms)``.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .canonical import symmetric_to_identity
from .cmatrix import (
    as_square,
    complex_from_json,
    complex_to_json,
    hadamard_bound,
    matrix_from_json,
    matrix_to_json,
    random_cmatrix,
)
from .consim import canonical_matrix, consim_diagonalize
from .errors import (
    CertificationError,
    GenericityError,
    PathConstructionError,
    PreconditionError,
)
from .quadric import PointType, QuadricPair, block_matrix, classify, direct_sum

__all__ = [
    "SegmentKind",
    "HomotopySegment",
    "HomotopyPath",
    "Certificate",
    "GLPath",
    "smoothstep",
    "gl_path",
    "normalize_B",
    "conjugation_segment",
    "block_segment",
    "linear_segment",
    "normal_form",
    "normal_form_path",
    "connecting_path",
    "certify",
    "certify_segment",
    "DEFAULT_SAMPLES",
    "CERT_TOL",
]

DEFAULT_SAMPLES = 2001
CERT_TOL = 1e-8
GL_CANDIDATES = 64


def smoothstep(t):
    t = np.asarray(t, dtype=float)
    return t * t * (3.0 - 2.0 * t)


class SegmentKind(str, enum.Enum):
    LINEAR = "Linear"
    GL_CONJUGATION = "GLConjugation"
    B_NORMALIZE = "BNormalize"
    BLOCK_COMPLEX = "BlockComplex"
    BLOCK_LARGE_D = "BlockLargeD"
    BLOCK_SMALL_PAIR = "BlockSmallPair"
    BLOCK_LEFTOVER = "BlockLeftover"
    PHASE_ROTATION = "PhaseRotation"
    CONGRUENCE_PATH = "CongruencePath"


# --- paths in GL(n, C) ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GLPath:
    """``I -> e^{i theta} I`` along the circle, then the segment to ``S``."""

    S: np.ndarray
    theta: float

    def phase(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        n = self.S.shape[0]
        return np.exp(1j * self.theta * s)[:, None, None] * np.eye(n)

    def linear(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))[:, None, None]
        n = self.S.shape[0]
        return (1 - s) * np.exp(1j * self.theta) * np.eye(n) + s * self.S

    def __call__(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((t.size,) + self.S.shape, dtype=complex)
        first = t <= 0.5
        out[first] = self.phase(2 * t[first])
        out[~first] = self.linear(2 * t[~first] - 1)
        return out


def _scale_free_det(M):
    h = hadamard_bound(M)
    return np.abs(np.linalg.det(M)) / np.where(h > 0, h, 1.0)


def gl_path(S, seed=0, samples=DEFAULT_SAMPLES):
    """Path from ``I`` to invertible ``S`` in ``GL(n, C)``.

    The straight segment ``(1-s) e^{i theta} I + s S`` is singular exactly when
    some eigenvalue of ``S`` lies on the ray ``-e^{i theta} (0, inf)``. Tried in
    order: ``theta = 0``, the centre of the widest angular gap between those
    forbidden directions, then seeded random angles; the first whose sampled
    scale-free determinant stays above a margin is kept.
    """
    S = as_square(S, "S")
    n = S.shape[0]
    ratio = float(_scale_free_det(S))
    if not ratio > 1e-12:
        raise PreconditionError("S is singular")
    margin = 1e-2 * min(1.0, ratio)

    forbidden = np.sort(np.mod(np.angle(np.linalg.eigvals(S)) - np.pi, 2 * np.pi))
    gaps = np.diff(np.concatenate([forbidden, forbidden[:1] + 2 * np.pi]))
    k = int(np.argmax(gaps))
    theta_gap = float(np.angle(np.exp(1j * (forbidden[k] + gaps[k] / 2))))

    rng = np.random.default_rng(seed)
    candidates = [0.0, theta_gap] + list(rng.uniform(-np.pi, np.pi, GL_CANDIDATES - 2))
    s = np.linspace(0.0, 1.0, samples)
    for theta in candidates:
        path = GLPath(S, float(theta))
        if float(_scale_free_det(path.linear(s)).min()) > margin:
            return path
    raise PathConstructionError(f"no admissible angle among {GL_CANDIDATES} candidates for a {n}x{n} path")


# --- segment families -----------------------------------------------------------------


def _stack(M, m):
    return np.broadcast_to(M, (m,) + M.shape).copy()


def _raw_linear(p, s):
    s = s[:, None, None]
    A = (1 - s) * p["A0"] + s * p["A1"]
    B = (1 - s) * p["B0"] + s * p["B1"]
    return A, B


def _raw_b_normalize(p, s):
    g = GLPath(p["S"], p["theta"])
    P = g.phase(s) if p["piece"] == "phase" else g.linear(s)
    Ph = np.conj(np.swapaxes(P, -1, -2))
    Pt = np.swapaxes(P, -1, -2)
    return Ph @ p["A"] @ P, Pt @ p["B"] @ P


def _raw_gl_conjugation(p, s):
    g = GLPath(p["S"], p["theta"])
    St = g.phase(s) if p["piece"] == "phase" else g.linear(s)
    X = St @ p["A"]
    # X conj(S_t)^{-1} = (conj(S_t)^{-T} X^T)^T
    A = np.swapaxes(np.linalg.solve(np.swapaxes(St.conj(), -1, -2), np.swapaxes(X, -1, -2)), -1, -2)
    n = p["A"].shape[0]
    return A, _stack(np.eye(n, dtype=complex), s.size)


def _arc(b, s):
    """Modulus-argument interpolation from ``b`` to ``-1`` with argument kept in (0, 2 pi)."""
    arg = np.angle(b)
    if arg <= 0:
        arg += 2 * np.pi
    return np.abs(b) ** (1 - s) * np.exp(1j * ((1 - s) * arg + s * np.pi))


def _block_complex(p, s):
    m = s.size
    A = np.zeros((m, 2, 2), dtype=complex)
    A[:, 0, 1] = 1
    A[:, 1, 0] = _arc(p["b"], s)
    B = (1 - s)[:, None, None] * np.eye(2)
    return A, B


def _phase_rotation(p, s):
    m = s.size
    A = np.zeros((m, 2, 2), dtype=complex)
    rot = np.exp(1j * (1 - s) * np.pi)
    if p["stage"] == "swap":
        A[:, 0, 1] = 1
        A[:, 1, 0] = rot
    else:
        A[:, 0, 0] = 1
        A[:, 1, 1] = rot
    return A, np.zeros((m, 2, 2), dtype=complex)


def _rotation(phi):
    c, s = np.cos(phi), np.sin(phi)
    R = np.empty(phi.shape + (2, 2))
    R[..., 0, 0] = c
    R[..., 0, 1] = -s
    R[..., 1, 0] = s
    R[..., 1, 1] = c
    return R


def _congruence_path(p, s):
    # H_s = rotation by s*pi/4 runs from I to (1/sqrt 2)[[1, -1], [1, 1]]
    H = _rotation(s * np.pi / 4)
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    A = np.swapaxes(H, -1, -2) @ swap @ H
    return A.astype(complex), np.zeros((s.size, 2, 2), dtype=complex)


def _block_large_d(p, s):
    d = p["d"]
    A = (s + (1 - s) * d)[:, None, None].astype(complex)
    B = (1 - s)[:, None, None].astype(complex)
    return A, B


def bump(s, amplitude=0.1):
    """Default bump ``amplitude * sin^2(pi s)``: vanishes with its derivative at 0 and 1."""
    return amplitude * np.sin(np.pi * s) ** 2


def _block_small_pair(p, s):
    m = s.size
    if p["stage"] == "shrink":
        D = np.diag([p["d1"], p["d2"]]).astype(complex)
        A = (1 - s)[:, None, None] * D
        B = _stack(np.eye(2, dtype=complex), m)
        return A, B
    x = bump(s, p["amplitude"])
    e = np.exp(1j * np.pi / 4)
    A = np.zeros((m, 2, 2), dtype=complex)
    A[:, 0, 0] = A[:, 1, 1] = s
    A[:, 0, 1] = e * x
    A[:, 1, 0] = -e * x
    B = (1 - s)[:, None, None] * np.eye(2)
    return A, B


def _block_leftover(p, s):
    A = ((1 - s) * p["d"])[:, None, None].astype(complex)
    B = np.ones((s.size, 1, 1), dtype=complex)
    return A, B


_BLOCK_RAW = {
    SegmentKind.BLOCK_COMPLEX: _block_complex,
    SegmentKind.PHASE_ROTATION: _phase_rotation,
    SegmentKind.CONGRUENCE_PATH: _congruence_path,
    SegmentKind.BLOCK_LARGE_D: _block_large_d,
    SegmentKind.BLOCK_SMALL_PAIR: _block_small_pair,
    SegmentKind.BLOCK_LEFTOVER: _block_leftover,
}

_FULL_RAW = {
    SegmentKind.LINEAR: _raw_linear,
    SegmentKind.B_NORMALIZE: _raw_b_normalize,
    SegmentKind.GL_CONJUGATION: _raw_gl_conjugation,
}


@dataclass(frozen=True, eq=False)
class HomotopySegment:
    """One closed-form family of pairs.

    Block kinds act on a diagonal block of size 1 or 2 at ``offset`` inside a
    fixed ``frame`` pair (the rest of the direct sum stays put). ``raw(s)``
    evaluates the family at its own parameter; ``evaluate(t)`` goes through
    the smoothstep.
    """

    kind: SegmentKind
    params: dict

    def block_raw(self, s):
        """Block-only evaluation ``(A_block, B_block)`` for block kinds."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return _BLOCK_RAW[self.kind](self.params, s)

    def raw(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.kind in _FULL_RAW:
            return _FULL_RAW[self.kind](self.params, s)
        Ab, Bb = _BLOCK_RAW[self.kind](self.params, s)
        FA, FB = self.params["frame"]
        A = _stack(FA, s.size)
        B = _stack(FB, s.size)
        k = Ab.shape[-1]
        o = self.params["offset"]
        A[:, o : o + k, o : o + k] = Ab
        B[:, o : o + k, o : o + k] = Bb
        return A, B

    def evaluate_many(self, t):
        return self.raw(smoothstep(np.clip(np.atleast_1d(t), 0.0, 1.0)))

    def evaluate(self, t):
        A, B = self.evaluate_many([t])
        return QuadricPair(A[0], B[0])

    @property
    def start(self):
        return self.evaluate(0.0)

    @property
    def end(self):
        return self.evaluate(1.0)

    def to_json(self):
        return {
            "kind": self.kind.value,
            "params": {k: _param_to_json(v) for k, v in self.params.items()},
            "start": self.start.to_json(),
            "end": self.end.to_json(),
        }

    @classmethod
    def from_json(cls, obj):
        kind = SegmentKind(obj["kind"])
        params = {k: _param_from_json(k, v) for k, v in obj["params"].items()}
        if kind in _BLOCK_RAW and ("frame" not in params or "offset" not in params):
            raise PreconditionError(f"{kind.value} segment needs 'frame' and 'offset'")
        seg = cls(kind, params)
        return _Reversed.wrap(seg) if obj.get("reversed") else seg


def _param_to_json(v):
    if isinstance(v, QuadricPair):
        return v.to_json()
    if isinstance(v, tuple) and len(v) == 2 and all(isinstance(x, np.ndarray) for x in v):
        return QuadricPair(*v).to_json()
    if isinstance(v, np.ndarray):
        return matrix_to_json(v)
    if isinstance(v, (complex, np.complexfloating)):
        return complex_to_json(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _param_from_json(key, v):
    if key == "frame":
        pair = QuadricPair.from_json(v)
        return (np.array(pair.A), np.array(pair.B))
    if key in ("b",):
        return complex_from_json(v)
    if isinstance(v, list):
        return np.array(matrix_from_json(v, key))
    return v


def _segment(kind, **params):
    return HomotopySegment(SegmentKind(kind), params)


def linear_segment(p0, p1):
    return _segment(
        SegmentKind.LINEAR, A0=np.array(p0.A), B0=np.array(p0.B), A1=np.array(p1.A), B1=np.array(p1.B)
    )


def _constant_segment(pair):
    return linear_segment(pair, pair)


# --- certificates -------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Outcome of sampling a path.

    ``min_rcond`` is the smallest reciprocal Frobenius condition number of the
    block matrix seen, i.e. a lower bound on its relative distance to the
    nearest singular matrix; ``passed`` requires it to exceed ``tol`` and the
    determinant to keep one sign.
    """

    samples: int
    min_abs_det: float
    min_rcond: float
    sign: int
    tol: float
    passed: bool
    worst_t: float
    worst_segment: int = 0

    def to_json(self):
        return {
            "pass": bool(self.passed),
            "min_abs_det": float(self.min_abs_det),
            "min_rcond": float(self.min_rcond),
            "sign": int(self.sign),
            "samples": int(self.samples),
            "worst_t": float(self.worst_t),
            "worst_segment": int(self.worst_segment),
            "tol": float(self.tol),
        }


@dataclass(frozen=True)
class _Scan:
    samples: int
    signs: frozenset
    min_abs_det: float
    min_rcond: float
    worst_local_t: float


def _rcond(M):
    # 1 / (||M||_F ||M^-1||_F); singular samples give 0
    try:
        inv = np.linalg.inv(M)
    except np.linalg.LinAlgError:
        sv = np.linalg.svd(M, compute_uv=False)
        return np.where(sv[..., -1] > 0, sv[..., -1] / np.maximum(sv[..., 0], 1e-300), 0.0) / M.shape[-1]
    with np.errstate(over="ignore", invalid="ignore"):
        r = 1.0 / (np.linalg.norm(M, axis=(-2, -1)) * np.linalg.norm(inv, axis=(-2, -1)))
    return np.nan_to_num(r, nan=0.0)


def _scan(seg, samples):
    t = np.linspace(0.0, 1.0, samples)
    A, B = seg.evaluate_many(t)
    M = block_matrix(A, B)
    det = np.linalg.det(M).real
    rc = _rcond(M)
    i = int(np.argmin(rc))
    signs = frozenset(np.unique(np.sign(det)).astype(int).tolist())
    return _Scan(samples, signs, float(np.abs(det).min()), float(rc[i]), float(t[i]))


def _combine(scans, tol, reverse=False):
    K = len(scans)
    signs = frozenset().union(*(sc.signs for sc in scans))
    k = int(np.argmin([sc.min_rcond for sc in scans]))
    worst_t = (k + scans[k].worst_local_t) / K
    if reverse:
        worst_t = 1.0 - worst_t
    sign = next(iter(signs)) if len(signs) == 1 else 0
    min_rcond = scans[k].min_rcond
    return Certificate(
        samples=sum(sc.samples for sc in scans),
        min_abs_det=min(sc.min_abs_det for sc in scans),
        min_rcond=min_rcond,
        sign=int(sign),
        tol=tol,
        passed=bool(sign != 0 and min_rcond > tol),
        worst_t=float(worst_t),
        worst_segment=k,
    )


def certify_segment(seg, samples=DEFAULT_SAMPLES, tol=CERT_TOL):
    return _combine([_scan(seg, samples)], tol)


def certify(path, samples_per_segment=DEFAULT_SAMPLES, tol=CERT_TOL):
    """Sample the block determinant uniformly on every segment.

    Passes iff the determinant keeps one sign at all samples and the block
    matrix stays at relative distance more than ``tol`` from the singular
    matrices (reciprocal condition number). ``worst_t`` is the path-global
    parameter of the worst-conditioned sample. Failure is reported in the
    result, never raised.
    """
    return _combine([_scan(seg, samples_per_segment) for seg in path.segments], tol, path.reverse)


# --- paths ----------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HomotopyPath:
    """Concatenation of segments on ``[0, 1]``, each occupying an equal share.

    With ``reverse=True`` the same geometric path is traversed backwards:
    ``evaluate(t)`` returns the forward value at ``1 - t``.
    """

    segments: list
    reverse: bool = False
    certificate: Certificate = field(default=None, compare=False)

    def __post_init__(self):
        if not self.segments:
            raise PreconditionError("a path needs at least one segment")
        object.__setattr__(self, "segments", list(self.segments))

    def _forward_many(self, t):
        t = np.clip(np.atleast_1d(np.asarray(t, dtype=float)), 0.0, 1.0)
        K = len(self.segments)
        k = np.minimum((t * K).astype(int), K - 1)
        local = t * K - k
        n = self.segments[0].start.n
        A = np.empty((t.size, n, n), dtype=complex)
        B = np.empty_like(A)
        for j in np.unique(k):
            mask = k == j
            A[mask], B[mask] = self.segments[j].evaluate_many(local[mask])
        return A, B

    def evaluate_many(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return self._forward_many(1.0 - t if self.reverse else t)

    def evaluate(self, t):
        A, B = self.evaluate_many([t])
        return QuadricPair(A[0], B[0])

    @property
    def source(self):
        return self.evaluate(0.0)

    @property
    def target(self):
        return self.evaluate(1.0)

    def reversed(self):
        return HomotopyPath(self.segments, not self.reverse, self.certificate)

    def joint_gaps(self):
        """Distances between consecutive segment end and start pairs."""
        return [a.end.distance(b.start) for a, b in zip(self.segments, self.segments[1:])]

    def to_json(self):
        out = {
            "orientation": "reverse" if self.reverse else "forward",
            "segments": [s.to_json() for s in self.segments],
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, list):
            obj = {"segments": obj}
        segs = [HomotopySegment.from_json(s) for s in obj["segments"]]
        return cls(segs, obj.get("orientation", "forward") == "reverse")


# --- the constructions ----------------------------------------------------------------------


def normal_form(n, tag):
    """``(I_n, 0)`` for elliptic, ``(0, 1) + (I_{n-1}, 0)`` for hyperbolic."""
    tag = PointType(tag)
    if tag is PointType.ELLIPTIC:
        return QuadricPair(np.eye(n), np.zeros((n, n)))
    if tag is PointType.HYPERBOLIC:
        hyp = QuadricPair([[0.0]], [[1.0]])
        if n == 1:
            return hyp
        return direct_sum(hyp, QuadricPair(np.eye(n - 1), np.zeros((n - 1, n - 1))))
    raise PreconditionError("degenerate pairs have no normal form")


def _require_certified(seg, index, samples, tol):
    scan = _scan(seg, samples)
    cert = _combine([scan], tol)
    if not cert.passed:
        raise CertificationError(
            f"segment {index} ({seg.kind.value}) is not certified nondegenerate: "
            f"min rcond = {cert.min_rcond:.3g}, sign = {cert.sign}",
            segment=index,
            worst_t=cert.worst_t,
            residual=cert.min_rcond,
        )
    return scan


def _is_singular(M, rtol=1e-8):
    s = np.linalg.svd(M, compute_uv=False)
    return s[0] == 0.0 or s[-1] <= rtol * s[0]


def perturbation_segment(pair, seed=0, samples=DEFAULT_SAMPLES, tol=CERT_TOL):
    """Certified straight segment to a nearby pair whose ``A`` and ``B`` are both invertible."""
    rng = np.random.default_rng(seed)
    n = pair.n
    scale = 1.0 + np.linalg.norm(pair.A, 2) + np.linalg.norm(pair.B, 2)
    GA = random_cmatrix(rng, (n, n))
    GB = random_cmatrix(rng, (n, n))
    GB = (GB + GB.T) / 2
    fixA = _is_singular(pair.A)
    fixB = _is_singular(pair.B)
    for delta in scale * 10.0 ** -np.arange(2, 8):
        A = pair.A + delta * GA if fixA else pair.A
        B = pair.B + delta * GB if fixB else pair.B
        new = QuadricPair(A, B)
        if _is_singular(new.A) or _is_singular(new.B):
            continue
        seg = linear_segment(pair, new)
        if certify_segment(seg, samples, tol).passed:
            return seg, new
    raise CertificationError("no certified perturbation making A and B invertible")


def normalize_B(pair, seed=0, samples=DEFAULT_SAMPLES, tol=CERT_TOL):
    """Segments carrying ``(A, B)`` to a G-congruent ``(A_1, I)``.

    Uses ``P_t`` from ``gl_path(S)`` with ``S^T B S = I``; along the way the
    block determinant is multiplied by ``|det P_t|^4 > 0``. Singular ``A`` or
    ``B`` are first moved off by a certified perturbation segment. Returns
    ``(segments, end_pair)``.
    """
    if classify(pair).tag is PointType.DEGENERATE:
        raise PreconditionError("pair is degenerate")
    segs = []
    if _is_singular(pair.A) or _is_singular(pair.B):
        seg, pair = perturbation_segment(pair, seed, samples, tol)
        segs.append(seg)
    n = pair.n
    if np.linalg.norm(pair.B - np.eye(n)) <= 1e-14:
        return segs, QuadricPair(pair.A, np.eye(n))
    S = symmetric_to_identity(pair.B)
    g = gl_path(S, seed)
    for piece in ("phase", "linear"):
        segs.append(
            _segment(
                SegmentKind.B_NORMALIZE, A=np.array(pair.A), B=np.array(pair.B), S=g.S, theta=g.theta, piece=piece
            )
        )
    end = segs[-1].end
    return segs, QuadricPair(end.A, np.eye(n))


def conjugation_segment(A, S, seed=0):
    """Segments ``(S_t A conj(S_t)^{-1}, I)`` with ``S_t = gl_path(S)``.

    ``(S_t A conj(S_t)^{-1})`` times its conjugate is similar to
    ``A conj(A)``, so the block determinant ``det(A conj(A) - I)`` (up to the
    sign ``(-1)^n``) does not change along the family.
    """
    A = as_square(A, "A")
    g = gl_path(S, seed)
    return [
        _segment(SegmentKind.GL_CONJUGATION, A=np.array(A), S=g.S, theta=g.theta, piece=piece)
        for piece in ("phase", "linear")
    ]


def block_segment(kind, frame=None, offset=0, **params):
    """A single block homotopy from the direct-sum step.

    ``kind`` and its parameters:

    * ``BlockComplex``, ``b`` (negative or nonreal): ``([[0, 1], [b_s, 0]], (1-s) I)``
      with ``b_s`` running to ``-1`` off ``[0, inf)``.
    * ``PhaseRotation``, ``stage="swap"``: ``[[0, 1], [e^{(1-s) i pi}, 0]]``;
      ``stage="diag"``: ``diag(1, e^{(1-s) i pi})``; ``B = 0``.
    * ``CongruencePath``: ``H_s^* [[0, 1], [1, 0]] H_s``, ``B = 0``.
    * ``BlockLargeD``, ``d > 1``: ``(s + (1-s) d, 1 - s)``.
    * ``BlockSmallPair``, ``d1, d2`` in (0, 1), ``stage="shrink"|"bump"``,
      optional ``amplitude`` of the bump ``x(s)`` (default 0.1).
    * ``BlockLeftover``, ``d`` in (0, 1): ``((1-s) d, 1)``.

    Without a ``frame`` the block is its own pair (start values filled in).
    """
    kind = SegmentKind(kind)
    if kind is SegmentKind.BLOCK_COMPLEX:
        b = complex(params["b"])
        if abs(b.imag) <= 1e-14 * max(1.0, abs(b)) and b.real >= 0:
            raise PreconditionError("b must be negative or nonreal")
        params["b"] = b
        size = 2
    elif kind is SegmentKind.PHASE_ROTATION:
        if params.get("stage") not in ("swap", "diag"):
            raise PreconditionError("PhaseRotation stage must be 'swap' or 'diag'")
        size = 2
    elif kind is SegmentKind.CONGRUENCE_PATH:
        size = 2
    elif kind is SegmentKind.BLOCK_LARGE_D:
        if not float(params["d"]) > 1:
            raise PreconditionError("BlockLargeD needs d > 1")
        params["d"] = float(params["d"])
        size = 1
    elif kind is SegmentKind.BLOCK_SMALL_PAIR:
        d1, d2 = float(params["d1"]), float(params["d2"])
        if not (0 < d1 < 1 and 0 < d2 < 1):
            raise PreconditionError("BlockSmallPair needs both d in (0, 1)")
        if params.get("stage") not in ("shrink", "bump"):
            raise PreconditionError("BlockSmallPair stage must be 'shrink' or 'bump'")
        params.update(d1=d1, d2=d2, amplitude=float(params.get("amplitude", 0.1)))
        size = 2
    elif kind is SegmentKind.BLOCK_LEFTOVER:
        if not 0 < float(params["d"]) < 1:
            raise PreconditionError("BlockLeftover needs d in (0, 1)")
        params["d"] = float(params["d"])
        size = 1
    else:
        raise PreconditionError(f"{kind.value} is not a block kind")
    if frame is None:
        Ab, Bb = _BLOCK_RAW[kind](params, np.zeros(1))
        frame = (Ab[0].copy(), Bb[0].copy())
        offset = 0
    elif isinstance(frame, QuadricPair):
        frame = (np.array(frame.A), np.array(frame.B))
    if offset < 0 or offset + size > frame[0].shape[0]:
        raise PreconditionError("block does not fit in the frame")
    return HomotopySegment(kind, dict(params, frame=frame, offset=int(offset)))


def _block_chain(D, lambdas, seed_pair):
    """Segments taking ``(diag(D) + blocks, I)`` to its normal form, block by block."""
    frame = (np.array(seed_pair.A), np.array(seed_pair.B))
    segs = []

    def add(kind, offset, **params):
        nonlocal frame
        seg = block_segment(kind, frame=frame, offset=offset, **params)
        segs.append(seg)
        A, B = seg.raw(np.ones(1))
        frame = (A[0], B[0])

    l = int(np.sum(D < 1))
    i = 0
    if l % 2 == 1:
        add(SegmentKind.BLOCK_LEFTOVER, 0, d=D[0])
        i = 1
    while i < l:
        for stage in ("shrink", "bump"):
            add(SegmentKind.BLOCK_SMALL_PAIR, i, d1=D[i], d2=D[i + 1], stage=stage)
        i += 2
    for j in range(l, len(D)):
        add(SegmentKind.BLOCK_LARGE_D, j, d=D[j])
    off = len(D)
    for lam in lambdas:
        add(SegmentKind.BLOCK_COMPLEX, off, b=lam)
        add(SegmentKind.PHASE_ROTATION, off, stage="swap")
        add(SegmentKind.CONGRUENCE_PATH, off)
        add(SegmentKind.PHASE_ROTATION, off, stage="diag")
        off += 2
    return segs, l


def normal_form_path(pair, seed=0, samples=DEFAULT_SAMPLES, tol=CERT_TOL, d_margin=1e-9):
    """Certified nondegenerate homotopy from ``pair`` to its normal form.

    Stages: optional perturbation making ``A``, ``B`` invertible; G-congruence
    to ``(A_1, I)``; optional perturbation making the con-spectrum of ``A_1``
    generic; consimilarity ``(S_t A_1 conj(S_t)^{-1}, I)`` to
    ``(diag(D) + Lambda, I)``; one chain of block homotopies per direct
    summand. With ``l`` entries of ``D`` below 1, the target is elliptic for
    even ``l`` and hyperbolic for odd ``l``. Every segment is certified as it
    is built; the first failure raises ``CertificationError``.
    """
    cls = classify(pair)
    if cls.tag is PointType.DEGENERATE:
        raise PreconditionError("pair is degenerate")
    target = normal_form(pair.n, cls.tag)
    if pair.allclose(target, atol=1e-12):
        path = HomotopyPath([_constant_segment(pair)])
        return HomotopyPath(path.segments, certificate=certify(path, samples, tol))

    segs, cur = normalize_B(pair, seed, samples, tol)
    form = consim_diagonalize(cur.A, seed=seed)
    if form.perturbation is not None:
        shifted = QuadricPair(form.A, np.eye(pair.n))
        segs.append(linear_segment(cur, shifted))
        cur = shifted
    D = form.D
    if np.any(np.abs(D - 1) <= d_margin):
        raise GenericityError("a diagonal entry of the consimilarity form equals 1")
    segs.extend(conjugation_segment(cur.A, form.S, seed))
    canon = QuadricPair(canonical_matrix(D, form.lambdas), np.eye(pair.n))
    if segs[-1].end.distance(canon) > 0:
        segs.append(linear_segment(segs[-1].end, canon))
    chain, l = _block_chain(D, form.lambdas, canon)
    segs.extend(chain)

    expected = PointType.HYPERBOLIC if l % 2 else PointType.ELLIPTIC
    if expected is not cls.tag:
        raise GenericityError(f"parity of l={l} contradicts the {cls.tag.value} type of the pair")

    scans = [_require_certified(seg, k, samples, tol) for k, seg in enumerate(segs)]
    cert = _combine(scans, tol)
    if not cert.passed:
        raise CertificationError(
            "path determinant changes sign across segments",
            segment=cert.worst_segment,
            worst_t=cert.worst_t,
            residual=cert.min_rcond,
        )
    return HomotopyPath(segs, certificate=cert)


def connecting_path(p0, p1, seed=0, samples=DEFAULT_SAMPLES, tol=CERT_TOL):
    """Path ``p0 -> normal form -> p1`` for two pairs of the same type."""
    if classify(p0).tag is not classify(p1).tag:
        raise PreconditionError("pairs of different type cannot be joined nondegenerately")
    a = normal_form_path(p0, seed, samples, tol)
    b = normal_form_path(p1, seed, samples, tol)
    segs = list(a.segments) + [_Reversed.wrap(s) for s in reversed(b.segments)]
    path = HomotopyPath(segs)
    return HomotopyPath(segs, certificate=certify(path, samples, tol))


class _Reversed:
    """Segment wrapper traversing another segment backwards."""

    @staticmethod
    def wrap(seg):
        return _ReversedSegment(seg.kind, seg.params, seg)


@dataclass(frozen=True, eq=False)
class _ReversedSegment(HomotopySegment):
    inner: HomotopySegment = None

    def raw(self, s):
        return self.inner.raw(1.0 - np.atleast_1d(np.asarray(s, dtype=float)))

    def to_json(self):
        out = self.inner.to_json()
        out["reversed"] = True
        out["start"], out["end"] = out["end"], out["start"]
        return out
