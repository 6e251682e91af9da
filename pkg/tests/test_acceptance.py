"""Acceptance criteria 1-9, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in the
terminal summary. ``python tests/test_acceptance.py`` runs them without pytest.
"""

import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES  # noqa: E402

from crpoints.canonical import bishop_normal_form, bishop_pair, takagi_factorize  # noqa: E402
from crpoints.cmatrix import random_cmatrix  # noqa: E402
from crpoints.consim import (  # noqa: E402
    JordanBlock,
    SwapBlock,
    con_spectrum,
    consim_diagonalize,
    predicted_product_diagonal,
    structured_perturbation,
)
from crpoints.graph import build_isotoped_graph, find_complex_points, realified_determinant  # noqa: E402
from crpoints.homotopy import (  # noqa: E402
    CERT_TOL,
    DEFAULT_SAMPLES,
    block_segment,
    bump,
    conjugation_segment,
    normal_form,
    normal_form_path,
)
from crpoints.levi import (  # noqa: E402
    ModelKind,
    all_squares_lower_bound,
    complex_hessian,
    levi_closed_form,
    levi_value,
    model_field,
)
from crpoints.quadric import (  # noqa: E402
    GElement,
    PointType,
    QuadricPair,
    block_matrix,
    classification_determinant,
    classify,
    g_act,
    random_pair,
)

pytestmark = pytest.mark.acceptance


def report(k, ok, detail):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def corpus_pair(k, ns):
    n = ns[k % len(ns)]
    want = PointType.ELLIPTIC if k % 2 == 0 else PointType.HYPERBOLIC
    return random_pair(n, 1000 + k, want=want), want


# 1 -----------------------------------------------------------------------------------------


def test_criterion_1_determinant_realness_and_invariance():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst_imag, flips = 0.0, 0
    for k in range(1000):
        n = 1 + k % 5
        pair = random_pair(n, 10_000 + k)
        d = np.linalg.det(block_matrix(pair.A, pair.B))
        worst_imag = max(worst_imag, abs(d.imag) / (1 + abs(d.real)))
        g = GElement(np.exp(2j * np.pi * rng.uniform()), random_cmatrix(rng, (n, n)) + 0.5 * np.eye(n))
        moved = g_act(g, pair)
        dm = np.linalg.det(block_matrix(moved.A, moved.B))
        worst_imag = max(worst_imag, abs(dm.imag) / (1 + abs(dm.real)))
        tag = classify(pair).tag
        if tag is not PointType.DEGENERATE and classify(moved).tag is not tag:
            flips += 1
    elapsed = time.perf_counter() - t0
    ok = worst_imag <= 1e-9 and flips == 0 and elapsed < 10
    assert report(1, ok, f"max |Im|/(1+|Re|) = {worst_imag:.2e}, class flips = {flips}, {elapsed:.1f} s")


# 2 -----------------------------------------------------------------------------------------


def test_criterion_2_normal_form_homotopy():
    t0 = time.perf_counter()
    failures = []
    worst_end, worst_rcond, worst_det = 0.0, np.inf, np.inf
    literal = 0
    for k in range(200):
        pair, want = corpus_pair(k, (1, 2, 3, 4))
        path = normal_form_path(pair, seed=k, samples=DEFAULT_SAMPLES)
        cert = path.certificate
        end = path.target.distance(normal_form(pair.n, want))
        worst_end = max(worst_end, end)
        worst_rcond = min(worst_rcond, cert.min_rcond)
        worst_det = min(worst_det, cert.min_abs_det)
        # the literal default margin 1e-3 (1 + |A| + |B|)^(2n) is reported, not required
        scale = 1 + np.linalg.norm(pair.A, 2) + np.linalg.norm(pair.B, 2)
        literal += cert.min_abs_det > 1e-3 * scale ** (2 * pair.n)
        expected_sign = 1 if want is PointType.ELLIPTIC else -1
        if not (cert.passed and cert.sign == expected_sign and end <= 1e-8):
            failures.append(k)
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 60
    assert report(
        2,
        ok,
        f"{200 - len(failures)}/200 certified, max endpoint error {worst_end:.1e}, "
        f"min |det| {worst_det:.1e}, min rcond {worst_rcond:.1e} > {CERT_TOL:.0e}, "
        f"{literal}/200 also above the norm-power margin, {elapsed:.1f} s",
    )


# 3 -----------------------------------------------------------------------------------------


def _dets(seg, s):
    A, B = seg.raw(s)
    return np.linalg.det(block_matrix(A, B)).real, A


def test_criterion_3_closed_form_determinants():
    s = np.linspace(0, 1, 1001)
    errs = {}
    d, A = _dets(block_segment("BlockComplex", b=1j), s)
    closed = np.abs(A[:, 1, 0] - (1 - s) ** 2) ** 2
    errs["BlockComplex(i)"] = np.max(np.abs(d - closed) / np.abs(closed))
    worst = 0.0
    for dd in (1.05, 2.0, 3.7, 10.0):
        d, _ = _dets(block_segment("BlockLargeD", d=dd), s)
        # (t + (1-t)(d-1)) ((1-t) d + 1): the product for A_t = t + (1-t) d, B_t = 1 - t
        closed = (s + (1 - s) * (dd - 1)) * ((1 - s) * dd + 1)
        worst = max(worst, np.max(np.abs(d - closed) / np.abs(closed)))
    errs["BlockLargeD"] = worst
    worst = 0.0
    for amp in (0.05, 0.1, 0.3):
        d, _ = _dets(block_segment("BlockSmallPair", d1=0.2, d2=0.7, stage="bump", amplitude=amp), s)
        x = bump(s, amp)
        closed = (2 * s - 1) ** 2 + np.abs(x) ** 2 * (np.abs(x) ** 2 + 2 * (1 - s) ** 2)
        worst = max(worst, np.max(np.abs(d - closed) / np.abs(closed)))
    errs["BlockSmallPair"] = worst
    ok = all(e <= 1e-9 for e in errs.values())
    assert report(3, ok, ", ".join(f"{k} rel err {v:.1e}" for k, v in errs.items()))


# 4 -----------------------------------------------------------------------------------------


def test_criterion_4_conjugation_invariance():
    rng = np.random.default_rng(4)
    s = np.linspace(0, 1, 1001)
    worst = 0.0
    for k in range(100):
        n = 1 + k % 4
        A = random_cmatrix(rng, (n, n), 2.0)
        S = random_cmatrix(rng, (n, n), 2.0)
        d = np.concatenate([_dets(seg, s)[0] for seg in conjugation_segment(A, S, seed=k)])
        worst = max(worst, np.max(np.abs(d - d[0])) / abs(d[0]))
    assert report(4, worst <= 1e-6, f"max relative deviation {worst:.1e} over 100 (A, S)")


# 5 -----------------------------------------------------------------------------------------


def test_criterion_5_consimilarity():
    rng = np.random.default_rng(5)
    worst_res, worst_pair = 0.0, 0.0
    for k in range(200):
        n = 1 + k % 5
        A = random_cmatrix(rng, (n, n))
        f = consim_diagonalize(A, seed=k)
        res = np.linalg.norm(f.S @ f.A @ np.linalg.inv(f.S.conj()) - f.canonical)
        worst_res = max(worst_res, res)
        worst_pair = max(worst_pair, con_spectrum(A).pairing_error)
    odd = 0
    for k in range(50):
        m = 1 + k % 3
        T = random_cmatrix(rng, (2 * m, 2 * m)) + 2 * np.eye(2 * m)
        A = T @ SwapBlock(m, -rng.uniform(0.2, 3)).matrix() @ np.linalg.inv(T.conj())
        negs = con_spectrum(A, tol=1e-5).negatives
        odd += sum(1 for _, mult in negs if mult % 2) + (not negs)
    blocks = [JordanBlock(2, 1.0), SwapBlock(1, 1j), JordanBlock(3, 0.4), SwapBlock(2, -2.0)]
    eps = [0.01, 0.02, 0.013, 0.03, -0.02, 0.005, -0.01, 0.015]
    M = structured_perturbation(blocks, eps)
    diag_err = np.max(np.abs(np.diag(M @ M.conj()) - predicted_product_diagonal(blocks, eps)))
    e1 = structured_perturbation(JordanBlock(2, 1.0), [0.01, 0.02])
    e1_err = np.max(np.abs(np.diag(e1 @ e1.conj()) - [1.01**2, 1.02**2]))
    ok = worst_res <= 1e-8 and worst_pair <= 1e-7 and odd == 0 and diag_err <= 1e-14 and e1_err <= 1e-15
    assert report(
        5,
        ok,
        f"residual {worst_res:.1e}, pairing {worst_pair:.1e}, odd negative multiplicities {odd}, "
        f"perturbation diagonal err {max(diag_err, e1_err):.1e}",
    )


# 6 -----------------------------------------------------------------------------------------


def test_criterion_6_takagi_and_bishop():
    rng = np.random.default_rng(6)
    rec, uni, bis = 0.0, 0.0, 0.0
    for k in range(200):
        n = 1 + k % 6
        G = random_cmatrix(rng, (n, n))
        B = G + G.T
        fac = takagi_factorize(B)
        rec = max(rec, np.linalg.norm(fac.reconstruct() - B, 2) / np.linalg.norm(B, 2))
        uni = max(uni, np.linalg.norm(fac.U.conj().T @ fac.U - np.eye(n), 2))
        L = random_cmatrix(rng, (n, n))
        pair = QuadricPair(L @ L.conj().T + 0.3 * np.eye(n), B)
        form = bishop_normal_form(pair)
        bis = max(bis, g_act(GElement(1, form.P), pair).distance(bishop_pair(form)))
    sweep = True
    for g in np.arange(0, 2.001, 0.25):
        tag = classify(QuadricPair([[1]], [[g]])).tag
        gamma = bishop_normal_form(QuadricPair([[1]], [[g]])).gammas[0]
        if g != 1:
            sweep &= (tag is PointType.ELLIPTIC) == (gamma < 1)
    ok = rec <= 1e-10 and uni <= 1e-12 and bis <= 1e-8 and sweep
    assert report(
        6, ok, f"reconstruction {rec:.1e}, unitarity {uni:.1e}, Bishop round trip {bis:.1e}, gamma sweep {sweep}"
    )


# 7 -----------------------------------------------------------------------------------------


def _brute_realified(pair):
    n = pair.n
    cols = []
    for k in range(2 * n):
        z = np.zeros(n, dtype=complex)
        z[k % n] = 1 if k < n else 1j
        image = pair.A @ z + pair.B.conj() @ z.conj()
        cols.append(np.concatenate([image.real, image.imag]))
    return np.linalg.det(np.array(cols).T)


def test_criterion_7_sign_bridge():
    agree = 0
    for k in range(1000):
        pair = random_pair(1 + k % 4, 20_000 + k)
        oracle = _brute_realified(pair)
        cls = classification_determinant(pair)
        mine = realified_determinant(pair)
        agree += np.sign(mine) == np.sign(cls) == np.sign(oracle)
    assert report(7, agree == 1000, f"sign agreement {agree}/1000")


# 8 -----------------------------------------------------------------------------------------


def test_criterion_8_isolated_complex_point():
    t0 = time.perf_counter()
    eps = 1.0
    bad = []
    for k in range(20):
        n = 1 + k % 2
        pair = random_pair(n, 3000 + k, want="elliptic" if k % 4 < 2 else "hyperbolic")
        surf = build_isotoped_graph(normal_form_path(pair, seed=k), eps)
        grid = 15 if n == 1 else 5
        results = [find_complex_points(surf, 1.2 * eps, g) for g in (grid, 2 * grid)]
        ok = all(len(r) == 1 and not r.non_isolated and np.linalg.norm(r.points[0][0]) <= 1e-5 for r in results)
        if not ok:
            bad.append((k, [len(r) for r in results]))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120
    assert report(8, ok, f"{20 - len(bad)}/20 surfaces with only the origin, failures {bad}, {elapsed:.1f} s")


# 9 -----------------------------------------------------------------------------------------


def _ball(rng, m, n, radius):
    x = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x * radius * rng.uniform(size=(m, 1)) ** (1 / (2 * n))


def _off_y(rng, field, m, radius, psi_radius):
    z = _ball(rng, m, field.n, radius)
    psi = _ball(rng, m, 1, psi_radius)[:, 0]
    psi = np.where(np.abs(psi) < 1e-3, 1e-3, psi)
    return np.column_stack([z, field.graph(z) + psi])


def test_criterion_9_levi_forms():
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    checks = {}
    total = 10_000
    per_n = {1: 3334, 2: 3333, 3: 3333}
    fd_err = 0.0

    def fd_vs_closed(field, p, V):
        nonlocal fd_err
        H = complex_hessian(field, p)
        val = np.einsum("mj,mjk,mk->m", V, H, V.conj()).real
        exact = levi_closed_form(field.kind, p, V)
        scale = np.sum(np.abs(V) ** 2, axis=1) * (1 + np.linalg.norm(H, axis=(1, 2)))
        fd_err = max(fd_err, float(np.max(np.abs(val - exact) / scale)))
        return H, val

    pos_off, profile_on, lower = True, True, True
    psh_off_mixed, e1_negative, semipos = True, True, True
    e1_violations = 0
    for n, m in per_n.items():
        f = model_field(ModelKind.ALL_SQUARES, n)
        p = _off_y(rng, f, m, np.sqrt(0.49), 1.0)
        V = rng.normal(size=(m, n + 1)) + 1j * rng.normal(size=(m, n + 1))
        H, val = fd_vs_closed(f, p, V)
        lam = np.linalg.eigvalsh(H)
        pos_off &= bool(np.all(lam[:, 0] > 0) and np.all(val > 0))
        lower &= bool(np.all(val >= all_squares_lower_bound(p, V) - 1e-9 * np.sum(np.abs(V) ** 2, axis=1)))
        z = _ball(rng, m, n, np.sqrt(0.49))
        z = z[np.linalg.norm(z, axis=1) > 1e-2]
        onY = np.column_stack([z, f.graph(z)])
        lam = np.linalg.eigvalsh(complex_hessian(f, onY))
        band = 1e-6 * (np.abs(lam).max(axis=1, keepdims=True) + 1)
        counts = np.stack([(lam > band).sum(1), (np.abs(lam) <= band).sum(1)], axis=1)
        profile_on &= bool(np.all(counts == [2, n - 1]))

        g = model_field(ModelKind.MIXED_MODULUS, n)
        p = _off_y(rng, g, m, 0.3, 0.15)
        H, _ = fd_vs_closed(g, p, V)
        lam = np.linalg.eigvalsh(H)
        band = 1e-6 * (np.abs(lam).max(axis=1, keepdims=True) + 1)
        psh_off_mixed &= bool(np.all((lam > band).sum(1) >= n))
        e1 = np.zeros((m, n + 1))
        e1[:, 0] = 1
        v1 = levi_value(g, p, e1)
        e1_violations += int(np.sum(v1 >= 0))
        z = _ball(rng, m, n, 0.3)
        onY = np.column_stack([z, g.graph(z)])
        lam = np.linalg.eigvalsh(complex_hessian(g, onY))
        semipos &= bool(np.all(lam[:, 0] >= -1e-6 * (np.abs(lam).max(axis=1) + 1)))
    e1_negative = e1_violations == 0
    elapsed = time.perf_counter() - t0
    checks = {
        "AllSquares positive off Y": pos_off,
        "AllSquares profile (2, n-1) on Y": profile_on,
        "AllSquares lower bound": lower,
        "MixedModulus >= n positive off Y": psh_off_mixed,
        "MixedModulus negative on (1,0,..,0)": e1_negative,
        "MixedModulus semipositive on Y": semipos,
        "FD vs closed form": fd_err <= 1e-6,
        "runtime": elapsed < 60,
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    detail = (
        f"{total} samples per model, FD/closed-form rel err {fd_err:.1e}, "
        f"(1,0,..,0) nonnegative at {e1_violations}/{total} points, {elapsed:.1f} s"
    )
    if failed:
        detail += "; failing: " + ", ".join(failed)
    assert report(9, ok, detail)


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    status = 0
    for fn in tests:
        try:
            fn()
        except AssertionError:
            status = 1
    sys.exit(status)
