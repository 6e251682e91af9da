import numpy as np
import pytest

from crpoints.errors import DimensionError, InternalConsistencyError, PreconditionError
from crpoints.levi import (
    ModelKind,
    all_squares_lower_bound,
    complex_hessian,
    levi_closed_form,
    levi_value,
    model_field,
    pseudoconvexity_report,
    restricted_levi_check,
    scalar_field,
)


def ball(rng, m, n, radius):
    x = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x * radius * rng.uniform(size=(m, 1)) ** (1 / (2 * n))


def off_y_points(rng, field, m, radius, psi_radius):
    z = ball(rng, m, field.n, radius)
    psi = ball(rng, m, 1, psi_radius)[:, 0]
    psi = np.where(np.abs(psi) < 1e-3, 1e-3, psi)
    return np.column_stack([z, field.graph(z) + psi])


def test_model_field_examples():
    f = model_field("AllSquares", 2)
    z = np.array([0.3 + 0.1j, -0.2j])
    assert f.eval(z, 0.5 * np.sum(np.conj(z) ** 2)) == pytest.approx(0.0, abs=1e-16)
    assert model_field("AllSquares", 1).eval(np.array([0j]), 1.0) == pytest.approx(1.0)
    g = model_field(ModelKind.MIXED_MODULUS, 2)
    assert g.eval(np.array([0.1, 0.0]), 0.1**2) == pytest.approx(0.0, abs=1e-18)
    with pytest.raises(DimensionError):
        model_field("AllSquares", 0)
    with pytest.raises(DimensionError):
        f(np.zeros(2))


def test_hessian_examples():
    f = scalar_field(1, lambda p: np.abs(p[..., -1]) ** 2)
    H = complex_hessian(f, np.array([0.3 + 0.2j, -0.1j]))
    assert np.allclose(H, [[0, 0], [0, 1]], atol=1e-7)
    g = scalar_field(1, lambda p: np.abs(p[..., 0]) ** 2 + np.abs(p[..., 1]) ** 2)
    assert np.allclose(complex_hessian(g, np.array([1.0, 2j])), np.eye(2), atol=1e-7)
    with pytest.raises(PreconditionError):
        complex_hessian(g, np.zeros(2), h=-1.0)


def test_hessian_index_convention():
    # f = Re(z conj(w)) has d_z d_wbar f = 1/2 and d_w d_zbar f = 1/2; f = Im(z conj(w)) separates them
    f = scalar_field(1, lambda p: np.imag(p[..., 0] * np.conj(p[..., 1])))
    H = complex_hessian(f, np.array([0.2, 0.1j]))
    # Im(z wbar) = (z wbar - zbar w) / (2i): d_z d_wbar = 1/(2i), d_w d_zbar = -1/(2i)
    assert H[0, 1] == pytest.approx(1 / 2j, abs=1e-7)
    assert H[1, 0] == pytest.approx(-1 / 2j, abs=1e-7)


def test_hessian_hermitian(rng):
    f = model_field("MixedModulus", 3)
    H = complex_hessian(f, off_y_points(rng, f, 50, 0.3, 0.2))
    asym = np.linalg.norm(H - np.conj(np.swapaxes(H, -1, -2)), axis=(1, 2))
    assert np.all(asym <= 1e-6 * np.linalg.norm(H, axis=(1, 2)))


@pytest.mark.parametrize("kind", list(ModelKind))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_fd_matches_closed_form(kind, n, rng):
    f = model_field(kind, n)
    p = off_y_points(rng, f, 300, 0.7, 1.0)
    V = rng.normal(size=(300, n + 1)) + 1j * rng.normal(size=(300, n + 1))
    fd = levi_value(f, p, V, check=False)
    exact = levi_closed_form(kind, p, V)
    H = complex_hessian(f, p)
    scale = np.sum(np.abs(V) ** 2, axis=1) * (1 + np.linalg.norm(H, axis=(1, 2)))
    assert np.all(np.abs(fd - exact) <= 1e-6 * scale)


def test_closed_form_mismatch_is_reported(rng):
    # a field that pretends to be AllSquares but is not
    from dataclasses import replace

    f = model_field("AllSquares", 1)
    fake = replace(f, func=lambda p: 2 * f.func(p))
    p = off_y_points(rng, f, 5, 0.5, 0.5)
    with pytest.raises(InternalConsistencyError):
        levi_value(fake, p, np.ones((5, 2)))


def test_all_squares_kernel_on_y():
    f = model_field("AllSquares", 2)
    z = np.array([0.3, 0.2j])
    p = np.concatenate([z, [0.5 * np.sum(np.conj(z) ** 2)]])
    Z = np.array([z[1], -z[0]])  # z . Z = 0
    assert levi_value(f, p, np.concatenate([Z, [0]])) == pytest.approx(0.0, abs=1e-8)


def test_all_squares_positive_and_bounded(rng):
    for n in (1, 2, 3):
        f = model_field("AllSquares", n)
        p = off_y_points(rng, f, 500, 0.7, 1.0)
        V = rng.normal(size=(500, n + 1)) + 1j * rng.normal(size=(500, n + 1))
        L = levi_value(f, p, V)
        assert np.all(L > 0)
        assert np.all(L >= all_squares_lower_bound(p, V) - 1e-9 * np.sum(np.abs(V) ** 2, axis=1))


def test_all_squares_profiles(rng):
    for n in (1, 2, 3):
        f = model_field("AllSquares", n)
        for p in off_y_points(rng, f, 20, 0.7, 1.0):
            assert pseudoconvexity_report(f, p).num_positive == n + 1
        for z in ball(rng, 20, n, 0.7):
            if np.linalg.norm(z) < 1e-2:
                continue
            rep = pseudoconvexity_report(f, np.concatenate([z, [f.graph(z)]]))
            assert rep.on_y and (rep.num_positive, rep.num_zero) == (2, n - 1)
            assert rep.num_positive + rep.num_negative + rep.num_zero == n + 1


def test_mixed_profiles(rng):
    for n in (1, 2, 3):
        g = model_field("MixedModulus", n)
        for p in off_y_points(rng, g, 30, 0.3, 0.2):
            assert pseudoconvexity_report(g, p).num_positive >= n
        for z in ball(rng, 30, n, 0.3):
            rep = pseudoconvexity_report(g, np.concatenate([z, [g.graph(z)]]))
            scale = np.abs(rep.eigenvalues).max() + 1
            assert rep.min_eigenvalue >= -1e-6 * scale


def test_mixed_first_direction_sign():
    # L(1, 0, ..., 0) = 2 (1 + |z'|^2) (|z_1|^2 - Re psi): its sign follows Re psi - |z_1|^2
    g = model_field("MixedModulus", 2)
    e1 = np.array([1.0, 0, 0])
    for psi, sign in ((0.05, -1), (-0.05, 1), (0.05j, 0)):
        z = np.array([0.0, 0.1])
        p = np.concatenate([z, [g.graph(z) + psi]])
        val = levi_value(g, p, e1)
        assert val == pytest.approx(2 * (1 + 0.01) * (0 - np.real(psi)), abs=1e-9)
        assert np.sign(np.round(val, 9)) == sign


def test_restricted_levi():
    f = model_field("AllSquares", 1)
    z = np.array([0.1 + 0j])
    res = restricted_levi_check(f, np.concatenate([z, [f.graph(z)]]))
    assert not res.vacuous and res.value > 0
    assert restricted_levi_check(f, np.zeros(2)).vacuous
    g = model_field("MixedModulus", 2)
    z = np.array([0.1 + 0.05j, -0.07 + 0.02j])
    res = restricted_levi_check(g, np.concatenate([z, [g.graph(z)]]))
    assert not res.vacuous and res.value > 0 and res.complex_dim == 1
    with pytest.raises(PreconditionError):
        restricted_levi_check(g, np.concatenate([z, [g.graph(z) + 0.1]]))


def test_restricted_levi_random(rng):
    for n in (1, 2, 3):
        for kind, radius in ((ModelKind.ALL_SQUARES, 0.7), (ModelKind.MIXED_MODULUS, 0.3)):
            f = model_field(kind, n)
            for z in ball(rng, 10, n, radius):
                if np.linalg.norm(z) < 1e-2:
                    continue
                res = restricted_levi_check(f, np.concatenate([z, [f.graph(z)]]))
                assert not res.vacuous and res.value > 0
