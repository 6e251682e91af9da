"""Classify quadric pairs and reduce an A > 0 pair to Bishop's normal form.

    python demos/classify_and_normalize.py
"""

import numpy as np

from crpoints import GElement, QuadricPair, bishop_normal_form, classify, g_act, takagi_factorize

# n = 1: w = |z|^2 + gamma Re(z^2) is elliptic for gamma < 1, hyperbolic beyond
for gamma in (0.0, 0.5, 1.0, 1.5):
    cls = classify(QuadricPair([[1.0]], [[gamma]]))
    print(f"gamma = {gamma:3.1f}: {cls.tag.value:10s} det = {cls.det:+.3f}")

# the class survives a change of coordinates (zeta, P)
rng = np.random.default_rng(0)
pair = QuadricPair(np.diag([2.0, 1.0]), np.array([[0.3, 1j], [1j, -0.4]]))
P = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
moved = g_act(GElement(np.exp(0.7j), P), pair)
print("\noriginal:", classify(pair).tag.value, " moved:", classify(moved).tag.value)
print("det ratio", classify(moved).det / classify(pair).det, "= |det P|^4 =", abs(np.linalg.det(P)) ** 4)

# Takagi: B = U diag(sigma) U^T with U unitary
fac = takagi_factorize(pair.B)
print("\nTakagi values", np.round(fac.sigma, 6), "residual", np.linalg.norm(fac.reconstruct() - pair.B))

# Bishop invariants: (A, B) ~ (I, diag(gamma))
form = bishop_normal_form(pair)
print("Bishop gammas", np.round(form.gammas, 6))
