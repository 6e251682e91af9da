"""Levi forms of the two model functions near the glued surface Y.

    python demos/levi_forms.py
"""

import numpy as np

from crpoints import ModelKind, levi_value, model_field, pseudoconvexity_report, restricted_levi_check

f = model_field(ModelKind.ALL_SQUARES, 2)
p_off = np.array([0.2, 0.1j, 0.3])
p_on = np.array([0.2, 0.1j, f.graph(np.array([[0.2, 0.1j]]))[0]])
for label, p in (("off Y", p_off), ("on Y", p_on)):
    r = pseudoconvexity_report(f, p)
    print(f"AllSquares {label}: +{r.num_positive} -{r.num_negative} 0:{r.num_zero}  min eig {r.min_eigenvalue:.3g}")

g = model_field(ModelKind.MIXED_MODULUS, 2)
z = np.array([[0.1, 0.05]])
for psi in (0.02, -0.02):
    p = np.array([0.1, 0.05, g.graph(z)[0] + psi])
    val = levi_value(g, p, np.array([1.0, 0, 0]))
    print(f"MixedModulus L(1,0,0) at psi = {psi:+.2f}: {val:+.3e}")

on = np.array([0.1, 0.05, g.graph(z)[0]])
print("restricted Levi form on Y:", restricted_levi_check(g, on).value)
