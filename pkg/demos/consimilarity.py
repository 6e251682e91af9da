"""Con-spectrum and consimilarity canonical form of a complex matrix.

    python demos/consimilarity.py
"""

import numpy as np

from crpoints import con_spectrum, consim_diagonalize
from crpoints.consim import JordanBlock, SwapBlock, structured_perturbation

rng = np.random.default_rng(3)
A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))

spec = con_spectrum(A)
print("eigenvalues of A conj(A):", np.round(np.linalg.eigvals(A @ A.conj()), 4))
print("positive:", spec.positives, "\nnegative:", spec.negatives, "\nnonreal pairs:", spec.complex_pairs)

f = consim_diagonalize(A, seed=0)
print("\ncanonical form\n", np.round(f.canonical, 4))
print("residual |S A conj(S)^-1 - canonical| =", np.linalg.norm(f.S @ A @ np.linalg.inv(f.S.conj()) - f.canonical))

# a negative eigenvalue of A conj(A) forces a 2x2 block; a small structured
# perturbation of a Jordan block splits its product diagonal
M = structured_perturbation([JordanBlock(2, 1.0), SwapBlock(1, -2.0)], [0.01, 0.02, 0.03])
print("\ndiag of M conj(M) after perturbation:", np.round(np.diag(M @ M.conj()), 6))
