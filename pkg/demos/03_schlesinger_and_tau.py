"""
Isomonodromic deformations: Schlesinger system and tau function
===============================================================

The residues A_k of Y' Y^{-1} move with the branch points according to the
Schlesinger equations. We check this by finite differences, then look at the
tau function and the Thomae formula for theta constants.
"""

import numpy as np

from zncover import rh
from zncover import schlesinger as sc
from zncover.curve import make_curve

lams = [0, 0.7 + 0.2j, 1.6]
lambda0 = 0.8 + 1.1j
mono = rh.build_monodromy(3, 1, [0.8 + 0.3j, 1.2 - 0.2j], [0.9 + 0.4j, 1.1 - 0.1j])
sol = rh.solve_Y(make_curve(3, lams), mono, lambda0)

closed = sc.a_matrices_closed(sol)
residue = sc.a_matrices_residue(sol)
print("closed form vs contour residues:", max(np.abs(a - b).max() for a, b in zip(closed.A, residue.A)))
print("eigenvalues of A_1:", np.round(np.linalg.eigvals(closed.A[0]), 8))

print("Schlesinger residual:", sc.schlesinger_residual(lams, 3, mono, lambda0))
print("  without the lambda0 terms:", sc.schlesinger_residual(lams, 3, mono, lambda0, base_terms=False))

tau = sc.tau(sol)
print("tau =", tau.value, "exponents", tau.exponents)
print("d log tau (theta formula):", tau.log_derivatives)
print("d log tau (residues)     :", sc.tau_log_derivative_residue(sol))

for N in (2, 3):
    print(f"Thomae N={N}: relative error", sc.thomae_check(make_curve(N, (0, 0.6, 1.3, 2.0 + 0.3j, 3.1))))
