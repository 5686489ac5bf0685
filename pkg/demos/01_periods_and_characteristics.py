"""
Periods of a Z_N curve and the characteristics of its branch points
===================================================================

The curve y^3 = (lam - l1)(lam - l3)(lam - l2)^2 has genus 2. Its Riemann
matrix comes out of boundary-value quadrature, and for this family it has
the one-parameter form [[2T, T], [T, 2T]] with T a ratio of 2F1 values.
"""

import numpy as np

from zncover.curve import make_curve
from zncover.n3m1 import T_of_t
from zncover.periods import period_matrix, table_characteristics, lattice_residual

lams = (0, 0.7 + 0.2j, 1.6)
pd = period_matrix(make_curve(3, lams))
np.set_printoptions(precision=6, suppress=True)
print("Riemann matrix\n", pd.Pi)

# compare with the hypergeometric modulus
T = T_of_t((lams[1] - lams[0]) / (lams[2] - lams[0]))
print("T from 2F1 ratio:", T)
print("max |Pi - T [[2,1],[1,2]]| =", np.abs(pd.Pi - T * np.array([[2, 1], [1, 2]])).max())
print("min eigenvalue of Im Pi:", pd.min_imag_eig())

# Abel images of the branch points are 1/3-periods
for k in range(1, 4):
    ch = table_characteristics(pd.curve, k)
    print(f"[U_{k}] eps={ch.eps.real} delta={ch.delta.real}  residual={lattice_residual(pd, pd.U[k - 1], ch):.1e}")

# a larger example: N = 4 with five finite branch points has genus 3 * 2 = 6
big = period_matrix(make_curve(4, (0, 0.6, 1.3, 2.0 + 0.3j, 3.1)))
print("genus", big.genus, "symmetry error", big.symmetry_error(), "min Im eig", big.min_imag_eig())
