"""
The genus-2 trigonal curve through Jacobi theta functions
=========================================================

For three finite branch points the genus-2 theta function splits into
Jacobi thetas, the modulus t is a Gamma_0(3) function of T, and the
solution Y can be written with elliptic data only.
"""

import numpy as np

from zncover import n3m1 as n
from zncover import rh
from zncover import schlesinger as sc
from zncover.curve import make_curve

for t in (0.2, 0.5, 0.7):
    T = n.T_of_t(t)
    print(f"t={t}: T={T:.6f}, t(T)={n.t_of_T(T):.12f}")

T = 1j / np.sqrt(3)
print("t(i/sqrt3) =", n.t_of_T(T))
print("Halphen system at i/sqrt3:", n.halphen_check(T))
print("Goursat identity at t=0.3:", n.goursat_check(0.3).residual)

lams = (0, 0.3 + 0.1j, 1)
c, d = (0.7 + 0.2j, 1.3 - 0.4j), (0.8 + 0.5j, 1.1 - 0.3j)
lambda0 = 0.4 + 0.8j
J = n.jacobi_solution(lams, c, d, lambda0)
sol = rh.solve_Y(make_curve(3, lams), rh.build_monodromy(3, 1, c, d), lambda0)
lam = 1.5 + 0.5j
print("Jacobi form vs general solver:", np.abs(J.Y(lam) - sol.Y(lam)).max())
print("tau (Jacobi) =", n.tau_n3m1(lams, c, d), " tau (general) =", sc.tau(sol).value)
