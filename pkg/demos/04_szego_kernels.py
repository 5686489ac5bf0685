"""
Szego kernels, the prime form and Fay's identity
================================================

The entries of Y are Szego kernels with characteristics. With zero
characteristic the kernel has an algebraic closed form, which we compare
with the theta-function expression.
"""

import numpy as np

from zncover import kernels as K
from zncover.curve import make_curve
from zncover.periods import Characteristics, period_matrix

pd = period_matrix(make_curve(3, (0, 0.7 + 0.2j, 1.6)))
ctx = K.KernelContext(pd)
print("odd characteristic used for the prime form:", ctx.gamma.eps, ctx.gamma.delta)

P = ctx.point(0.3 + 0.9j, 1)
Q = ctx.point(2.1 - 0.6j, 2)
zero = Characteristics.zero(2)
# a half-form: the two expressions agree up to an overall sign
print("theta form :", K.szego(ctx, P, Q, zero))
print("closed form:", K.szego_zero(ctx.curve, P, Q))
print("sign-free distance:", K.sign_free_distance(K.szego(ctx, P, Q, zero), K.szego_zero(ctx.curve, P, Q)))

ch = Characteristics([0.1, -0.2], [0.3, 0.05])
print("E(P,Q) =", K.prime_form(ctx, P, Q), " E(Q,P) =", K.prime_form(ctx, Q, P))
print("Fay identity residual:", K.fay_residual(ctx, P, Q, ch))
R, S = ctx.point(-0.5 + 0.4j, 3), ctx.point(1.0 + 1.5j, 1)
print("determinant identity (n=2):", K.det_identity_residual(ctx, [P, R], [Q, S], ch))
