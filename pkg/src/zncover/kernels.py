"""Prime form, Szego and Bergmann kernels on the Z_N curve.

Forms are returned as coefficient functions in the d lambda trivialization:
a (1/2, 1/2)-form value S means S sqrt(d lambda(P) d lambda(Q)). Square roots
of differentials make every such value sign-ambiguous; comparisons between
independent constructions are therefore done up to sign.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from . import curve as cv
from .curve import SheetedPoint, ZnCurve
from .errors import NoneFound, SingularCharacteristics, ValidationError
from .periods import Characteristics, PeriodData, abel_u
from .theta import ThetaParams, theta, theta_derivatives, theta_with_gradient


def half_integer_chars(g: int):
    for bits in itertools.product((0, 1), repeat=2 * g):
        eps = np.array(bits[:g]) / 2
        delta = np.array(bits[g:]) / 2
        yield Characteristics(eps, delta, "manual")


def find_odd_char(periods: PeriodData, params: ThetaParams | None = None, threshold: float = 1e-6,
                  skip: int = 0) -> Characteristics:
    """First odd half-integer characteristic with a non-vanishing theta gradient at 0.

    ``skip`` passes over that many admissible characteristics (used to test
    independence of the prime form from the choice).
    """
    params = params or ThetaParams(periods.Pi)
    found = 0
    for ch in half_integer_chars(periods.genus):
        if ch.parity() != 1:
            continue
        grad = theta_derivatives(np.zeros(periods.genus), params, ch)
        if np.linalg.norm(grad) > threshold:
            if found == skip:
                return ch
            found += 1
    raise NoneFound("no non-singular odd half-integer characteristic")


class KernelContext:
    """Curve data plus a fixed odd characteristic; caches Abel integrals."""

    def __init__(self, periods: PeriodData, params: ThetaParams | None = None,
                 gamma: Characteristics | None = None):
        self.periods = periods
        self.curve = periods.curve
        self.params = params or ThetaParams(periods.Pi)
        self.gamma = gamma or find_odd_char(periods, self.params)
        self.grad_gamma = theta_derivatives(np.zeros(periods.genus), self.params, self.gamma)
        self._v = {}

    # ---- points
    def point(self, lam, sheet: int = 1, side: int = 0) -> SheetedPoint:
        return cv.sheeted_point(self.curve, lam, sheet, side)

    def v(self, P: SheetedPoint) -> np.ndarray:
        """int_infinity^P dv along the region path."""
        key = (complex(P.lam), P.side)
        if key not in self._v:
            self._v[key] = abel_u(self.periods, P.lam, P.side)
        u = cv.j_phases(self.curve, P.sheet - 1) * self._v[key]
        return self.periods.norm @ u

    def integral(self, P: SheetedPoint, Q: SheetedPoint) -> np.ndarray:
        return self.v(P) - self.v(Q)

    def dv(self, P: SheetedPoint) -> np.ndarray:
        """Coefficients of the normalized differentials with respect to d lambda."""
        du = cv.du_coefficients(self.curve, np.array([P.lam]), np.array([P.y / self.curve.rho ** (P.sheet - 1)]),
                                P.sheet)[:, 0]
        return self.periods.norm @ du

    def h(self, P: SheetedPoint) -> complex:
        return complex(np.sqrt(self.grad_gamma @ self.dv(P)))


def prime_form(ctx: KernelContext, P: SheetedPoint, Q: SheetedPoint) -> complex:
    """E(P, Q) in the d lambda trivialization."""
    w = ctx.integral(P, Q)
    return theta(w, ctx.params, ctx.gamma) / (ctx.h(P) * ctx.h(Q))


def szego(ctx: KernelContext, P: SheetedPoint, Q: SheetedPoint, chars) -> complex:
    t0 = theta(np.zeros(ctx.periods.genus), ctx.params, chars)
    if abs(t0) < 1e-12:
        raise SingularCharacteristics("theta[e](0) vanishes")
    w = ctx.integral(P, Q)
    return theta(w, ctx.params, chars) / (t0 * prime_form(ctx, P, Q))


def _power_sum(N: int, logx) -> complex:
    """(1/N) sum_s x^((N-1)/2 - s) for x = exp(logx)."""
    s = np.arange(N)
    return complex(np.sum(np.exp(((N - 1) / 2 - s) * logx)) / N)


def szego_zero(curve: ZnCurve, P: SheetedPoint, Q: SheetedPoint) -> complex:
    """Closed form of the zero-characteristic Szego kernel (coefficient of sqrt(d lambda d mu))."""
    if P.lam == Q.lam:
        raise ValidationError("points must have distinct projections")
    x = (curve.q(P.lam) / P.y) / (curve.q(Q.lam) / Q.y)
    return _power_sum(curve.N, np.log(x)) / (P.lam - Q.lam)


def region_log(lam, a, region: int):
    """log(lam - a) continuous on C_+ (region +1) or C_- (region -1).

    The branch cut is the vertical ray from ``a`` away from the region; both
    choices agree to the left of all branch points.
    """
    d = complex(lam) - complex(a)
    ang = np.angle(d)
    if region > 0:
        if ang <= -np.pi / 2:
            ang += 2 * np.pi
    else:
        if ang <= np.pi / 2:
            ang += 2 * np.pi
    return np.log(abs(d)) + 1j * ang


def _region_of(curve: ZnCurve, P: SheetedPoint) -> int:
    r = curve.region(P.lam, tol=1e-13 * curve.span())
    if r == 0:
        r = P.side
    if r == 0:
        raise ValidationError("point on the contour needs a side")
    return r


def _log_psi(curve: ZnCurve, lam, region, I: Sequence[int]):
    pts = curve.points
    total = 0j
    for k in range(1, len(pts) + 1):
        sgn = 1 if k in I else -1
        total += sgn * region_log(lam, pts[k - 1], region)
    return total


def szego_Dm(curve: ZnCurve, P: SheetedPoint, Q: SheetedPoint, I: Sequence[int]) -> complex:
    """Closed-form Szego kernel for the characteristic of the divisor (N-1) sum_{i in I} P_i.

    The N-th root of the psi-ratio is continued within C_+ / C_- along the
    same paths as the Abel map, with the sheet offset entering as rho^(b-a)
    for P on sheet a and Q on sheet b.
    """
    I = set(int(i) for i in I)
    if len(I) != curve.m or not I <= set(range(1, 2 * curve.m + 2)):
        raise ValidationError("index set must have m distinct branch indices")
    N = curve.N
    lp = _log_psi(curve, P.lam, _region_of(curve, P), I)
    lq = _log_psi(curve, Q.lam, _region_of(curve, Q), I)
    logx = 2j * np.pi * (Q.sheet - P.sheet) / N + (lp - lq) / N
    return _power_sum(N, logx) / (P.lam - Q.lam)


def dm_characteristics(periods: PeriodData, I: Sequence[int]) -> Characteristics:
    from .periods import divisor_characteristics
    return divisor_characteristics(periods, {int(i): periods.curve.N - 1 for i in I})


def bergmann(ctx: KernelContext, P: SheetedPoint, Q: SheetedPoint) -> complex:
    """omega(P, Q) = d_P d_Q log E(P, Q), coefficient of d lambda d mu.

    The h factors of the prime form depend on one variable each, so only
    log theta[gamma](int_Q^P dv) contributes; its Hessian is summed exactly.
    """
    w = ctx.integral(P, Q)
    th, g = theta_with_gradient(w, ctx.params, ctx.gamma)
    H = theta_derivatives(w, ctx.params, ctx.gamma, 2)
    hess_log = H / th - np.outer(g, g) / th ** 2
    return complex(-ctx.dv(P) @ hess_log @ ctx.dv(Q))


def log_theta_hessian_zero(ctx: KernelContext, chars) -> np.ndarray:
    z = np.zeros(ctx.periods.genus)
    th, g = theta_with_gradient(z, ctx.params, chars)
    H = theta_derivatives(z, ctx.params, chars, 2)
    return H / th - np.outer(g, g) / th ** 2


def fay_residual(ctx: KernelContext, P: SheetedPoint, Q: SheetedPoint, chars) -> float:
    """Relative residual of S[e] S[-e] = omega + sum d^2 log theta[e](0) dv(P) dv(Q)."""
    neg = Characteristics(-np.asarray(chars.eps), -np.asarray(chars.delta))
    lhs = szego(ctx, P, Q, chars) * szego(ctx, P, Q, neg)
    rhs = bergmann(ctx, P, Q) + ctx.dv(P) @ log_theta_hessian_zero(ctx, chars) @ ctx.dv(Q)
    return float(abs(lhs - rhs) / max(abs(lhs), abs(rhs)))


def det_identity_residual(ctx: KernelContext, Ps, Qs, chars) -> float:
    """Relative residual of the Szego determinant identity for n points each."""
    n = len(Ps)
    S = np.array([[szego(ctx, P, Q, chars) for Q in Qs] for P in Ps])
    lhs = np.linalg.det(S)
    w = sum(ctx.integral(P, Q) for P, Q in zip(Ps, Qs))
    t0 = theta(np.zeros(ctx.periods.genus), ctx.params, chars)
    num = 1.0 + 0j
    for j in range(n):
        for k in range(j + 1, n):
            num *= prime_form(ctx, Ps[j], Ps[k]) * prime_form(ctx, Qs[k], Qs[j])
    den = 1.0 + 0j
    for j in range(n):
        for k in range(n):
            den *= prime_form(ctx, Ps[j], Qs[k])
    rhs = theta(w, ctx.params, chars) / t0 * num / den
    return float(abs(lhs - rhs) / abs(rhs))


def sign_free_distance(a: complex, b: complex) -> float:
    """Relative distance between a and b up to an overall sign."""
    return float(min(abs(a - b), abs(a + b)) / max(abs(a), abs(b), 1e-300))
