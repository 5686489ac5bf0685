"""Schlesinger matrices, tau function and Thomae formula from the RH solution.

A_k = Res_{lam_k} Y'(lam) Y(lam)^-1 is available two ways: a closed form that
differentiates Y'(lambda0) in the branch point lam_k (theta derivatives via
the heat equation, period derivatives via Rauch, Abel-integral derivatives
by quadrature of d(du)/d lam_k on paths that avoid the branch points), and
a residue oracle that integrates Y'Y^-1 numerically on small circles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import curve as cv
from .curve import ZnCurve, make_curve
from .errors import StepUnderflow, SolvabilityViolation
from .numerics import QuadratureSpec, integrate_segment
from .periods import Characteristics, PeriodData, abel_u, period_matrix, rauch_derivative
from .rh import RHSolution, diagonalizer, sigma_diag, solve_Y
from .theta import ThetaParams, theta, theta_cancellation, theta_derivatives, theta_with_gradient

_SPEC = QuadratureSpec(abs_tol=1e-14, max_subdivisions=8, max_level=10)


@dataclass
class SchlesingerData:
    A: list
    A_inf: np.ndarray
    lambda0: complex
    source: str

    def trace_error(self) -> float:
        return float(max(abs(np.trace(a)) for a in self.A))

    def eigen_error(self) -> float:
        """Distance of each spectrum from the exponents sigma_N."""
        N = self.A[0].shape[0]
        target = sigma_diag(N)
        worst = 0.0
        for a in self.A:
            ev = np.linalg.eigvals(a)
            ev = ev[np.argsort(ev.real)]
            worst = max(worst, float(np.max(np.abs(ev - target))))
        return worst

    def sum_error(self) -> float:
        return float(np.max(np.abs(self.A_inf + sum(self.A))))


# ---------------------------------------------------------------- derivative helpers

def _exponent(curve: ZnCurve, k: int) -> int:
    """Multiplicity of lam_k in y^N = p q^(N-1) (k is 1-based)."""
    return 1 if k % 2 == 1 else curve.N - 1


def _du_lamk_factor(curve: ZnCurve, k: int) -> np.ndarray:
    """c_i with d du_i / d lam_k = c_i du_i / (lam - lam_k)."""
    N, m = curve.N, curve.m
    s = np.repeat(np.arange(N - 1), m)
    return (s + 1) * _exponent(curve, k) / N - (s if k % 2 == 0 else 0)


def vertical_ray_integral(curve: ZnCurve, lam0, integrand) -> np.ndarray:
    """int from infinity straight down to lam0 of integrand(lam, diffs, y1) d lam, sheet 1.

    The vertical ray above a point of C_+ stays in C_+, so it never meets
    a branch point and the sheet-1 branch is analytic along it.
    """
    N = curve.N
    lam0 = complex(lam0)
    R = curve.span()
    base = lam0 - curve.points

    def f(u, uc):
        with np.errstate(divide="ignore"):
            logu = np.where(uc < 0.5, np.log1p(-np.minimum(uc, 0.5)), np.log(u))
        step = 1j * R * (-np.expm1(N * logu)) / u ** N
        D = base[:, None] + step[None, :]
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            y1 = cv.sheet1_y(curve, D)
            val = integrand(lam0 + step, D, y1) * (-1j * R * N * u ** (-N - 1.0))
        return np.where(np.isfinite(val), val, 0.0)

    return integrate_segment(f, 0.0, 1.0, _SPEC)


def _polygon_integral(curve: ZnCurve, verts, integrand) -> np.ndarray:
    total = 0
    pts = curve.points
    for a, b in zip(verts[:-1], verts[1:]):
        a, b = complex(a), complex(b)
        h = b - a

        def f(u, uc, a=a, h=h):
            lam = a + h * u
            D = lam[None, :] - pts[:, None]
            return integrand(lam, D, cv.sheet1_y(curve, D))

        total = total + integrate_segment(f, a, b, _SPEC)
    return total


def alpha_loops(curve: ZnCurve):
    """Sheet-1 polygons for the first m alpha cycles; they cross no cut."""
    pad = 0.5 * curve.min_gap()
    return [cv._loop_around_left(curve, j, 1, pad).vertices for j in range(1, curve.m + 1)]


def alpha_periods(curve: ZnCurve, k: int | None = None) -> np.ndarray:
    """alpha-period matrix of du (k None) or of its lam_k derivative, by loop quadrature."""
    N, m, g = curve.N, curve.m, curve.genus
    if k is None:
        def integrand(lam, D, y1):
            return cv.du_coefficients(curve, lam, y1, 1, D)
    else:
        fac = _du_lamk_factor(curve, k)

        def integrand(lam, D, y1):
            return cv.du_coefficients(curve, lam, y1, 1, D) * fac[:, None] / D[k - 1][None, :]
    loops = [_polygon_integral(curve, verts, integrand) for verts in alpha_loops(curve)]
    out = np.empty((g, g), complex)
    for t in range(N - 1):
        ph = cv.j_phases(curve, t)
        for j in range(m):
            out[:, j + t * m] = ph * loops[j]
    return out


def abel_derivative(periods: PeriodData, lam0, k: int):
    """(u0, d u0 / d lam_k) for u0 = int_infinity^lam0 du on sheet 1, lam0 in C_+."""
    curve = periods.curve
    fac = _du_lamk_factor(curve, k)
    du0 = vertical_ray_integral(
        curve, lam0, lambda lam, D, y1: cv.du_coefficients(curve, lam, y1, 1, D) * fac[:, None] / D[k - 1][None, :])
    return abel_u(periods, lam0), du0


# ---------------------------------------------------------------- A_k

def _dlog_theta(z, dz, dPi, params, chars):
    """d log theta[chars](z; Pi) for a variation dz of z and dPi of Pi (heat equation)."""
    th, grad = theta_with_gradient(z, params, chars)
    H = theta_derivatives(z, params, chars, 2)
    return (grad @ dz + np.sum(H * dPi) / (4j * np.pi)) / th


def a_matrices_closed(sol: RHSolution) -> SchlesingerData:
    """A_k = (lambda0 - lam_k)^2 d/d lam_k [Y'(lambda0)], differentiated analytically."""
    curve, periods, params, chars = sol.curve, sol.periods, sol.params, sol.chars
    N, g = curve.N, curve.genus
    pts = curve.points
    lam0 = sol.lambda0
    norm = periods.norm
    z0 = np.zeros(g)
    sgn = np.where(np.arange(len(pts)) % 2 == 0, 1.0, -1.0)
    dL = complex(np.sum(sgn / (lam0 - pts)))
    U = diagonalizer(N)
    K = U @ np.diag(sigma_diag(N)) @ np.linalg.inv(U)
    y0 = cv.y_value(curve, lam0, 1)
    du_pt = cv.du_coefficients(curve, np.array([lam0]), np.array([y0]), 1)[:, 0]
    phases = [cv.j_phases(curve, s) for s in range(N)]

    te, ge = theta_with_gradient(z0, params, chars)
    He = theta_derivatives(z0, params, chars, 2)
    Te = theta_derivatives(z0, params, chars, 3)
    g_e = ge / te

    As = []
    for k in range(1, len(pts) + 1):
        dA = alpha_periods(curve, k)
        dnorm = -norm @ dA @ norm
        dPi = rauch_derivative(periods, k)
        u0, du0 = abel_derivative(periods, lam0, k)
        fac = _du_lamk_factor(curve, k) / (lam0 - pts[k - 1])
        # gradient of log theta[e] at 0 and its lam_k derivative
        dgrad = np.einsum("lij,ij->l", Te, dPi) / (4j * np.pi)
        dHe = np.sum(He * dPi) / (4j * np.pi)
        dg_e = dgrad / te - ge * dHe / te ** 2
        dF = np.empty((N, N), complex)
        dlog0 = _dlog_theta(z0, z0, dPi, params, None) - _dlog_theta(z0, z0, dPi, params, chars)
        for s in range(N):
            dv = norm @ (phases[s] * du_pt)
            ddv = dnorm @ (phases[s] * du_pt) + norm @ (phases[s] * du_pt * fac)
            dF[s, s] = dg_e @ dv + g_e @ ddv
            for r in range(N):
                if r == s:
                    continue
                e = norm @ ((phases[s] - phases[r]) * u0)
                de = dnorm @ ((phases[s] - phases[r]) * u0) + norm @ ((phases[s] - phases[r]) * du0)
                R = theta(e, params, chars) / theta(e, params) * np.exp(sol.theta_zero_ratio)
                dlogR = (_dlog_theta(e, de, dPi, params, chars) - _dlog_theta(e, de, dPi, params, None)
                         + dlog0)
                ddL = sgn[k - 1] / (lam0 - pts[k - 1]) ** 2
                dF[r, s] = K[r, s] * R * (ddL + dL * dlogR)
        As.append((lam0 - pts[k - 1]) ** 2 * dF)
    return SchlesingerData(As, -sum(As), lam0, "closed-form")


def _circle_nodes(curve: ZnCurve, k: int, npts: int, radius: float):
    """Nodes on the circle around lam_k rotated away from the contour."""
    best, best_phi = -1.0, 0.0
    for phi in np.linspace(0, 1, 17)[:-1]:
        th = 2 * np.pi * (np.arange(npts) + phi) / npts
        lam = curve.points[k - 1] + radius * np.exp(1j * th)
        h = np.array([abs(z.imag - float(curve.contour_height(z.real))) for z in lam])
        if h.min() > best:
            best, best_phi = h.min(), phi
    th = 2 * np.pi * (np.arange(npts) + best_phi) / npts
    return curve.points[k - 1] + radius * np.exp(1j * th), best


def residue_radius(curve: ZnCurve, k: int) -> float:
    d = np.abs(curve.points - curve.points[k - 1])
    d[k - 1] = np.inf
    return float(np.min(d)) / 8


def _fd_derivative(sol: RHSolution, lam, h):
    """Richardson-extrapolated central difference of Y, stepping parallel to the real axis."""
    d1 = (sol.Y(lam + h) - sol.Y(lam - h)) / (2 * h)
    d2 = (sol.Y(lam + h / 2) - sol.Y(lam - h / 2)) / h
    return (4 * d2 - d1) / 3


def a_matrices_residue(sol: RHSolution, npts: int = 64, derivative: str = "fd") -> SchlesingerData:
    """A_k by trapezoidal quadrature of Y'Y^-1 on a circle of radius (nearest gap)/8."""
    curve = sol.curve
    As = []
    for k in range(1, len(curve.points) + 1):
        r = residue_radius(curve, k)
        nodes, clearance = _circle_nodes(curve, k, npts, r)
        h = min(1e-3 * r, clearance / 4)
        if h < 1e-9 * r:
            raise StepUnderflow("quadrature node too close to the contour for a difference step")
        acc = 0
        for lam in nodes:
            Y = sol.Y(lam)
            dY = _fd_derivative(sol, lam, h) if derivative == "fd" else sol.dY(lam)
            acc = acc + np.linalg.solve(Y.T, dY.T).T * (lam - curve.points[k - 1])
        As.append(acc / npts)
    return SchlesingerData(As, -sum(As), sol.lambda0, "residue")


def canonical_a_matrices(N: int, m: int) -> list:
    U = diagonalizer(N)
    base = U @ np.diag(sigma_diag(N)) @ np.linalg.inv(U)
    return [(-1) ** (k - 1) * base for k in range(1, 2 * m + 2)]


# ---------------------------------------------------------------- Schlesinger system

def schlesinger_rhs(A: list, lams, lambda0, j: int, k: int, base_terms: bool = True) -> np.ndarray:
    """Right side for d A_k / d lam_j (1-based indices).

    ``base_terms`` switches the lambda0 terms of the j != k equations.
    """
    lams = np.asarray(lams, complex)

    def term(kk, jj):
        C = A[kk - 1] @ A[jj - 1] - A[jj - 1] @ A[kk - 1]
        out = C / (lams[kk - 1] - lams[jj - 1])
        if base_terms:
            out = out - C / (lambda0 - lams[jj - 1])
        return out

    if j != k:
        return term(k, j)
    # the diagonal equation carries no lambda0 terms: it is the residue at
    # lam_k of the zero-curvature condition for d/d lam and d/d lam_k
    out = 0
    for jj in range(1, len(lams) + 1):
        if jj != k:
            C = A[k - 1] @ A[jj - 1] - A[jj - 1] @ A[k - 1]
            out = out - C / (lams[k - 1] - lams[jj - 1])
    return out


def schlesinger_residual(lambdas, N: int, monodromy, lambda0, h: float = 1e-4,
                         base_terms: bool = True, source: str = "closed") -> float:
    """Max defect of the Schlesinger system with lam_j-derivatives by central differences.

    Each perturbed configuration is solved from scratch with the same
    monodromy constants. ``base_terms=False`` drops the lambda0 terms
    (a control that must fail for non-constant solutions).
    """
    lams = np.array(lambdas, complex)
    n = len(lams)

    def amats(ls):
        curve = make_curve(N, ls)
        sol = solve_Y(curve, monodromy, lambda0)
        return (a_matrices_closed(sol) if source == "closed" else a_matrices_residue(sol)).A

    A = amats(lams)
    worst = 0.0
    for j in range(1, n + 1):
        e = np.zeros(n, complex)
        e[j - 1] = 1
        stencil = {}
        for step in (h, -h, h / 2, -h / 2):
            stencil[step] = amats(lams + step * e)
        for k in range(1, n + 1):
            d1 = (stencil[h][k - 1] - stencil[-h][k - 1]) / (2 * h)
            d2 = (stencil[h / 2][k - 1] - stencil[-h / 2][k - 1]) / h
            dA = (4 * d2 - d1) / 3
            rhs = schlesinger_rhs(A, lams, lambda0, j, k, base_terms)
            worst = max(worst, float(np.max(np.abs(dA - rhs))))
    return worst


# ---------------------------------------------------------------- tau function

@dataclass
class TauReport:
    value: complex
    log_derivatives: np.ndarray
    theta_ratio: complex
    product_factor: complex
    exponents: tuple


def tau_exponents(N: int) -> tuple:
    a = (N * N - 1) / (6 * N)
    return a, a / 2


def _product_factor(lams, N):
    a, b = tau_exponents(N)
    lams = np.asarray(lams, complex)
    n = len(lams)
    val = 1.0 + 0j
    dlog = np.zeros(n, complex)
    for i in range(n):
        for j in range(i + 1, n):
            diff = lams[i] - lams[j]
            e = -b + (a if (i - j) % 2 == 0 else 0)
            val *= diff ** e
            dlog[i] += e / diff
            dlog[j] -= e / diff
    return val, dlog


def tau(sol: RHSolution) -> TauReport:
    """tau = theta[e](0)/theta(0) times the explicit product over branch-point differences."""
    periods, params, chars = sol.periods, sol.params, sol.chars
    g = periods.genus
    z0 = np.zeros(g)
    t0 = theta(z0, params)
    te = theta(z0, params, chars)
    if theta_cancellation(z0, params, chars) < 1e-10:
        raise SolvabilityViolation("theta[eps, delta](0) vanishes: tau sits on the Malgrange divisor")
    lams = sol.curve.points
    prod, dprod = _product_factor(lams, sol.curve.N)
    dlog = np.empty(len(lams), complex)
    for k in range(1, len(lams) + 1):
        dPi = rauch_derivative(periods, k)
        dlog[k - 1] = (_dlog_theta(z0, z0, dPi, params, chars) - _dlog_theta(z0, z0, dPi, params, None)
                       + dprod[k - 1])
    ratio = te / t0
    return TauReport(ratio * prod, dlog, ratio, prod, tau_exponents(sol.curve.N))


def tau_log_derivative_residue(sol: RHSolution, npts: int = 64) -> np.ndarray:
    """(1/2) Res_{lam_k} Tr (Y'Y^-1)^2 by circle quadrature with the analytic Y'."""
    curve = sol.curve
    out = []
    for k in range(1, len(curve.points) + 1):
        r = residue_radius(curve, k)
        nodes, _ = _circle_nodes(curve, k, npts, r)
        acc = 0
        for lam in nodes:
            B = np.linalg.solve(sol.Y(lam).T, sol.dY(lam).T).T
            acc = acc + 0.5 * np.trace(B @ B) * (lam - curve.points[k - 1])
        out.append(acc / npts)
    return np.array(out)


# ---------------------------------------------------------------- Thomae

def thomae_sides(periods: PeriodData, params: ThetaParams | None = None):
    """(theta(0)^8, product side) of the Thomae-type formula."""
    curve = periods.curve
    N, m = curve.N, curve.m
    params = params or ThetaParams(periods.Pi)
    lhs = theta(np.zeros(curve.genus), params) ** 8
    rhs = np.prod([np.linalg.det(A) ** 4 for A in periods.A_blocks]) / (2j * np.pi) ** (4 * (N - 1) * m)
    for group in (curve.even, curve.odd):
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                rhs *= (group[i] - group[j]) ** (2 * (N - 1))
    return complex(lhs), complex(rhs)


def thomae_check(curve_or_periods) -> float:
    periods = curve_or_periods if isinstance(curve_or_periods, PeriodData) else period_matrix(curve_or_periods)
    lhs, rhs = thomae_sides(periods)
    return float(abs(lhs - rhs) / abs(lhs))


# ---------------------------------------------------------------- Malgrange divisor

def riemann_vanishing_chars(periods: PeriodData, lams) -> Characteristics:
    """Real characteristic with theta[e](0) = 0, from g-1 points of C_+ on sheet 1.

    e = sum_i v(P_i) - K_infinity lies on the theta divisor (Riemann vanishing),
    with K_infinity as stored on the period data.
    """
    if len(lams) != periods.genus - 1:
        raise ValueError("need g - 1 points")
    w = sum(periods.norm @ abel_u(periods, lam) for lam in lams) - periods.K_inf
    eps, delta = periods.vector_to_chars(w)
    return Characteristics(eps, delta, "riemann vanishing")


@dataclass
class MalgrangeSample:
    chars: Characteristics
    theta_ratio: float      # |theta[e](0)| / theta(0)
    cancellation: float     # |theta[e](0)| / sum of |terms|


def malgrange_probe(periods: PeriodData, chars_list, params: ThetaParams | None = None) -> list:
    params = params or ThetaParams(periods.Pi)
    z0 = np.zeros(periods.genus)
    t0 = abs(theta(z0, params))
    out = []
    for ch in chars_list:
        val = abs(theta(z0, params, ch))
        out.append(MalgrangeSample(ch, val / t0, theta_cancellation(z0, params, ch)))
    return out
