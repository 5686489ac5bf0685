"""Riemann-Hilbert problem with quasi-permutation monodromy on the Z_N curve.

The jump matrices G_k act on the contour pieces (lam_k, lam_{k+1}) of L,
Y_- = Y_+ G_k. Odd pieces carry the quasi-permutations built from the
constants c, even pieces the diagonal matrices built from d. The solution
is the canonical solution X, which only knows about the cuts, dressed by
theta-function ratios whose characteristics encode c and d.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import curve as cv
from .curve import ZnCurve
from .errors import (BadArity, DomainError, OnCut, SolvabilityViolation, ThetaDenominatorZero,
                     ZeroConstant)
from .periods import Characteristics, PeriodData, abel_sheets, period_matrix
from .theta import ThetaParams, log_theta, theta_cancellation, theta_with_gradient

SOLVABILITY_TOL = 1e-10
DIVISOR_TOL = 1e-8


def quasi_permutation(N: int) -> np.ndarray:
    P = np.zeros((N, N), complex)
    P[0, N - 1] = (-1) ** (N - 1)
    for i in range(1, N):
        P[i, i - 1] = 1
    return P


def sigma_diag(N: int) -> np.ndarray:
    return (-N + 1 + 2 * np.arange(N)) / (2 * N)


def diagonalizer(N: int) -> np.ndarray:
    """U with first row of ones and columns the eigenvectors of the quasi-permutation.

    Column j is (1, mu_j^-1, ..., mu_j^-(N-1)) with mu_j = exp(2 pi i sigma_j).
    """
    mu = np.exp(2j * np.pi * sigma_diag(N))
    return mu[None, :] ** (-np.arange(N)[:, None])


@dataclass(frozen=True)
class MonodromySet:
    N: int
    m: int
    c: np.ndarray
    d: np.ndarray
    G: tuple          # G_0 .. G_{2m+2}
    M: tuple          # M_1 .. M_{2m+1}, M_inf
    P_N: np.ndarray
    sigma_N: np.ndarray
    U: np.ndarray

    @property
    def M_inf(self) -> np.ndarray:
        return self.M[-1]

    def cyclic_product(self) -> np.ndarray:
        out = np.eye(self.N, dtype=complex)
        for Mk in self.M:
            out = Mk @ out
        return out

    def is_reducible(self, tol: float = 1e-12) -> bool:
        """True when c_{k+sm} = xi_k^(s+1), d_{k+sm} = zeta_k for N-th roots xi_k, zeta_k."""
        N, m = self.N, self.m
        for k in range(m):
            cs = self.c[k::m]
            ds = self.d[k::m]
            xi = cs[0]
            if abs(xi ** N - 1) > tol or abs(ds[0] ** N - 1) > tol:
                return False
            if np.any(np.abs(cs - xi ** np.arange(1, N)) > tol) or np.any(np.abs(ds - ds[0]) > tol):
                return False
        return True


def build_monodromy(N: int, m: int, c, d) -> MonodromySet:
    c = np.asarray(c, dtype=complex).ravel()
    d = np.asarray(d, dtype=complex).ravel()
    g = (N - 1) * m
    if c.size != g or d.size != g:
        raise BadArity(f"need {g} constants c and {g} constants d")
    if np.any(c == 0) or np.any(d == 0):
        raise ZeroConstant("monodromy constants must be nonzero")
    P = quasi_permutation(N)
    eye = np.eye(N, dtype=complex)
    G = [eye]
    for k in range(1, m + 1):
        ck = c[k - 1::m]   # c_k, c_{k+m}, ..., c_{k+(N-2)m}
        Godd = np.zeros((N, N), complex)
        Godd[0, N - 1] = (-1) ** (N - 1) * ck[0]
        for i in range(1, N - 1):
            Godd[i, i - 1] = ck[i] / ck[i - 1]
        Godd[N - 1, N - 2] = 1 / ck[N - 2]
        dk = d[k - 1::m]
        G.append(Godd)
        G.append(np.diag(np.append(dk, 1 / np.prod(dk))))
    G.append(P)
    G.append(eye)
    M = tuple(G[k] @ np.linalg.inv(G[k - 1]) for k in range(1, 2 * m + 3))
    return MonodromySet(N, m, c, d, tuple(G), M, P, sigma_diag(N), diagonalizer(N))


def chars_from_constants(mono: MonodromySet) -> Characteristics:
    """Characteristics of the theta dressing, principal logarithms throughout."""
    N, m = mono.N, mono.m
    c, d = mono.c, mono.d
    eps = np.empty((N - 1) * m, complex)
    for s in range(N - 1):
        for k in range(m - 1):
            eps[k + s * m] = np.log(c[k + s * m] / c[k + 1 + s * m])
        eps[m - 1 + s * m] = np.log(c[m - 1 + s * m])
    eps /= 2j * np.pi
    delta = np.log(d) / (2j * np.pi)
    return Characteristics(eps, delta, "monodromy constants")


# ---------------------------------------------------------------- canonical solution

def _log_ratio(curve: ZnCurve, lam, side: int = 0) -> complex:
    lam = complex(lam)
    cut = cv.detect_cut(curve, lam)
    if cut and side == 0:
        raise OnCut("lambda lies on a cut; pass side=+1 or -1")
    return complex(cv.log_pq(curve, cv.diffs_at(curve, lam), cut, side if cut else 0))


def _check_base(curve: ZnCurve, lambda0):
    if curve.region(lambda0, tol=1e-12 * curve.span()) != 1:
        raise DomainError("lambda0 must lie strictly above the contour")
    if np.min(np.abs(curve.points - lambda0)) < 1e-12:
        raise DomainError("lambda0 must not be a branch point")


def canonical_X(curve: ZnCurve, lambda0, lam, side: int = 0) -> np.ndarray:
    """X = U ((p/q)(lam) (q/p)(lambda0))^sigma U^-1 with X(lambda0) = 1."""
    _check_base(curve, lambda0)
    if np.any(np.abs(curve.points - complex(lam)) == 0):
        raise DomainError("X is singular at the branch points")
    shift = _log_ratio(curve, lam, side) - _log_ratio(curve, lambda0)
    return _x_from_log(curve.N, shift)


def _x_from_log(N: int, shift: complex) -> np.ndarray:
    # X_rs = (1/N) sum_j mu_j^(s-r) exp(sigma_j shift)
    sig = sigma_diag(N)
    mu = np.exp(2j * np.pi * sig)
    r = np.arange(N)
    ph = mu[None, None, :] ** (r[None, :, None] - r[:, None, None])
    return np.sum(ph * np.exp(sig * shift)[None, None, :], axis=2) / N


def canonical_X_entry(curve: ZnCurve, lambda0, lam, r: int, s: int, side: int = 0) -> complex:
    """X_rs from the zero-characteristic Szego kernel, 1-based sheet labels."""
    from .kernels import szego_zero
    P = cv.sheeted_point(curve, lam, s, side)
    P0 = cv.sheeted_point(curve, lambda0, r)
    return szego_zero(curve, P, P0) * (complex(lam) - complex(lambda0))


# ---------------------------------------------------------------- full solution

@dataclass
class RHSolution:
    curve: ZnCurve
    periods: PeriodData
    monodromy: MonodromySet
    chars: Characteristics
    lambda0: complex
    params: ThetaParams
    _cache: dict = field(default_factory=dict, repr=False)

    @cached_property
    def theta_zero_ratio(self) -> complex:
        """log theta(0) - log theta[e](0)."""
        z = np.zeros(self.periods.genus)
        return log_theta(z, self.params) - log_theta(z, self.params, self.chars)

    @cached_property
    def base_sheets(self) -> np.ndarray:
        return abel_sheets(self.periods, self.lambda0)

    @cached_property
    def base_log(self) -> complex:
        return _log_ratio(self.curve, self.lambda0)

    def sheets(self, lam, side: int = 0) -> np.ndarray:
        key = (complex(lam), side)
        if key not in self._cache:
            self._cache[key] = abel_sheets(self.periods, lam, side)
        return self._cache[key]

    def _dress(self, X, V, check: bool = True) -> np.ndarray:
        N = self.curve.N
        V0 = self.base_sheets
        Y = np.empty((N, N), complex)
        for r in range(N):
            for s in range(N):
                w = V[s] - V0[r]
                if check and theta_cancellation(w, self.params) < DIVISOR_TOL:
                    raise ThetaDenominatorZero("sample point is on the theta divisor")
                lr = log_theta(w, self.params, self.chars) - log_theta(w, self.params)
                Y[r, s] = X[r, s] * np.exp(lr + self.theta_zero_ratio)
        return Y

    def dY(self, lam, side: int = 0) -> np.ndarray:
        """dY/dlam from the derivatives of X, of the Abel integrals and of theta."""
        curve = self.curve
        N = curve.N
        lam = complex(lam)
        shift = _log_ratio(curve, lam, side) - self.base_log
        sig = sigma_diag(N)
        dL = complex(np.sum(np.where(np.arange(len(curve.points)) % 2 == 0, 1, -1) / (lam - curve.points)))
        U = diagonalizer(N)
        Uinv = np.linalg.inv(U)
        E = np.exp(sig * shift)
        X = (U * E) @ Uinv
        dX = dL * (U * (sig * E)) @ Uinv
        y1 = cv.y_value(curve, lam, 1, side)
        V = self.sheets(lam, side)
        V0 = self.base_sheets
        out = np.empty((N, N), complex)
        for s in range(N):
            dv = self.periods.norm @ cv.du_coefficients(curve, np.array([lam]), np.array([y1]), s + 1)[:, 0]
            for r in range(N):
                w = V[s] - V0[r]
                te, ge = theta_with_gradient(w, self.params, self.chars)
                t0, g0 = theta_with_gradient(w, self.params)
                ratio = te / t0 * np.exp(self.theta_zero_ratio)
                out[r, s] = ratio * (dX[r, s] + X[r, s] * ((ge / te - g0 / t0) @ dv))
        return out

    def X(self, lam, side: int = 0) -> np.ndarray:
        return canonical_X(self.curve, self.lambda0, lam, side)

    def Y(self, lam, side: int = 0, check: bool = True) -> np.ndarray:
        lam = complex(lam)
        if side == 0 and self.curve.region(lam, tol=1e-13 * self.curve.span()) == 0:
            raise OnCut("lambda lies on the contour; pass side=+1 or -1")
        return self._dress(self.X(lam, side), self.sheets(lam, side), check)

    def jump_matrix(self, k: int) -> np.ndarray:
        return self.monodromy.G[k]


def solve_Y(curve: ZnCurve, monodromy: MonodromySet, lambda0, periods: PeriodData | None = None,
            chars: Characteristics | None = None, theta_tol: float = 1e-12) -> RHSolution:
    """Assemble the solution; ``chars`` overrides the characteristics derived from c, d."""
    if monodromy.N != curve.N or monodromy.m != curve.m:
        raise BadArity("monodromy data does not match the curve")
    lambda0 = complex(lambda0)
    _check_base(curve, lambda0)
    periods = periods or period_matrix(curve)
    params = ThetaParams(periods.Pi, tol=theta_tol)
    chars = chars or chars_from_constants(monodromy)
    z = np.zeros(periods.genus)
    if theta_cancellation(z, params, chars) < SOLVABILITY_TOL:
        raise SolvabilityViolation(
            "theta[eps, delta](0) vanishes: the monodromy data lies on the Malgrange divisor")
    return RHSolution(curve, periods, monodromy, chars, lambda0, params)


# ---------------------------------------------------------------- verification

def contour_samples(curve: ZnCurve, k: int, n: int = 10) -> np.ndarray:
    """n interior points of the contour piece (lam_k, lam_{k+1}), k = 0..2m+1."""
    pts = curve.points
    t = (np.arange(n) + 0.5) / n
    if k == 0:
        return pts[0] - curve.span() * (0.05 + 3 * t)
    if k == len(pts):
        return pts[-1] + curve.span() * (0.05 + 3 * t)
    a, b = pts[k - 1], pts[k]
    t = 0.04 + 0.92 * t
    return a + (b - a) * t


def jump_residuals(sol: RHSolution, n: int = 10) -> np.ndarray:
    """max |Y_- - Y_+ G_k| / |Y_+| over n samples on each contour piece."""
    out = []
    for k in range(len(sol.curve.points) + 1):
        G = sol.jump_matrix(k)
        worst = 0.0
        for lam in contour_samples(sol.curve, k, n):
            try:
                Yp = sol.Y(lam, 1)
                Ym = sol.Y(lam, -1)
            except ThetaDenominatorZero:
                # nudge along the contour and retry once
                lam = lam + 1e-3 * sol.curve.min_gap()
                Yp = sol.Y(lam, 1)
                Ym = sol.Y(lam, -1)
            worst = max(worst, np.max(np.abs(Ym - Yp @ G)) / max(1.0, np.max(np.abs(Yp))))
        out.append(worst)
    return np.array(out)


def _continued_log(points, path):
    """Continuous log(path - a) for each a, relative to the first path point."""
    d = path[None, :] - points[:, None]
    ang = np.unwrap(np.angle(d), axis=1)
    return np.log(np.abs(d)) + 1j * ang


def continue_loop(sol: RHSolution, center, radius: float, phi0: float, turns: int = -1,
                  npts: int = 400):
    """Continue Y along lam(t) = center + radius exp(i(phi0 + 2 pi turns t)), t in [0, 1].

    Each ingredient of the solution (log(p/q) and the sheet Abel integrals)
    is transported by quadrature of its derivative along the circle, with y
    followed continuously. Returns (Y at the start, continued Y at the end).
    """
    curve = sol.curve
    N = curve.N
    pts = curve.points
    start = complex(center) + radius * np.exp(1j * phi0)
    x, wts = np.polynomial.legendre.leggauss(npts)
    t = 0.5 * (x + 1)
    wts = 0.5 * wts
    # dense path for unwrapping the angles: start, nodes, end
    tt = np.concatenate([[0.0], t, [1.0]])
    path = complex(center) + radius * np.exp(1j * (phi0 + 2 * np.pi * turns * tt))
    logs = _continued_log(pts, path)
    rel = logs - logs[:, :1]
    expo = np.where(np.arange(len(pts)) % 2 == 0, 1, N - 1)
    sgn = np.where(np.arange(len(pts)) % 2 == 0, 1, -1)
    y_start = cv.y_value(curve, start, 1)
    y_path = y_start * np.exp((expo[:, None] * rel).sum(axis=0) / N)
    dlam = 2j * np.pi * turns * (path - complex(center))
    diffs = path[None, :] - pts[:, None]
    du = cv.du_coefficients(curve, path, y_path, 1, diffs)
    delta_u = (du[:, 1:-1] * dlam[None, 1:-1]) @ wts
    L_end = _log_ratio(curve, start) + (sgn * rel[:, -1]).sum()
    V = sol.sheets(start)
    Vc = np.array([V[s] + sol.periods.norm @ (cv.j_phases(curve, s) * delta_u) for s in range(N)])
    Y0 = sol.Y(start)
    Xc = _x_from_log(N, L_end - sol.base_log)
    Yc = sol._dress(Xc, Vc)
    return Y0, Yc, y_path[-1]


def _start_angle(curve: ZnCurve, center, radius):
    for phi in np.pi / 2 + np.array([0, 0.3, -0.3, 0.6, -0.6, 0.9, -0.9]):
        z = complex(center) + radius * np.exp(1j * phi)
        if curve.region(z, tol=0.05 * radius) == 1:
            return float(phi)
    raise DomainError("no start point above the contour on this loop")


def loop_radius(curve: ZnCurve, k: int) -> float:
    d = np.abs(curve.points - curve.points[k - 1])
    d[k - 1] = np.inf
    return float(np.min(d)) / 3


def monodromy_of_solution(sol: RHSolution, k: int, turns: int | None = None) -> np.ndarray:
    """Y(lam)^-1 Y(gamma_k(lam)) with gamma_k a loop around lam_k; k = 2m+2 is infinity.

    With Y_- = Y_+ G_k and C_+ above the contour, the product G_k G_(k-1)^-1
    belongs to a counterclockwise loop around a finite point, and the loop
    at infinity runs clockwise in lam (counterclockwise in 1/lam). These are
    the defaults; ``turns`` overrides the orientation.
    """
    curve = sol.curve
    n = len(curve.points)
    if turns is None:
        turns = -1 if k == n + 1 else 1
    if k == n + 1:
        center = complex(np.mean(curve.points))
        radius = 2 * float(np.max(np.abs(curve.points - center))) + curve.span()
    elif 1 <= k <= n:
        center = curve.points[k - 1]
        radius = loop_radius(curve, k)
    else:
        raise DomainError("loop index out of range")
    phi0 = _start_angle(curve, center, radius)
    Y0, Yc, _ = continue_loop(sol, center, radius, phi0, turns)
    return np.linalg.solve(Y0, Yc)


@dataclass
class ShiftReport:
    multipliers: list          # scalar c_k with M~_k = c_k M_k, k = 1..2m+1, infinity
    exponents: list            # j_k with c_k = exp(2 pi i j_k / N)
    scalar_residual: float     # how far M~_k M_k^-1 is from a multiple of the identity
    root_residual: float       # max |c_k^N - 1|
    exponent_sum: int          # sum over the finite points, mod N
    single_valued_residual: float


def shifted_solution(sol: RHSolution, shift: Characteristics) -> RHSolution:
    chars = sol.chars + shift
    return solve_Y(sol.curve, sol.monodromy, sol.lambda0, sol.periods, chars)


def shift_check(sol: RHSolution, shift: Characteristics) -> ShiftReport:
    """Compare the monodromy of the solution with that of the solution with shifted characteristics."""
    curve = sol.curve
    N = curve.N
    other = shifted_solution(sol, shift)
    mults, js = [], []
    scal = 0.0
    roots = 0.0
    sv = 0.0
    for k in range(1, len(curve.points) + 2):
        M = monodromy_of_solution(sol, k)
        Mt = monodromy_of_solution(other, k)
        R = Mt @ np.linalg.inv(M)
        c = np.trace(R) / N
        scal = max(scal, float(np.max(np.abs(R - c * np.eye(N)))))
        roots = max(roots, abs(c ** N - 1))
        mults.append(complex(c))
        js.append(int(np.round(np.angle(c) * N / (2 * np.pi))) % N)
        if k <= len(curve.points):
            sv = max(sv, _ratio_single_valued(sol, other, k))
    return ShiftReport(mults, js, scal, roots, sum(js[:-1]) % N, sv)


def _ratio_single_valued(sol: RHSolution, other: RHSolution, k: int) -> float:
    """(Y~_rs / Y_rs)^N continued around lam_k equals its value at the end point.

    Both solutions share X, so the ratio is the N-th power of a theta
    quotient in the sheet integrals; continuing it around the loop must land
    on the direct evaluation at the sheet reached.
    """
    curve = sol.curve
    N = curve.N
    center = curve.points[k - 1]
    radius = loop_radius(curve, k)
    phi0 = _start_angle(curve, center, radius)
    start = complex(center) + radius * np.exp(1j * phi0)
    Y0, Yc, y_end = continue_loop(sol, center, radius, phi0, 1)
    T0, Tc, _ = continue_loop(other, center, radius, phi0, 1)
    y1 = cv.y_value(curve, start, 1)
    # sheet reached from sheet 1
    shift_sheet = int(np.round(np.angle(y_end / y1) * N / (2 * np.pi))) % N
    worst = 0.0
    for r in range(N):
        for s in range(N):
            cont = (Tc[r, s] / Yc[r, s]) ** N
            s2 = (s + shift_sheet) % N
            direct = (T0[r, s2] / Y0[r, s2]) ** N
            worst = max(worst, abs(cont - direct) / max(abs(direct), 1e-300))
    return worst
