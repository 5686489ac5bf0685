"""The trigonal genus-2 case y^3 = (lam - l1)(lam - l3)(lam - l2)^2.

Here the Riemann matrix is [[2T, T], [T, 2T]] with a single modulus T given
by a ratio of hypergeometric functions, and the genus-2 theta function
splits into products of Jacobi theta functions of the two 3-isogenous
elliptic quotients. Everything in this module is expressed through T,
the theta constants of T and 3T, and the elliptic Abel integrals

    v_minus = int dv_1,    v_plus = int (dv_1 - 2 dv_2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Mapping, NamedTuple

import numpy as np

from . import curve as cv
from .curve import ZnCurve, make_curve
from .errors import BranchSelection, DuplicatePoints, StepUnderflow, ValidationError
from .numerics import gauss_2f1
from .periods import Characteristics, PeriodData, abel_u, period_matrix
from .rh import (MonodromySet, OnCut, _check_base, build_monodromy, canonical_X,
                 chars_from_constants)
from .theta import jacobi_theta

RHO = np.exp(2j * np.pi / 3)

# Unimodular lattice change n -> C n fixing Pi; C^3 = 1. It comes from the
# order-3 automorphism and turns the Jacobi splitting into one whose first
# factor carries v_plus and the second v_minus.
C_AUT = np.array([[0, 1], [-1, -1]])


def symplectic_block() -> np.ndarray:
    """The 4 x 4 integer symplectic matrix diag(C^2, C^t)."""
    out = np.zeros((4, 4), dtype=int)
    out[:2, :2] = np.linalg.matrix_power(C_AUT, 2)
    out[2:, 2:] = C_AUT.T
    return out


def riemann_matrix(T) -> np.ndarray:
    T = complex(T)
    return np.array([[2 * T, T], [T, 2 * T]])


# ---------------------------------------------------------------- periods

@dataclass(frozen=True)
class EllipticData:
    lambdas: tuple
    T: complex
    t: complex
    p: complex
    k2_plus: complex
    k2_minus: complex
    A1: complex
    B1: complex
    kappa: complex      # principal cube root of l3 - l1

    @property
    def Pi(self) -> np.ndarray:
        return riemann_matrix(self.T)

    @property
    def norm(self) -> np.ndarray:
        """dv = norm @ (du_1, du_2) with du_1 = d lam / y, du_2 = (lam - l2) d lam / y^2."""
        k = self.kappa
        return np.array([[1 / (1 - RHO), k / (1 - RHO)],
                         [RHO / (1 - RHO ** 2), k / (1 - RHO ** 2)]]) / self.A1

    def moduli_error(self) -> float:
        p = self.p
        km = (p + 1) ** 3 * (3 - p) / (16 * p)
        kp = (p + 1) * (3 - p) ** 3 / (16 * p ** 3)
        return float(max(abs(km - self.k2_minus), abs(kp - self.k2_plus)))


def cross_ratio(l1, l2, l3) -> complex:
    l1, l2, l3 = complex(l1), complex(l2), complex(l3)
    if min(abs(l1 - l2), abs(l2 - l3), abs(l1 - l3)) < 1e-12 * max(1.0, abs(l1), abs(l2), abs(l3)):
        raise DuplicatePoints("branch points must be distinct")
    return (l2 - l1) / (l3 - l1)


def T_of_t(t) -> complex:
    t = complex(t)
    return 1j / np.sqrt(3) * gauss_2f1(1 / 3, 2 / 3, 1, 1 - t) / gauss_2f1(1 / 3, 2 / 3, 1, t)


def periods_n3m1(lambda1, lambda2, lambda3) -> EllipticData:
    t = cross_ratio(lambda1, lambda2, lambda3)
    kappa = complex(lambda3 - lambda1) ** (1 / 3)
    A1 = 2 * np.pi / np.sqrt(3) * (1 - RHO ** 2) / kappa * gauss_2f1(1 / 3, 2 / 3, 1, t)
    B1 = 2j * np.pi / kappa * gauss_2f1(1 / 3, 2 / 3, 1, 1 - t)
    T = complex(B1 / ((1 - RHO) * A1))
    if T.imag <= 0:
        raise ValidationError("cross-ratio outside the range where Im T > 0")
    p, kp, km = p_and_moduli(T)
    return EllipticData(tuple(complex(x) for x in (lambda1, lambda2, lambda3)),
                        T, t, p, kp, km, complex(A1), complex(B1), complex(kappa))


# ---------------------------------------------------------------- modular relations

def _theta3_fourth(T):
    return jacobi_theta(3, 0, 3 * T) ** 4, jacobi_theta(3, 0, T) ** 4


def t_of_T(T) -> complex:
    """Inverse of T_of_t through theta constants of T and 3T."""
    a, b = _theta3_fourth(complex(T))
    return complex(27 * a * (a - b) ** 2 / (3 * a + b) ** 3)


def t_of_p(p) -> complex:
    p = complex(p)
    return p ** 2 * (p ** 2 - 9) ** 2 / (p ** 2 + 3) ** 3


def moduli_of_p(p):
    """(k_plus^2, k_minus^2) of the two Legendre quotients."""
    p = complex(p)
    return (p + 1) * (3 - p) ** 3 / (16 * p ** 3), (p + 1) ** 3 * (3 - p) / (16 * p)


class Moduli(NamedTuple):
    p: complex
    k2_plus: complex
    k2_minus: complex


def p_and_moduli(T) -> Moduli:
    T = complex(T)
    if T.imag <= 0:
        raise ValidationError("Im T must be positive")
    p = complex(3 * jacobi_theta(3, 0, 3 * T) ** 2 / jacobi_theta(3, 0, T) ** 2)
    return Moduli(p, *moduli_of_p(p))


def t_from_third_characteristic(T) -> complex:
    """1 - (theta[(2/3, 1/3), 0](0) / theta(0))^3 on the genus-2 Riemann matrix."""
    z = np.zeros(2)
    ratio = decompose_theta(z, ((2 / 3, 1 / 3), (0, 0)), T) / decompose_theta(z, None, T)
    return complex(1 - ratio ** 3)


# ---------------------------------------------------------------- theta splitting

def _split_chars(chars):
    if chars is None:
        return np.zeros(2, complex), np.zeros(2, complex)
    if isinstance(chars, Characteristics):
        return np.asarray(chars.eps, complex), np.asarray(chars.delta, complex)
    return np.asarray(chars[0], complex), np.asarray(chars[1], complex)


def jacobi_pair(e1, e2, T) -> complex:
    """theta_3(e1; 6T) theta_3(e2; 2T) + theta_2(e1; 6T) theta_2(e2; 2T)."""
    return (jacobi_theta(3, e1, 6 * T) * jacobi_theta(3, e2, 2 * T)
            + jacobi_theta(2, e1, 6 * T) * jacobi_theta(2, e2, 2 * T))


def decompose_theta(z, chars, T) -> complex:
    """Genus-2 theta[eps, delta](z; [[2T, T], [T, 2T]]) through Jacobi thetas."""
    T = complex(T)
    z = np.asarray(z, complex).reshape(2)
    eps, delta = _split_chars(chars)
    Pi = riemann_matrix(T)
    pre = np.exp(1j * np.pi * delta @ Pi @ delta + 2j * np.pi * (z + eps) @ delta)
    e1 = z[0] + z[1] + eps[0] + eps[1] + 3 * T * (delta[0] + delta[1])
    e2 = z[0] - z[1] + eps[0] - eps[1] + T * (delta[0] - delta[1])
    return complex(pre * jacobi_pair(e1, e2, T))


def transformed_arguments(v_plus, v_minus, chars, T):
    """Jacobi arguments after the lattice change by C.

    Returns (e1, e2) with theta[e](z) = exp(...) * jacobi_pair(e1, e2, T)
    where z = (v_minus, (v_minus - v_plus)/2).
    """
    eps, delta = _split_chars(chars)
    e1 = v_plus + eps[0] - 2 * eps[1] - 3 * T * delta[1]
    e2 = v_minus + eps[0] + T * (2 * delta[0] + delta[1])
    return e1, e2


def projections(w) -> tuple:
    """(v_plus, v_minus) from a normalized Abel vector w."""
    w = np.asarray(w, complex)
    return w[0] - 2 * w[1], w[0]


# ---------------------------------------------------------------- covering data

def hyperelliptic_image(lambdas, lam, y):
    """(xi, w) on w^2 = xi^6 + 2(l1 + l3 - 2 l2) xi^3 + (l1 - l3)^2."""
    l1, l2, l3 = (complex(x) for x in lambdas)
    lam = complex(lam)
    xi = y / (lam - l2)
    w = (lam ** 2 - 2 * l2 * lam + l2 * (l1 + l3) - l1 * l3) / (lam - l2)
    return xi, w


def cover_residual(lambdas, lam, y) -> float:
    l1, l2, l3 = (complex(x) for x in lambdas)
    xi, w = hyperelliptic_image(lambdas, lam, y)
    rhs = xi ** 6 + 2 * (l1 + l3 - 2 * l2) * xi ** 3 + (l1 - l3) ** 2
    return float(abs(w ** 2 - rhs) / max(abs(w) ** 2, abs(rhs), 1.0))


def quotient_beta_periods(data: EllipticData, periods: PeriodData):
    """beta-periods of dv_plus and dv_minus over the images of beta_2.

    The images are -beta_plus and beta_minus, so the values are 3T and T.
    """
    B = data.norm @ periods.bmat
    return complex(-(B[0, 1] - 2 * B[1, 1])), complex(B[0, 1])


# ---------------------------------------------------------------- RH solution

@dataclass
class JacobiRH:
    """The 3 x 3 RH solution written through Jacobi thetas of 6T and 2T."""

    curve: ZnCurve
    data: EllipticData
    periods: PeriodData
    monodromy: MonodromySet
    chars: Characteristics
    lambda0: complex
    _cache: dict = field(default_factory=dict, repr=False)

    def elliptic_integrals(self, lam, side: int = 0) -> np.ndarray:
        """Rows s = 1..3: (v_plus, v_minus) from infinity to (lam, sheet s)."""
        key = (complex(lam), side)
        if key not in self._cache:
            u = abel_u(self.periods, lam, side)
            rows = []
            for s in range(3):
                w = self.data.norm @ (cv.j_phases(self.curve, s) * u)
                rows.append(projections(w))
            self._cache[key] = np.array(rows)
        return self._cache[key]

    def _theta_ratio(self, vp, vm) -> complex:
        T = self.data.T
        delta = np.asarray(self.chars.delta, complex)
        z = np.array([vm, (vm - vp) / 2])
        e1, e2 = transformed_arguments(vp, vm, self.chars, T)
        f1, f2 = transformed_arguments(0, 0, self.chars, T)
        num = np.exp(2j * np.pi * z @ delta) * jacobi_pair(e1, e2, T) * jacobi_pair(0, 0, T)
        den = jacobi_pair(vp, vm, T) * jacobi_pair(f1, f2, T)
        return complex(num / den)

    def Y(self, lam, side: int = 0) -> np.ndarray:
        lam = complex(lam)
        if side == 0 and self.curve.region(lam, tol=1e-13 * self.curve.span()) == 0:
            raise OnCut("lambda lies on the contour; pass side=+1 or -1")
        X = canonical_X(self.curve, self.lambda0, lam, side)
        E = self.elliptic_integrals(lam, side)
        E0 = self.elliptic_integrals(self.lambda0)
        Y = np.empty((3, 3), complex)
        for r in range(3):
            for s in range(3):
                vp, vm = E[s] - E0[r]
                Y[r, s] = X[r, s] * self._theta_ratio(vp, vm)
        return Y


def jacobi_solution(lambdas, c, d, lambda0, periods: PeriodData | None = None) -> JacobiRH:
    if len(lambdas) != 3:
        raise ValidationError("need exactly three finite branch points")
    curve = make_curve(3, lambdas)
    lambda0 = complex(lambda0)
    _check_base(curve, lambda0)
    mono = build_monodromy(3, 1, c, d)
    data = periods_n3m1(*curve.points)
    periods = periods or period_matrix(curve)
    return JacobiRH(curve, data, periods, mono, chars_from_constants(mono), lambda0)


def Y_jacobi(lam, config, side: int = 0) -> np.ndarray:
    """Y(lam) from a JacobiRH or a mapping with lambdas, c, d, lambda0."""
    if not isinstance(config, JacobiRH):
        if not isinstance(config, Mapping):
            raise ValidationError("config must be a JacobiRH or a mapping")
        config = jacobi_solution(config["lambdas"], config["c"], config["d"], config["lambda0"])
    return config.Y(lam, side)


# ---------------------------------------------------------------- Halphen / Schwarz

def contour_derivatives(f, x0, h: float, order: int = 3, npts: int = 48) -> np.ndarray:
    """f, f', ..., f^(order) at x0 from samples on the circle |x - x0| = h.

    Spectrally accurate for f analytic in a disc somewhat larger than h.
    """
    if not h > 1e-8 * max(1.0, abs(x0)):
        raise StepUnderflow("contour radius too small for the requested derivatives")
    ang = 2 * np.pi * np.arange(npts) / npts
    vals = np.array([f(x0 + h * np.exp(1j * a)) for a in ang])
    return np.array([factorial(k) * np.mean(vals * np.exp(-1j * k * ang)) / h ** k
                     for k in range(order + 1)])


class HalphenReport(NamedTuple):
    omega: np.ndarray
    halphen_residual: float
    schwarzian_residual: float
    R: complex


def schwarz_potential(t, alpha, beta, gamma) -> complex:
    return ((1 - beta ** 2) / t ** 2 + (1 - gamma ** 2) / (t - 1) ** 2
            + (beta ** 2 + gamma ** 2 - alpha ** 2 - 1) / (t * (t - 1)))


def halphen_check(T, h: float | None = None, alpha: float = 1 / 3, beta: float = 0.0,
                  gamma: float = 0.0, npts: int = 48) -> HalphenReport:
    """Residuals of the Schwarz equation and the general Halphen system for t(T).

    omega_1 = -1/2 (log t'/(t(t-1)))', omega_2 = -1/2 (log t'/(t-1))',
    omega_3 = -1/2 (log t'/t)'; derivatives of t come from a circle of
    radius h around T (default Im T / 10).
    """
    T = complex(T)
    if T.imag <= 0:
        raise ValidationError("Im T must be positive")
    if h is None:
        h = 0.1 * T.imag
    if h >= T.imag:
        raise ValidationError("contour radius must stay inside the upper half-plane")
    t, t1, t2, t3 = contour_derivatives(t_of_T, T, h, 3, npts)
    schwarzian = t3 / t1 - 1.5 * (t2 / t1) ** 2
    schwarz_res = abs(schwarzian + t1 ** 2 / 2 * schwarz_potential(t, alpha, beta, gamma))

    q, dq = t2 / t1, t3 / t1 - (t2 / t1) ** 2
    a, da = t1 / t, t2 / t - (t1 / t) ** 2
    b, db = t1 / (t - 1), t2 / (t - 1) - (t1 / (t - 1)) ** 2
    w1, w2, w3 = -0.5 * (q - a - b), -0.5 * (q - b), -0.5 * (q - a)
    dw = np.array([-0.5 * (dq - da - db), -0.5 * (dq - db), -0.5 * (dq - da)])
    R = (alpha ** 2 * (w1 - w2) * (w3 - w1) + beta ** 2 * (w2 - w3) * (w1 - w2)
         + gamma ** 2 * (w3 - w1) * (w2 - w3))
    rhs = np.array([w2 * w3 - w1 * (w2 + w3), w1 * w3 - w2 * (w1 + w3), w1 * w2 - w3 * (w1 + w2)]) + R
    return HalphenReport(np.array([w1, w2, w3]), float(np.max(np.abs(dw - rhs))),
                         float(schwarz_res), complex(R))


# ---------------------------------------------------------------- Goursat

class GoursatReport(NamedTuple):
    lhs: complex
    rhs: complex
    residual: float
    p: complex
    roundtrip: float


def _p_roots(t):
    # p^2 (p^2 - 9)^2 - t (p^2 + 3)^3
    poly = np.polymul([1, 0, 0], np.polymul([1, 0, -9], [1, 0, -9]))
    cube = np.polymul([1, 0, 3], np.polymul([1, 0, 3], [1, 0, 3]))
    return np.roots(np.polysub(poly, complex(t) * cube))


def p_branch(t, steps: int = 200) -> complex:
    """Root of t(p) = t continued from p = sqrt(3) at t = 1/2 along a straight path."""
    t = complex(t)
    p = np.sqrt(3) + 0j
    for s in np.linspace(0, 1, steps + 1)[1:]:
        roots = _p_roots(0.5 + s * (t - 0.5))
        d = np.abs(roots - p)
        order = np.argsort(d)
        if d[order[1]] < 3 * d[order[0]] or d[order[1]] < 1e-9:
            raise BranchSelection("p-roots collide along the continuation path")
        p = roots[order[0]]
    if abs(t_of_p(p) - t) > 1e-9 * max(1.0, abs(t)):
        raise BranchSelection("continued root does not reproduce t")
    return complex(p)


def goursat_check(t) -> GoursatReport:
    """(2/sqrt 3) F(1/3, 2/3; 1; t) against (1/2)(p^2+3)/p^(3/2) F(1/2, 1/2; 1; k_plus^2)."""
    t = complex(t)
    if t in (0, 1):
        raise ValidationError("t must avoid 0 and 1")
    p = p_branch(t)
    kp, _ = moduli_of_p(p)
    lhs = 2 / np.sqrt(3) * gauss_2f1(1 / 3, 2 / 3, 1, t)
    rhs = 0.5 * (p ** 2 + 3) / p ** 1.5 * gauss_2f1(0.5, 0.5, 1, kp)
    return GoursatReport(complex(lhs), complex(rhs), float(abs(lhs - rhs) / abs(lhs)), p,
                         float(abs(t_of_p(p) - t)))


# ---------------------------------------------------------------- tau

def tau_n3m1(lambdas, c, d) -> complex:
    """Jacobi-theta form of the tau function for constants c, d (principal logs)."""
    l1, l2, l3 = (complex(x) for x in lambdas)
    data = periods_n3m1(l1, l2, l3)
    c, d = np.asarray(c, complex), np.asarray(d, complex)
    if c.shape != (2,) or d.shape != (2,) or np.any(c == 0) or np.any(d == 0):
        raise ValidationError("need two nonzero constants c and two nonzero constants d")
    eps = np.log(c) / (2j * np.pi)
    delta = np.log(d) / (2j * np.pi)
    pre = ((l1 - l3) / ((l1 - l2) * (l2 - l3))) ** (2 / 9)
    return complex(pre * decompose_theta(np.zeros(2), (eps, delta), data.T)
                   / jacobi_pair(0, 0, data.T))


def tau_distance(a, b) -> float:
    """Relative distance of two tau values modulo ninth roots of unity.

    The 2/9 power in the prefactor can be taken of the whole ratio or pair by
    pair; the two conventions differ by a ninth root of unity.
    """
    w = np.exp(2j * np.pi * np.arange(9) / 9)
    return float(np.min(np.abs(complex(a) - w * complex(b))) / abs(complex(b)))
