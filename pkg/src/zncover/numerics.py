"""Numerical substrate: endpoint-singular quadrature, Gauss 2F1, root tracking."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import AmbiguousMatching, DomainError, NonConvergence, ValidationError


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy request for :func:`integrate_segment`.

    ``endpoint_exponents`` bounds the integrand like ``u**alpha * (1-u)**beta``
    near the two ends; it only sets how far into the endpoints the nodes reach.
    """

    abs_tol: float = 1e-12
    max_subdivisions: int = 6
    endpoint_exponents: tuple = (0.0, 0.0)
    max_level: int = 9

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValidationError("abs_tol must be positive")
        if min(self.endpoint_exponents) <= -1:
            raise ValidationError("endpoint exponents must exceed -1")


@dataclass(frozen=True)
class PathSpec:
    vertices: tuple
    start_sheet: int = 1
    min_clearance: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(complex(v) for v in self.vertices))
        if len(self.vertices) < 1:
            raise ValidationError("path needs at least one vertex")


DEFAULT_SPEC = QuadratureSpec()


def _t_max(alpha, abs_tol):
    # distance to the endpoint below which the neglected piece of u**alpha is tiny
    a1 = 1.0 + alpha
    log_umin = (math.log(1e-3 * abs_tol * a1)) / a1
    log_umin = max(log_umin, -650.0)
    umax = -0.5 * log_umin
    return math.asinh(2.0 * umax / math.pi)


def _ts_points(t):
    """Map tanh-sinh abscissae t to (u, 1-u, du/dt) on [0, 1] without cancellation."""
    s = 0.5 * math.pi * np.sinh(t)
    e = np.exp(-2.0 * np.abs(s))
    small = e / (1.0 + e)
    big = 1.0 / (1.0 + e)
    u = np.where(s >= 0, big, small)
    uc = np.where(s >= 0, small, big)
    w = math.pi * np.cosh(t) * e / (1.0 + e) ** 2
    return u, uc, w


def _tanh_sinh(f, spec, tmin, tmax):
    h = 0.5
    t = np.arange(math.ceil(tmin / h), math.floor(tmax / h) + 1) * h
    u, uc, w = _ts_points(t)
    vals = w * f(u, uc)
    total = np.sum(vals, axis=-1)
    mass = np.sum(np.abs(vals), axis=-1)
    est = h * total
    for _ in range(spec.max_level):
        h /= 2
        k = np.arange(math.ceil(tmin / h), math.floor(tmax / h) + 1)
        k = k[k % 2 != 0]
        u, uc, w = _ts_points(k * h)
        vals = w * f(u, uc)
        total = total + np.sum(vals, axis=-1)
        mass = mass + np.sum(np.abs(vals), axis=-1)
        new = h * total
        err = float(np.max(np.abs(new - est)))
        est = new
        # differences at the rounding level of the node sum count as converged
        floor = float(np.max(64 * np.finfo(float).eps * h * mass))
        if err <= max(spec.abs_tol, floor):
            return est, min(err, spec.abs_tol)
    return est, err


def integrate_segment(f: Callable, a: complex, b: complex, spec: QuadratureSpec = DEFAULT_SPEC):
    """Integrate along the straight segment from ``a`` to ``b``.

    ``f(u, uc)`` receives the fractional position ``u`` in (0, 1) and its
    complement ``uc = 1 - u`` (computed without cancellation), both as arrays.
    The result is ``(b - a) * int_0^1 f du``; ``f`` may return an array whose
    last axis runs over the nodes (vector-valued integrands). Endpoint singularities of
    algebraic type are handled by the double-exponential change of variables.
    """
    a = complex(a)
    b = complex(b)
    tl = _t_max(spec.endpoint_exponents[0], spec.abs_tol)
    tr = _t_max(spec.endpoint_exponents[1], spec.abs_tol)
    val, err = _adaptive(f, spec, -tl, tr, spec.abs_tol, spec.max_subdivisions)
    return (b - a) * val


def _adaptive(f, spec, tmin, tmax, tol, depth):
    sub = QuadratureSpec(tol, spec.max_subdivisions, spec.endpoint_exponents, spec.max_level)
    val, err = _tanh_sinh(f, sub, tmin, tmax)
    if err <= tol:
        return val, err
    if depth <= 0:
        raise NonConvergence(f"quadrature stalled with error estimate {err:.3g} > {tol:.3g}")

    def left(u, uc):
        return 0.5 * f(0.5 * u, 0.5 + 0.5 * uc)

    def right(u, uc):
        return 0.5 * f(0.5 + 0.5 * u, 0.5 * uc)

    # the halves are singular at one end only; the split point is regular
    v1, e1 = _adaptive(left, spec, tmin, _t_max(0.0, tol), tol / 2, depth - 1)
    v2, e2 = _adaptive(right, spec, -_t_max(0.0, tol), tmax, tol / 2, depth - 1)
    return v1 + v2, e1 + e2


def integrate_function(g: Callable, a: complex, b: complex, spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """Convenience wrapper: integrate ``g(lam)`` over the segment [a, b]."""
    a = complex(a)
    b = complex(b)
    return integrate_segment(lambda u, uc: g(a + (b - a) * u), a, b, spec)


# ---------------------------------------------------------------- 2F1

def _series_2f1(a, b, c, z, deriv=False):
    term = 1.0 + 0j
    s = term
    ds = 0j
    n = 0
    quiet = 0
    while n < 5000:
        # term_{n+1} / term_n
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        n += 1
        s += term
        if deriv and z != 0:
            ds += n * term / z
        if abs(term) <= 1e-17 * abs(s):
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
        if term == 0:
            break
    else:
        raise NonConvergence("hypergeometric series did not converge")
    if deriv:
        if z == 0:
            ds = a * b / c
        return s, ds
    return s


def _taylor_step(a, b, c, zeta, f0, f1, h):
    """Advance (F, F') from zeta to zeta + h using the ODE's Taylor recurrence."""
    p2 = zeta * (1 - zeta)
    p2l = 1 - 2 * zeta
    p1 = c - (a + b + 1) * zeta
    ab1 = a + b + 1
    # d[n] = n-th Taylor coefficient times h**n, kept scaled to avoid overflow
    d = [f0, f1 * h]
    val = d[0] + d[1]
    dval = d[1]
    n = 0
    quiet = 0
    while n < 2000:
        d_next = -((p2l * (n + 1) * n + p1 * (n + 1)) * d[n + 1] * h
                   - (n * (n - 1) + ab1 * n + a * b) * d[n] * h * h) / (p2 * (n + 2) * (n + 1))
        d.append(d_next)
        val += d_next
        dval += (n + 2) * d_next
        n += 1
        if abs(d_next) * (n + 2) <= 1e-17 * min(abs(val), abs(dval)):
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
    else:
        raise NonConvergence("Taylor stepping of the hypergeometric ODE did not converge")
    return val, dval / h


def _log_case_near_one(a, b, z):
    # c = a + b: logarithmic connection formula around z = 1
    w = 1 - z
    lw = np.log(w)
    pa = complex(special.digamma(a))
    pb = complex(special.digamma(b))
    p1 = -np.euler_gamma
    coef = 1.0 + 0j
    s = 0j
    quiet = 0
    for n in range(5000):
        term = coef * (2 * p1 - pa - pb - lw)
        s += term
        if abs(term) <= 1e-17 * abs(s):
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
        coef *= (a + n) * (b + n) / ((n + 1) ** 2) * w
        p1 += 1.0 / (n + 1)
        pa += 1.0 / (a + n)
        pb += 1.0 / (b + n)
    else:
        raise NonConvergence("logarithmic series did not converge")
    return complex(special.gamma(a + b) / (special.gamma(a) * special.gamma(b))) * s


def gauss_2f1(a: complex, b: complex, c: complex, z: complex) -> complex:
    """Principal branch of the Gauss hypergeometric function F(a, b; c; z).

    Direct series for |z| <= 1/2, Pfaff transformation when |z/(z-1)| <= 1/2,
    otherwise analytic continuation along the ray from 0 by Taylor stepping
    of the hypergeometric equation (this covers the neighbourhood of
    z = exp(+-i pi/3) where every connection formula has modulus one).
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if c.imag == 0 and c.real <= 0 and float(c.real).is_integer():
        raise DomainError("c must not be a non-positive integer")
    if z.imag == 0 and z.real >= 1:
        raise DomainError("z lies on the branch cut [1, inf)")
    if abs(z) <= 0.5:
        return _series_2f1(a, b, c, z)
    w = z / (z - 1)
    if abs(w) <= 0.5:
        return (1 - z) ** (-a) * _series_2f1(a, c - b, c, w)
    if abs(1 - z) <= 0.5 and abs(c - a - b) < 1e-14:
        return _log_case_near_one(a, b, z)
    z1 = 0.5 * z / abs(z)
    f0, f1 = _series_2f1(a, b, c, z1, deriv=True)
    zeta = z1
    for _ in range(10000):
        rest = z - zeta
        if rest == 0:
            return f0
        # both 0 and 1 are singular points of the equation
        r = 0.5 * min(abs(zeta), abs(1 - zeta))
        h = rest if abs(rest) <= r else rest / abs(rest) * r
        f0, f1 = _taylor_step(a, b, c, zeta, f0, f1, h)
        zeta = zeta + h
        if h == rest:
            return f0
    raise NonConvergence("too many continuation steps")


def gauss_2f1_derivative(a, b, c, z):
    return a * b / c * gauss_2f1(a + 1, b + 1, c + 1, z)


# ---------------------------------------------------------------- root tracking

def _match(old, new):
    """Nearest-neighbour pairing; returns permutation idx with new[idx[i]] ~ old[i]."""
    d = np.abs(old[:, None] - new[None, :])
    idx = np.argmin(d, axis=1)
    if len(set(idx.tolist())) != len(idx):
        return None, np.inf
    drift = np.max(d[np.arange(len(old)), idx])
    return idx, drift


def _separation(vals):
    if len(vals) < 2:
        return np.inf
    d = np.abs(vals[:, None] - vals[None, :])
    d[np.diag_indices(len(vals))] = np.inf
    return np.min(d)


def track_root(path: PathSpec, curve_values: Callable[[complex], Sequence[complex]], guard: float = 10.0):
    """Continue the roots returned by ``curve_values`` along a polygonal path.

    ``curve_values(lam)`` gives the N candidates in a fixed labelling (sheet
    order). Returns the continued value of the root that started on
    ``path.start_sheet`` and the induced permutation as a list ``perm`` with
    ``perm[s-1]`` the label at the end of the root that started with label ``s``.
    """
    verts = path.vertices
    cur = np.asarray(curve_values(verts[0]), dtype=complex)
    n = len(cur)
    pos = cur.copy()
    for v0, v1 in zip(verts[:-1], verts[1:]):
        length = abs(v1 - v0)
        if length == 0:
            continue
        s = 0.0
        step = 1.0 / 16
        while s < 1.0:
            ds = min(step, 1.0 - s)
            lam = v0 + (v1 - v0) * (s + ds)
            new = np.asarray(curve_values(lam), dtype=complex)
            idx, drift = _match(pos, new)
            if idx is not None and _separation(new) >= guard * drift:
                pos = new[idx]
                s += ds
                step = min(2 * step, 1.0 / 16)
            else:
                step = ds / 2
                if step * length < 1e-13 * max(1.0, length):
                    raise AmbiguousMatching("candidate roots too close; refine the path")
    end = np.asarray(curve_values(verts[-1]), dtype=complex)
    idx, _ = _match(pos, end)
    if idx is None:
        raise AmbiguousMatching("final matching is not a bijection")
    perm = [int(idx[i]) + 1 for i in range(n)]
    start = path.start_sheet - 1
    return end[idx[start]], perm
