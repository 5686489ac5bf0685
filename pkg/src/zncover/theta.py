"""Riemann theta functions with complex characteristics.

theta[eps, delta](z; Pi) = sum_n exp(pi i <Pi(n+delta), n+delta> + 2 pi i <z+eps, n+delta>)

The characteristic is first absorbed into the argument,

    theta[eps, delta](z) = exp(pi i <Pi delta, delta> + 2 pi i <z+eps, delta>) theta(z + eps + Pi delta),

and the plain theta series is summed over the integer points of an ellipsoid
centred at -Im(Pi)^-1 Im(w), where the Gaussian weight peaks.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import IllConditioned, ValidationError


class ThetaParams:
    """Riemann matrix plus the lattice points needed for a target accuracy."""

    def __init__(self, Pi, tol: float = 1e-12, trunc_radius: float | None = None):
        Pi = np.atleast_2d(np.asarray(Pi, dtype=complex))
        if Pi.shape[0] != Pi.shape[1]:
            raise ValidationError("Pi must be square")
        Y = 0.5 * (Pi.imag + Pi.imag.T)
        lam_min = float(np.min(np.linalg.eigvalsh(Y)))
        if lam_min < 1e-8:
            raise IllConditioned("Im Pi is not safely positive definite")
        self.Pi = Pi
        self.g = Pi.shape[0]
        self.tol = tol
        self.Y = Y
        self.Yinv = np.linalg.inv(Y)
        # Y = T^t T, T upper triangular
        self.T = np.linalg.cholesky(Y).T
        self.trunc_radius = trunc_radius if trunc_radius is not None else self._radius(lam_min)

    def _radius(self, lam_min):
        # Gaussian tail bound for the lattice sum in the sqrt(pi) T-scaled norm:
        # err <= g/2 (2/r)^g Gamma(g/2, (R - r/2)^2), r a lower bound on the shortest vector
        g = self.g
        r = math.sqrt(math.pi * lam_min)

        def bound(R):
            x = (R - r / 2) ** 2
            return g / 2 * (2 / r) ** g * special.gammaincc(g / 2, x) * special.gamma(g / 2)

        lo, hi = r / 2, max(r, 1.0)
        while bound(hi) > self.tol:
            lo, hi = hi, 2 * hi
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if bound(mid) > self.tol else (lo, mid)
        # the bound is in the sqrt(pi)-scaled norm; convert to the T norm
        return hi / math.sqrt(math.pi)

    def points(self, c) -> np.ndarray:
        """Integer vectors n with |T (n - c)| <= trunc_radius (Fincke-Pohst, vectorized)."""
        g, T, R2 = self.g, self.T, self.trunc_radius ** 2
        c = np.asarray(c, dtype=float)
        part = np.zeros((1, g))
        rest = np.zeros(1)
        for i in range(g - 1, -1, -1):
            tail = (part[:, i + 1:] - c[i + 1:]) @ T[i, i + 1:]
            mid = c[i] - tail / T[i, i]
            half = np.sqrt(np.maximum(R2 - rest, 0.0)) / T[i, i]
            lo = np.ceil(mid - half)
            cnt = np.maximum(np.floor(mid + half) - lo + 1, 0).astype(int)
            idx = np.repeat(np.arange(len(part)), cnt)
            step = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            part = part[idx]
            part[:, i] = lo[idx] + step
            rest = rest[idx] + (T[i, i] * (part[:, i] - c[i]) + tail[idx]) ** 2
        return part


def _as_chars(chars, g):
    if chars is None:
        z = np.zeros(g, complex)
        return z, z
    eps = np.asarray(getattr(chars, "eps", None) if hasattr(chars, "eps") else chars[0], dtype=complex)
    delta = np.asarray(getattr(chars, "delta", None) if hasattr(chars, "delta") else chars[1], dtype=complex)
    if eps.shape != (g,) or delta.shape != (g,):
        raise ValidationError("characteristic length does not match the genus")
    return eps, delta


def _lattice(params: ThetaParams, w):
    """Points n, log of the plain theta terms at w, and the log scale removed."""
    Pi = params.Pi
    c = -params.Yinv @ w.imag
    n = params.points(c)
    expo = 1j * np.pi * np.einsum("ij,jk,ik->i", n, Pi, n) + 2j * np.pi * (n @ w)
    return n, expo


def _terms(z, params, chars):
    g = params.g
    z = np.asarray(z, dtype=complex).reshape(g)
    eps, delta = _as_chars(chars, g)
    w = z + eps + params.Pi @ delta
    n, expo = _lattice(params, w)
    lead = 1j * np.pi * delta @ params.Pi @ delta + 2j * np.pi * (z + eps) @ delta
    shift = float(np.max(expo.real))
    terms = np.exp(expo - shift)
    return n + delta[None, :], terms, lead + shift


def theta(z, params: ThetaParams, chars=None) -> complex:
    """theta[eps, delta](z; Pi); ``chars`` is a Characteristics or an (eps, delta) pair."""
    _, terms, logscale = _terms(z, params, chars)
    return complex(np.exp(logscale) * np.sum(terms))


def log_theta(z, params: ThetaParams, chars=None) -> complex:
    """log of theta (branch unspecified), safe against overflow of the prefactor."""
    _, terms, logscale = _terms(z, params, chars)
    return complex(logscale + np.log(np.sum(terms)))


def theta_derivatives(z, params: ThetaParams, chars=None, order: int = 1):
    """Gradient, Hessian or third-derivative tensor (order 1, 2, 3) in z, term by term."""
    nd, terms, logscale = _terms(z, params, chars)
    scale = np.exp(logscale)
    k = 2j * np.pi * nd
    if order == 1:
        return scale * (k.T @ terms)
    if order == 2:
        return scale * np.einsum("i,ij,ik->jk", terms, k, k)
    if order == 3:
        return scale * np.einsum("i,ij,ik,il->jkl", terms, k, k, k)
    raise ValidationError("order must be 1, 2 or 3")


def theta_with_gradient(z, params: ThetaParams, chars=None):
    nd, terms, logscale = _terms(z, params, chars)
    scale = np.exp(logscale)
    return complex(scale * np.sum(terms)), scale * ((2j * np.pi * nd).T @ terms)


def jacobi_theta(k: int, z, tau) -> complex:
    """Jacobi theta_k(z; tau), k = 1..4, with period 1 in z.

    theta_3(z; tau) = sum_n exp(pi i tau n^2 + 2 pi i n z), i.e. the genus-one
    theta function with zero characteristics.
    """
    tau = complex(tau)
    z = complex(z)
    if tau.imag < 1e-8:
        raise IllConditioned("Im tau too small")
    if k not in (1, 2, 3, 4):
        raise ValidationError("k must be 1, 2, 3 or 4")
    half = {3: 0.0, 4: 0.0, 2: 0.5, 1: 0.5}[k]
    zshift = {3: 0.0, 4: 0.5, 2: 0.0, 1: 0.5}[k]
    nmax = int(math.ceil(math.sqrt(40.0 / (math.pi * tau.imag)) + 3))
    c = -round(z.imag / tau.imag)
    n = np.arange(c - nmax, c + nmax + 1) + half
    expo = 1j * math.pi * tau * n ** 2 + 2j * math.pi * n * (z + zshift)
    val = np.sum(np.exp(expo))
    if k == 1:
        val = -val  # the half shift contributes i (-1)^n; theta_1 carries -i
    return complex(val)


def theta_cancellation(z, params: ThetaParams, chars=None) -> float:
    """|theta| divided by the sum of the moduli of its terms.

    Small values flag points near the theta divisor, independently of the
    exponential size of the series.
    """
    _, terms, _ = _terms(z, params, chars)
    return float(abs(np.sum(terms)) / np.sum(np.abs(terms)))
