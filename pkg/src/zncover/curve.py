"""The singular cyclic cover y^N = p(lam) q(lam)^(N-1) and its sheets.

Sheet 1 is the branch of y analytic off the cut system
L0 = [lam_1, lam_2] u [lam_3, lam_4] u ... u [lam_{2m+1}, +inf),
written as

    y_1 = prod_k (lam - lam_{2k}) ((lam - lam_{2k-1}) / (lam - lam_{2k}))^(1/N)
          * (lam - lam_{2m+1})^(1/N)

with principal logarithms for the ratios (cut exactly on each segment) and
arg in [0, 2 pi) for the last factor (cut on the horizontal ray to the
right). Sheet s carries y_s = rho^(s-1) y_1. The full contour L is the
polyline lam_1 -> ... -> lam_{2m+1} extended by horizontal rays; it splits
the plane into C_+ (above, the left side of L) and C_- (below).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BadArity, CutAmbiguity, DuplicatePoints, ValidationError
from .numerics import PathSpec

ON_CUT_TOL = 1e-13


@dataclass(frozen=True)
class ZnCurve:
    N: int
    lambdas: tuple

    @property
    def m(self) -> int:
        return (len(self.lambdas) - 1) // 2

    @property
    def genus(self) -> int:
        return (self.N - 1) * self.m

    @property
    def rho(self) -> complex:
        return np.exp(2j * np.pi / self.N)

    @property
    def points(self) -> np.ndarray:
        return np.array(self.lambdas, dtype=complex)

    @property
    def odd(self) -> np.ndarray:
        """Roots of p: lam_1, lam_3, ..., lam_{2m+1}."""
        return self.points[0::2]

    @property
    def even(self) -> np.ndarray:
        """Roots of q: lam_2, ..., lam_{2m}."""
        return self.points[1::2]

    def p(self, lam):
        lam = np.asarray(lam, dtype=complex)
        return np.prod([lam - a for a in self.odd], axis=0)

    def q(self, lam):
        lam = np.asarray(lam, dtype=complex)
        if self.m == 0:
            return np.ones_like(lam)
        return np.prod([lam - b for b in self.even], axis=0)

    def span(self) -> float:
        pts = self.points
        return float(max(1.0, np.max(np.abs(pts[:, None] - pts[None, :]))))

    def min_gap(self) -> float:
        pts = self.points
        d = np.abs(pts[:, None] - pts[None, :])
        d[np.diag_indices(len(pts))] = np.inf
        return float(np.min(d))

    # ---- contour geometry

    def contour_height(self, x):
        """Imaginary part of the contour L above the real abscissa x."""
        pts = self.points
        return np.interp(x, pts.real, pts.imag, left=pts[0].imag, right=pts[-1].imag)

    def region(self, lam, tol: float = 0.0) -> int:
        """+1 in C_+, -1 in C_-, 0 on the contour (within ``tol``)."""
        lam = complex(lam)
        h = lam.imag - float(self.contour_height(lam.real))
        if h > tol:
            return 1
        if h < -tol:
            return -1
        return 0

    def contour_segment(self, lam):
        """Index k (0..2m+1) of the contour piece (lam_k, lam_{k+1}) below/above lam.

        k = 0 is the left ray, k = 2m+1 the right ray.
        """
        x = complex(lam).real
        re = self.points.real
        return int(np.searchsorted(re, x, side="right"))


def make_curve(N: int, lambdas: Sequence, order: Optional[Sequence[int]] = None) -> ZnCurve:
    """Build the curve from its 2m+1 finite branch points.

    ``order`` is an optional permutation (0-based) applied before the
    contour checks; by default the real parts must increase strictly.
    """
    if int(N) != N or N < 2:
        raise ValidationError("N must be an integer >= 2")
    pts = [complex(x) for x in lambdas]
    if order is not None:
        if sorted(order) != list(range(len(pts))):
            raise ValidationError("order must be a permutation")
        pts = [pts[i] for i in order]
    if len(pts) % 2 == 0 or len(pts) < 3:
        raise BadArity("need an odd number 2m+1 >= 3 of finite branch points")
    arr = np.array(pts)
    d = np.abs(arr[:, None] - arr[None, :])
    d[np.diag_indices(len(arr))] = np.inf
    if np.min(d) < 1e-12 * max(1.0, np.max(np.abs(arr))):
        raise DuplicatePoints("branch points must be pairwise distinct")
    if np.any(np.diff(arr.real) <= 0):
        raise ValidationError("real parts of the branch points must increase strictly")
    return ZnCurve(int(N), tuple(pts))


# ---------------------------------------------------------------- sheet-1 branch

def log_pq(curve: ZnCurve, diffs, cut: int = 0, side: int = 0):
    """Branch of log(p/q) analytic off L0, from the differences lam - lam_j.

    ``diffs`` has the branch points on the first axis. ``cut`` (1..m+1,
    m+1 meaning the right ray) with ``side`` = +1/-1 selects a boundary value
    on that piece of L0; the + side is the left of the contour.
    """
    m = curve.m
    total = 0j
    for k in range(1, m + 1):
        w = diffs[2 * k - 2] / diffs[2 * k - 1]
        if cut == k:
            lw = np.log(np.abs(w)) - 1j * np.pi * side
        else:
            lw = np.log(w)
        total = total + lw
    d = diffs[2 * m]
    if cut == m + 1:
        arg = 0.0 if side > 0 else 2 * np.pi
        ld = np.log(np.abs(d)) + 1j * arg
    else:
        ld = np.log(np.abs(d)) + 1j * np.mod(np.angle(d), 2 * np.pi)
    return total + ld


def sheet1_y(curve: ZnCurve, diffs, cut: int = 0, side: int = 0):
    qv = np.prod(diffs[1::2], axis=0) if curve.m > 0 else 1.0
    return qv * np.exp(log_pq(curve, diffs, cut, side) / curve.N)


def diffs_at(curve: ZnCurve, lam):
    lam = np.asarray(lam, dtype=complex)
    return np.array([lam - a for a in curve.points])


def detect_cut(curve: ZnCurve, lam) -> int:
    """Return the L0 piece (1..m+1) containing lam, or 0."""
    lam = complex(lam)
    d = lam - curve.points
    m = curve.m
    for k in range(1, m + 1):
        a, b = d[2 * k - 2], d[2 * k - 1]
        if b == 0 or a == 0:
            continue
        w = a / b
        if w.real < 0 and abs(w.imag) <= ON_CUT_TOL * abs(w):
            return k
    dd = d[2 * m]
    if dd != 0 and dd.real > 0 and abs(dd.imag) <= ON_CUT_TOL * abs(dd):
        return m + 1
    return 0


@dataclass(frozen=True)
class SheetedPoint:
    lam: complex
    sheet: int
    y: complex
    side: int = 0


def y_value(curve: ZnCurve, lam, sheet: int = 1, side: int = 0) -> complex:
    """y on the given sheet; ``side`` (+1/-1) is required on L0."""
    lam = complex(lam)
    if not 1 <= sheet <= curve.N:
        raise ValidationError("sheet out of range")
    if np.any(lam == curve.points):
        return 0j
    cut = detect_cut(curve, lam)
    if cut and side == 0:
        raise CutAmbiguity("point lies on a cut; pass side=+1 or -1")
    y1 = complex(sheet1_y(curve, diffs_at(curve, lam), cut, side if cut else 0))
    return curve.rho ** (sheet - 1) * y1


def sheeted_point(curve: ZnCurve, lam, sheet: int = 1, side: int = 0) -> SheetedPoint:
    return SheetedPoint(complex(lam), sheet, y_value(curve, lam, sheet, side), side)


def all_roots(curve: ZnCurve, lam) -> np.ndarray:
    """The N values of y over lam in sheet order (off L0)."""
    y1 = y_value(curve, lam, 1, 0) if detect_cut(curve, lam) == 0 else y_value(curve, lam, 1, 1)
    return y1 * curve.rho ** np.arange(curve.N)


# ---------------------------------------------------------------- differentials

def du_coefficients(curve: ZnCurve, lam, y1, sheet: int = 1, diffs=None):
    """Coefficients of du_1..du_g with respect to d lam on the given sheet.

    Index i = (j-1) + s*m (0-based) holds lam^(j-1) q^s / y^(s+1).
    Works on arrays: the result has the genus on the first axis. Passing
    the differences lam - lam_j avoids cancellation in q near its roots.
    """
    N, m = curve.N, curve.m
    lam = np.asarray(lam, dtype=complex)
    y = np.asarray(y1, dtype=complex) * curve.rho ** (sheet - 1)
    qv = curve.q(lam) if diffs is None else np.prod(diffs[1::2], axis=0)
    out = []
    for s in range(N - 1):
        base = qv ** s / y ** (s + 1)
        for j in range(1, m + 1):
            out.append(lam ** (j - 1) * base)
    return np.array(out)


def j_phases(curve: ZnCurve, power: int = 1) -> np.ndarray:
    """Factors by which J^power multiplies du_{j+sm}: rho^(-power (s+1))."""
    N, m = curve.N, curve.m
    return np.repeat(curve.rho ** (-power * np.arange(1, N)), m)


class HolomorphicDifferential:
    """du_{j+sm} = lam^(j-1) q^s / y^(s+1) d lam, evaluated at sheeted points."""

    def __init__(self, curve: ZnCurve, j: int, s: int):
        if not (1 <= j <= curve.m and 0 <= s <= curve.N - 2):
            raise ValidationError("index out of range")
        self.curve, self.j, self.s = curve, j, s

    @property
    def index(self) -> int:
        return self.j + self.s * self.curve.m

    def __call__(self, point: SheetedPoint) -> complex:
        c = self.curve
        return complex(point.lam ** (self.j - 1) * c.q(point.lam) ** self.s / point.y ** (self.s + 1))

    def local(self, z: complex, branch: int, sheet: int = 1) -> complex:
        """Coefficient with respect to the local parameter z at a branch point.

        ``branch`` is 1..2m+1 (lam = lam_k + z^N) or 0 for infinity (lam = z^-N).
        The point is taken on the given sheet of the punctured neighbourhood.
        """
        c = self.curve
        N = c.N
        if branch == 0:
            lam = z ** (-N)
            dlam = -N * z ** (-N - 1)
        else:
            lam = c.points[branch - 1] + z ** N
            dlam = N * z ** (N - 1)
        side = 1 if detect_cut(c, lam) else 0
        pt = sheeted_point(c, lam, sheet, side)
        return self(pt) * dlam


def du_differential(curve: ZnCurve, j: int, s: int) -> HolomorphicDifferential:
    return HolomorphicDifferential(curve, j, s)


# ---------------------------------------------------------------- cycles

@dataclass(frozen=True)
class CycleRealization:
    """A homology class as a signed sum of closed polygons on given sheets."""

    loops: tuple  # of (sign, PathSpec)


def _loop_around_left(curve: ZnCurve, k: int, sheet: int, pad: float) -> PathSpec:
    # counter-clockwise loop through the middle of gap k, closing over the left ray
    pts = curve.points
    gap = 0.5 * (pts[2 * k - 1] + pts[2 * k])
    x0 = pts[0].real - pad
    top = max(pts.imag) + pad
    bot = min(pts.imag) - pad
    verts = [gap, complex(gap.real, top), complex(x0, top), complex(x0, bot), complex(gap.real, bot), gap]
    return PathSpec(tuple(verts), sheet, pad / 4)


def _loop_around_right(curve: ZnCurve, k: int, s: int, pad: float) -> PathSpec:
    # l_{k,s}: leaves the + side of cut k on sheet s+1, runs clockwise round
    # everything to the right (crossing the ray) and returns below the cut on
    # sheet s, then crosses the cut back up
    pts = curve.points
    mid = 0.5 * (pts[2 * k - 2] + pts[2 * k - 1])
    eps = pad / 4
    x1 = pts[-1].real + pad
    top = max(pts.imag) + pad
    bot = min(pts.imag) - pad
    below = mid - 1j * eps
    above = mid + 1j * eps
    verts = [above, complex(mid.real, top), complex(x1, top), complex(x1, bot), complex(mid.real, bot), below, above]
    return PathSpec(tuple(verts), s % curve.N + 1, eps)


def cycle_path(curve: ZnCurve, kind: str, index: int) -> CycleRealization:
    """Polygonal realization of alpha_i / beta_i (1-based index i = j + t m).

    alpha_{j+tm}: on sheet t+1, counter-clockwise around the cuts 1..j.
    beta_{j+tm} = B_{j,t} - B_{j+1,t} with B_{k,t} = -l_{k,N} - sum_{s<=t} l_{k,s},
    where l_{k,s} is the loop from infinity to a point of cut k through C_-
    on sheet s and back to infinity through C_+ on sheet s+1.
    """
    N, m = curve.N, curve.m
    if not 1 <= index <= curve.genus:
        raise ValidationError("cycle index out of range")
    j = (index - 1) % m + 1
    t = (index - 1) // m
    pad = 0.5 * curve.min_gap()
    if kind == "alpha":
        return CycleRealization(((1, _loop_around_left(curve, j, t + 1, pad)),))
    if kind != "beta":
        raise ValidationError("kind must be 'alpha' or 'beta'")
    loops = []
    for k, sign in ((j, 1), (j + 1, -1)):
        if k > m:
            continue
        loops.append((-sign, _loop_around_right(curve, k, N, pad)))
        for s in range(1, t + 1):
            loops.append((-sign, _loop_around_right(curve, k, s, pad)))
    return CycleRealization(tuple(loops))
