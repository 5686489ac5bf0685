"""Periods, Riemann matrix, Abel map and branch-point characteristics.

All cycle integrals are reduced to integrals along the contour pieces
between consecutive branch points, taken on sheet 1 from the + side; the
- side and the other sheets follow from the phase factors rho^(-(s+1)).

Writing v_+(lam) (resp. v_-) for the sheet-1 integral of du from infinity
through C_+ (resp. C_-), the cycles are fixed by

    J^s v_- - J^s v_+         = alpha_{k+sm}            on gap (lam_2k, lam_2k+1)
    J^(s-1) v_- - J^s v_+     = l_{k,s}                 on cut (lam_2k-1, lam_2k)

with l_{k,s} = B_{k,s-1} - B_{k,s}, l_{k,N-1} = B_{k,N-2}, l_{k,N} = -B_{k,0}
and B_{k,t} = sum_{j >= k} beta_{j+tm}. These are exactly the jump relations
the theta-function solution of the Riemann-Hilbert problem needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Optional

import numpy as np

from . import curve as cv
from .curve import SheetedPoint, ZnCurve
from .errors import ConventionMismatch, PathThroughBranchPoint, SingularNormalization, ValidationError
from .numerics import QuadratureSpec, integrate_segment

QUAD_TOL = 1e-14


def _spec(curve: ZnCurve, left: float, right: float, tol: float = QUAD_TOL) -> QuadratureSpec:
    return QuadratureSpec(abs_tol=tol, endpoint_exponents=(left, right), max_subdivisions=8, max_level=10)


def _worst_exponent(curve: ZnCurve) -> float:
    return -(curve.N - 1) / curve.N


def _point_index(curve: ZnCurve, z) -> Optional[int]:
    hits = np.nonzero(curve.points == complex(z))[0]
    return int(hits[0]) if len(hits) else None


def segment_integral(curve: ZnCurve, a, b, cut: int = 0, side: int = 0, sheet: int = 1,
                     tol: float = QUAD_TOL) -> np.ndarray:
    """Vector of int_a^b du_i along the straight segment on the given sheet.

    Endpoints may be branch points. ``cut``/``side`` select boundary values
    when the segment runs along a piece of L0.
    """
    a, b = complex(a), complex(b)
    pts = curve.points
    base = a - pts
    ia, ib = _point_index(curve, a), _point_index(curve, b)
    h = b - a

    def f(u, uc):
        D = base[:, None] + h * u[None, :]
        if ia is not None:
            D[ia] = h * u
        if ib is not None:
            D[ib] = -h * uc
        lam = np.where(u < 0.5, a + h * u, b - h * uc)
        y1 = cv.sheet1_y(curve, D, cut, side)
        return cv.du_coefficients(curve, lam, y1, sheet, D)

    e = _worst_exponent(curve)
    spec = _spec(curve, e if ia is not None else 0.0, e if ib is not None else 0.0, tol)
    return integrate_segment(f, a, b, spec)


def ray_integral(curve: ZnCurve, which: str, tol: float = QUAD_TOL) -> np.ndarray:
    """int over the horizontal ray: 'left' is (-inf, lam_1], 'right' is [lam_{2m+1}, +inf) on the + side."""
    N, m = curve.N, curve.m
    pts = curve.points
    R = curve.span()
    if which == "left":
        anchor, sgn, idx, cut, side = pts[0], -1.0, 0, 0, 0
    else:
        anchor, sgn, idx, cut, side = pts[-1], 1.0, 2 * m, m + 1, 1
    base = anchor - pts

    def f(u, uc):
        # lam = anchor + sgn R (u^-N - 1); u -> 1 is the branch point
        with np.errstate(divide="ignore"):
            logu = np.where(uc < 0.5, np.log1p(-np.minimum(uc, 0.5)), np.log(u))
        one_minus = -np.expm1(N * logu)
        step = sgn * R * one_minus / u ** N
        D = base[:, None] + step[None, :]
        D[idx] = step
        lam = anchor + step
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            y1 = cv.sheet1_y(curve, D, cut, side)
            jac = R * N * u ** (-N - 1.0)
            val = cv.du_coefficients(curve, lam, y1, 1, D) * jac
        # far out the integrand is bounded and the neglected range is tiny
        return np.where(np.isfinite(val), val, 0.0)

    spec = _spec(curve, 0.0, _worst_exponent(curve), tol)
    return integrate_segment(f, 0.0, 1.0, spec)


@dataclass(frozen=True)
class BoundaryData:
    """Sheet-1 integrals of du from infinity to each branch point along L."""

    plus: np.ndarray   # (2m+1, g)  v_+(lam_k)
    minus: np.ndarray  # (2m+1, g)  v_-(lam_k)
    pieces: np.ndarray  # (2m, g) + side integrals between consecutive points
    left: np.ndarray
    right: np.ndarray

    @property
    def closure(self) -> float:
        return float(np.max(np.abs(self.plus[-1] + self.right)))


def boundary_data(curve: ZnCurve) -> BoundaryData:
    m = curve.m
    pts = curve.points
    left = ray_integral(curve, "left")
    right = ray_integral(curve, "right")
    pieces = []
    for k in range(1, 2 * m + 1):
        cut = (k + 1) // 2 if k % 2 == 1 else 0
        pieces.append(segment_integral(curve, pts[k - 1], pts[k], cut, 1 if cut else 0))
    pieces = np.array(pieces)
    ph = cv.j_phases(curve, 1)
    plus = [left]
    minus = [left]
    for k in range(1, 2 * m + 1):
        plus.append(plus[-1] + pieces[k - 1])
        minus.append(minus[-1] + (ph * pieces[k - 1] if k % 2 == 1 else pieces[k - 1]))
    return BoundaryData(np.array(plus), np.array(minus), pieces, left, right)


def _block_structure(curve: ZnCurve):
    N, m = curve.N, curve.m
    rho = curve.rho
    i = np.arange(1, N)[:, None]
    k = np.arange(1, N)[None, :]
    ra = (rho ** (-i * (k - 1)) - rho ** (-i * k)) / (1 - rho ** (-i))
    rb = (rho ** (-i * (k - 1)) - rho ** (-i * (N - 1))) / (1 - rho ** (-(N - 1) * i))
    eye = np.eye(m)
    return np.kron(ra, eye), np.kron(rb, eye)


def cycle_vectors(curve: ZnCurve, bd: BoundaryData):
    """Unnormalized alpha and beta periods of du (columns indexed by cycle)."""
    N, m, g = curve.N, curve.m, curve.genus

    def J(vec, t):
        return cv.j_phases(curve, t) * vec

    alpha = np.zeros((g, g), complex)
    beta = np.zeros((g, g), complex)
    for k in range(1, m + 1):
        jump = bd.minus[2 * k - 1] - bd.plus[2 * k - 1]  # at lam_{2k}
        for s in range(N - 1):
            alpha[:, (k - 1) + s * m] = J(jump, s)
    Bk = np.zeros((m + 2, N - 1, g), complex)
    for k in range(1, m + 1):
        node_m = bd.minus[2 * k - 2]
        node_p = bd.plus[2 * k - 2]
        ell = {s: J(node_m, s - 1) - J(node_p, s) for s in range(1, N + 1)}
        Bk[k, 0] = -ell[N]
        for t in range(1, N - 1):
            Bk[k, t] = Bk[k, t - 1] - ell[t]
    for k in range(1, m + 1):
        for t in range(N - 1):
            beta[:, (k - 1) + t * m] = Bk[k, t] - Bk[k + 1, t]
    return alpha, beta


@dataclass
class PeriodData:
    curve: ZnCurve
    boundary: BoundaryData
    amat: np.ndarray   # alpha periods of du, rows du index, columns cycles
    bmat: np.ndarray
    A_blocks: np.ndarray  # (N-1, m, m)
    B_blocks: np.ndarray
    R_A: np.ndarray
    R_B: np.ndarray
    norm: np.ndarray   # dv = norm @ du
    Pi: np.ndarray

    @property
    def genus(self) -> int:
        return self.curve.genus

    # ---- checks
    def symmetry_error(self) -> float:
        return float(np.max(np.abs(self.Pi - self.Pi.T)))

    def min_imag_eig(self) -> float:
        return float(np.min(np.linalg.eigvalsh(0.5 * (self.Pi.imag + self.Pi.imag.T))))

    def structured_Pi(self) -> np.ndarray:
        blocks = [np.linalg.solve(A, B) for A, B in zip(self.A_blocks, self.B_blocks)]
        diag = _block_diag(blocks)
        return np.linalg.solve(self.R_A, diag @ self.R_B)

    # ---- Abel map
    def normalize(self, u):
        return self.norm @ u

    def vector_to_chars(self, w):
        """Real (eps, delta) with w = eps + Pi delta."""
        w = np.asarray(w, complex)
        delta = np.linalg.solve(self.Pi.imag, w.imag)
        eps = w.real - self.Pi.real @ delta
        return eps, delta

    @cached_property
    def U(self) -> np.ndarray:
        """U_k = int_infinity^{lam_k} dv (sheet 1, through C_+), rows k = 1..2m+1."""
        return np.array([self.norm @ u for u in self.boundary.plus])

    @cached_property
    def K_inf(self) -> np.ndarray:
        m, N = self.curve.m, self.curve.N
        return (N - 1) * sum(self.U[2 * k - 1] for k in range(1, m + 1))


def _block_diag(blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), complex)
    i = 0
    for b in blocks:
        r = b.shape[0]
        out[i:i + r, i:i + r] = b
        i += r
    return out


def block_periods(curve: ZnCurve, bd: Optional[BoundaryData] = None):
    """(A_blocks, B_blocks): the m x m period blocks over the first m alpha/beta cycles."""
    if bd is None:
        bd = boundary_data(curve)
    alpha, beta = cycle_vectors(curve, bd)
    N, m = curve.N, curve.m
    A = np.array([alpha[s * m:(s + 1) * m, :m] for s in range(N - 1)])
    B = np.array([beta[s * m:(s + 1) * m, :m] for s in range(N - 1)])
    return A, B


def period_matrix(curve: ZnCurve) -> PeriodData:
    bd = boundary_data(curve)
    alpha, beta = cycle_vectors(curve, bd)
    N, m = curve.N, curve.m
    A = np.array([alpha[s * m:(s + 1) * m, :m] for s in range(N - 1)])
    B = np.array([beta[s * m:(s + 1) * m, :m] for s in range(N - 1)])
    if np.linalg.cond(alpha) > 1e12:
        raise SingularNormalization("alpha-period matrix is numerically singular")
    norm = np.linalg.inv(alpha)
    Pi = norm @ beta
    RA, RB = _block_structure(curve)
    return PeriodData(curve, bd, alpha, beta, A, B, RA, RB, norm, Pi)


# ---------------------------------------------------------------- Abel map

def _anchor_candidates(curve: ZnCurve, lam: complex, region: int):
    pts = curve.points
    order = np.argsort(np.abs(pts - lam))
    for k in order:
        if _segment_in_region(curve, pts[k], lam, region):
            yield int(k)


def _segment_in_region(curve: ZnCurve, a: complex, b: complex, region: int) -> bool:
    xs = [x for x in curve.points.real if min(a.real, b.real) < x < max(a.real, b.real)]
    for t in np.linspace(0, 1, 9)[1:]:
        z = a + (b - a) * t
        if curve.region(z) != region:
            return False
    for x in xs:
        t = (x - a.real) / (b.real - a.real)
        z = a + (b - a) * t
        if curve.region(z) != region:
            return False
    return True


def abel_u(periods: PeriodData, lam, side: int = 0) -> np.ndarray:
    """Sheet-1 integral of du from infinity to lam (unnormalized).

    Off the contour the path runs in the region containing lam; on the
    contour ``side`` (+1 or -1) selects the C_+ or C_- boundary value.
    """
    curve = periods.curve
    lam = complex(lam)
    pts = curve.points
    bd = periods.boundary
    hit = _point_index(curve, lam)
    reg = curve.region(lam, tol=1e-13 * curve.span())
    if hit is not None:
        if side == 0:
            side = 1
        return (bd.plus if side > 0 else bd.minus)[hit].copy()
    if reg == 0:
        if side == 0:
            raise PathThroughBranchPoint("point on the contour needs side=+1 or -1")
        k = curve.contour_segment(lam)
        nodes = bd.plus if side > 0 else bd.minus
        if k == 0:
            # left ray: no cut
            return nodes[0] - segment_integral(curve, lam, pts[0])
        cut = (k + 1) // 2 if k % 2 == 1 else 0
        return nodes[k - 1] + segment_integral(curve, pts[k - 1], lam, cut, side if cut else 0)
    nodes = bd.plus if reg > 0 else bd.minus
    for k in _anchor_candidates(curve, lam, reg):
        return nodes[k] + segment_integral(curve, pts[k], lam)
    raise PathThroughBranchPoint("no admissible straight path from a branch point")


def abel_map(periods: PeriodData, P: SheetedPoint, Q: Optional[SheetedPoint] = None) -> np.ndarray:
    """int_Q^P dv with Q defaulting to infinity; sheets enter through J-phases."""
    curve = periods.curve
    u = cv.j_phases(curve, P.sheet - 1) * abel_u(periods, P.lam, P.side)
    if Q is not None:
        u = u - cv.j_phases(curve, Q.sheet - 1) * abel_u(periods, Q.lam, Q.side)
    return periods.norm @ u


def abel_sheets(periods: PeriodData, lam, side: int = 0) -> np.ndarray:
    """Rows s = 1..N: J^(s-1) v(lam), normalized."""
    curve = periods.curve
    u = abel_u(periods, lam, side)
    return np.array([periods.norm @ (cv.j_phases(curve, s) * u) for s in range(curve.N)])


# ---------------------------------------------------------------- characteristics

@dataclass(frozen=True)
class Characteristics:
    eps: np.ndarray
    delta: np.ndarray
    provenance: str = "manual"

    def __post_init__(self):
        object.__setattr__(self, "eps", np.asarray(self.eps, dtype=complex))
        object.__setattr__(self, "delta", np.asarray(self.delta, dtype=complex))
        if self.eps.shape != self.delta.shape:
            raise ValidationError("eps and delta must have equal length")

    @property
    def genus(self) -> int:
        return len(self.eps)

    def reduced(self) -> "Characteristics":
        """Representative with real parts in [-1, 1)."""
        def red(x):
            return x - 2 * np.floor((x.real + 1) / 2)
        return Characteristics(red(self.eps), red(self.delta), self.provenance)

    def parity(self) -> int:
        """4<delta, eps> mod 2 for half-integer characteristics (0 even, 1 odd)."""
        v = 4 * np.dot(self.delta.real, self.eps.real)
        return int(round(v)) % 2

    def __add__(self, other: "Characteristics") -> "Characteristics":
        return Characteristics(self.eps + other.eps, self.delta + other.delta, self.provenance)

    @staticmethod
    def zero(g: int) -> "Characteristics":
        return Characteristics(np.zeros(g), np.zeros(g), "manual")


def table_characteristics(curve: ZnCurve, k: int) -> Characteristics:
    """The rational table [U_k] for branch point k = 1..2m+1 (mod lattice)."""
    N, m, g = curve.N, curve.m, curve.genus
    eps = np.zeros(g)
    delta = np.zeros(g)
    if k % 2 == 1:
        i = (k - 1) // 2  # k = 2i + 1
        # delta = -1/N at positions i+1..m of each block, eps = s/N at position i+(s-1)m
        for s in range(1, N):
            for j in range(i + 1, m + 1):
                delta[(j - 1) + (s - 1) * m] = -1.0 / N
            if i >= 1:
                eps[(i - 1) + (s - 1) * m] = s / N
    else:
        i = k // 2
        for s in range(1, N):
            for j in range(i, m + 1):
                delta[(j - 1) + (s - 1) * m] = -1.0 / N
            eps[(i - 1) + (s - 1) * m] = s / N
    return Characteristics(eps, delta, "from-divisor")


def lattice_residual(periods: PeriodData, w, chars: Characteristics) -> float:
    """Distance of w - (eps + Pi delta) to the lattice Z^g + Pi Z^g."""
    e, d = periods.vector_to_chars(np.asarray(w) - (chars.eps.real + periods.Pi @ chars.delta.real))
    return float(max(np.max(np.abs(e - np.round(e))), np.max(np.abs(d - np.round(d)))))


def branch_characteristics(periods: PeriodData, tol: float = 1e-8):
    """Table of [U_k], k = 1..2m+1, verified against Abel-map quadrature."""
    curve = periods.curve
    out = []
    for k in range(1, 2 * curve.m + 2):
        ch = table_characteristics(curve, k)
        res = lattice_residual(periods, periods.U[k - 1], ch)
        if res > tol:
            raise ConventionMismatch(f"[U_{k}] off by {res:.3g} from the Abel map")
        out.append(ch)
    return out


def riemann_constants(periods: PeriodData) -> np.ndarray:
    return periods.K_inf


def divisor_vector(periods: PeriodData, D: Dict[int, int]) -> np.ndarray:
    """Abel image (base infinity) of a divisor on branch points; key 0 stands for infinity."""
    w = np.zeros(periods.genus, complex)
    for k, s in D.items():
        if k == 0:
            continue
        w = w + s * periods.U[k - 1]
    return w


def divisor_characteristics(periods: PeriodData, D: Dict[int, int], reduce: bool = False) -> Characteristics:
    """Characteristics of A(D) - K_inf assembled from the rational [U_k] table.

    The result is unreduced unless ``reduce``; its consistency with the
    numerical Abel map can be checked with :func:`lattice_residual`.
    """
    curve = periods.curve
    N, m = curve.N, curve.m
    eps = np.zeros(curve.genus)
    delta = np.zeros(curve.genus)
    for k, s in D.items():
        if k == 0:
            continue
        t = table_characteristics(curve, k)
        eps = eps + s * t.eps.real
        delta = delta + s * t.delta.real
    for k in range(1, m + 1):
        t = table_characteristics(curve, 2 * k)
        eps = eps - (N - 1) * t.eps.real
        delta = delta - (N - 1) * t.delta.real
    ch = Characteristics(eps, delta, "from-divisor")
    return ch.reduced() if reduce else ch


def rauch_derivative(periods: PeriodData, i: int, npts: int = 96) -> np.ndarray:
    """d Pi / d lam_i as a g x g matrix, from the sheet-summed residue at lam_i."""
    curve = periods.curve
    pts = curve.points
    lam_i = pts[i - 1]
    r = curve.min_gap() / 8
    theta = 2 * np.pi * (np.arange(npts) + 0.5) / npts
    lam = lam_i + r * np.exp(1j * theta)
    D = np.array([lam - a for a in pts])
    cut = np.array([cv.detect_cut(curve, z) for z in lam])
    total = np.zeros((curve.genus, curve.genus), complex)
    for n in range(npts):
        y1 = cv.sheet1_y(curve, D[:, n:n + 1], int(cut[n]), 1 if cut[n] else 0)
        for s in range(1, curve.N + 1):
            du = cv.du_coefficients(curve, lam[n:n + 1], y1, s)[:, 0]
            dv = periods.norm @ du
            total += np.outer(dv, dv) * (1j * r * np.exp(1j * theta[n]))
    return total * (2 * np.pi / npts)
