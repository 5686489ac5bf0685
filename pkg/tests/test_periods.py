import math

import numpy as np
import pytest

from zncover import curve as cv
from zncover.numerics import gauss_2f1, integrate_function
from zncover.periods import (Characteristics, abel_map, abel_u, block_periods, branch_characteristics,
                             divisor_characteristics, lattice_residual, period_matrix, rauch_derivative,
                             riemann_constants, table_characteristics)
from zncover.theta import ThetaParams, theta_cancellation

from oracles import branch_identity_residuals, cycle_integral, random_off_contour, richardson

RHO = np.exp(2j * np.pi / 3)


def hypergeometric_T(lams):
    l1, l2, l3 = lams
    t = (l2 - l1) / (l3 - l1)
    return 1j / math.sqrt(3) * gauss_2f1(1 / 3, 2 / 3, 1, 1 - t) / gauss_2f1(1 / 3, 2 / 3, 1, t)


N3_CONFIGS = [(0, 1, 2), (0, 0.3 + 0.2j, 2 - 0.1j), (-1 + 0.5j, 0.2, 1.5 + 1j)]


@pytest.mark.parametrize("lams", N3_CONFIGS)
def test_genus_two_structure(periods_cache, lams):
    pd = periods_cache(3, lams)
    T = hypergeometric_T(pd.curve.points)
    assert np.max(np.abs(pd.Pi - T * np.array([[2, 1], [1, 2]]))) < 1e-10
    assert pd.symmetry_error() < 1e-12
    assert pd.min_imag_eig() > 0
    assert np.max(np.abs(pd.structured_Pi() - pd.Pi)) < 1e-10


def test_symmetric_point():
    pd = period_matrix(cv.make_curve(3, (0, 1, 2)))
    T = 1j / math.sqrt(3)
    assert abs(pd.Pi[0, 1] - T) < 1e-12
    assert abs(pd.Pi[0, 0] - 2 * T) < 1e-12


@pytest.mark.parametrize("lams", N3_CONFIGS)
def test_genus_two_block_entries(periods_cache, lams):
    pd = periods_cache(3, lams)
    l1, l2, l3 = pd.curve.points
    t = (l2 - l1) / (l3 - l1)
    kappa = (l3 - l1) ** (1 / 3)
    A1 = 2 * math.pi / math.sqrt(3) * (1 - RHO ** 2) / kappa * gauss_2f1(1 / 3, 2 / 3, 1, t)
    B1 = 2j * math.pi / kappa * gauss_2f1(1 / 3, 2 / 3, 1, 1 - t)
    A, B = pd.amat, pd.bmat
    assert abs(A[0, 0] - A1) < 1e-12
    assert abs(B[0, 0] - B1) < 1e-12
    # the second differential: A1 = -rho^2 A2 kappa, B1 = B2 kappa
    assert abs(A[0, 0] + RHO ** 2 * A[1, 0] * kappa) < 1e-12
    assert abs(B[0, 0] - B[1, 0] * kappa) < 1e-12
    assert np.allclose(A[:, 1], [RHO ** 2 * A[0, 0], RHO * A[1, 0]], atol=1e-12)
    assert np.allclose(B[:, 1], [-RHO * B[0, 0], -RHO ** 2 * B[1, 0]], atol=1e-12)
    Ab, Bb = block_periods(pd.curve)
    assert np.allclose(Ab[:, 0, 0], A[:, 0]) and np.allclose(Bb[:, 0, 0], B[:, 0])


@pytest.mark.parametrize("N,lams", [(2, (0, 1, 3)), (2, (0, 0.5 + 0.3j, 1.2, 2 - 0.2j, 3)),
                                    (3, (0, 0.6, 1.3, 2.0 + 0.3j, 3.1))])
def test_periods_against_polygon_quadrature(periods_cache, N, lams):
    pd = periods_cache(N, lams)
    c = pd.curve
    assert pd.symmetry_error() < 1e-10
    assert pd.min_imag_eig() > 0
    for i in range(1, c.genus + 1):
        b = cycle_integral(c, cv.cycle_path(c, "beta", i), pieces=10)
        a = cycle_integral(c, cv.cycle_path(c, "alpha", i), pieces=10)
        assert np.max(np.abs(a - pd.amat[:, i - 1])) < 1e-10
        assert np.max(np.abs(b - pd.bmat[:, i - 1])) < 1e-10


@pytest.mark.parametrize("N,m", [(2, 2), (2, 3), (3, 1), (3, 2), (4, 1)])
def test_branch_point_relations(periods_cache, N, m):
    rng = np.random.default_rng(10 * N + m)
    x = np.sort(rng.uniform(-2, 2, 2 * m + 1))
    lams = x + 1j * rng.uniform(-1, 1, 2 * m + 1)
    pd = periods_cache(N, lams)
    assert max(branch_identity_residuals(pd).values()) < 1e-9
    for k in range(1, 2 * m + 2):
        assert lattice_residual(pd, pd.U[k - 1], table_characteristics(pd.curve, k)) < 1e-9


def test_table_last_point():
    c = cv.make_curve(4, (0, 0.6, 1.3, 2.0 + 0.3j, 3.1))
    ch = table_characteristics(c, 5)
    assert np.all(ch.delta == 0)
    expected = np.zeros(6)
    expected[[2 - 1, 2 + 2 - 1, 2 + 4 - 1]] = [1 / 4, 2 / 4, 3 / 4]
    assert np.allclose(ch.eps, expected)


def test_table_first_point_genus_two():
    ch = table_characteristics(cv.make_curve(3, (0, 1, 2)), 1)
    assert np.allclose(ch.delta, [-1 / 3, -1 / 3])
    assert np.allclose(ch.eps, [0, 0])


def test_branch_characteristics_verified(n3_periods):
    table = branch_characteristics(n3_periods)
    assert len(table) == 3


def test_divisor_characteristics(n3_periods):
    # characteristics are measured relative to the Riemann divisor class
    z = divisor_characteristics(n3_periods, {2: 2})
    assert np.all(z.eps == 0) and np.all(z.delta == 0)
    a = divisor_characteristics(n3_periods, {3: 2})
    b = divisor_characteristics(n3_periods, {2: 2})
    shift = Characteristics(a.eps - b.eps, a.delta - b.delta)
    assert lattice_residual(n3_periods, (-4 / 3) * n3_periods.Pi[:, 0] + (2 / 3) * n3_periods.Pi[:, 1], shift) < 1e-12
    # 2[U_3] - 2[U_2] = (-4/3, 2/3) Pi against the Abel map
    w = 2 * (n3_periods.U[2] - n3_periods.U[1])
    assert lattice_residual(n3_periods, w, Characteristics(np.zeros(2), [-4 / 3, 2 / 3])) < 1e-10
    r = divisor_characteristics(n3_periods, {3: 2}, reduce=True)
    assert np.all(r.eps.real >= -1) and np.all(r.eps.real < 1) and np.all(r.delta.real < 1)


@pytest.mark.parametrize("I", [(1,), (2,), (3,)])
def test_divisor_characteristics_are_nth_periods(n3_periods, I):
    ch = divisor_characteristics(n3_periods, {i: 2 for i in I})
    assert np.allclose(3 * ch.eps, np.round(3 * ch.eps.real))
    assert np.allclose(3 * ch.delta, np.round(3 * ch.delta.real))
    w = sum(2 * n3_periods.U[i - 1] for i in I) - n3_periods.K_inf
    assert lattice_residual(n3_periods, w, ch) < 1e-10


def test_riemann_constant_genus_two(n3_periods):
    K = riemann_constants(n3_periods)
    assert np.allclose(K, 2 * n3_periods.U[1])
    # theta(v(P) - K) = 0 for every P when g = 2
    params = ThetaParams(n3_periods.Pi)
    rng = np.random.default_rng(4)
    for lam in random_off_contour(rng, n3_periods.curve, 5):
        for s in (1, 2, 3):
            v = abel_map(n3_periods, cv.sheeted_point(n3_periods.curve, lam, s))
            assert theta_cancellation(v - K, params) < 1e-10


def test_riemann_constant_elliptic():
    pd = period_matrix(cv.make_curve(2, (0, 1, 3)))
    tau = pd.Pi[0, 0]
    half = Characteristics([0.5], [0.5])
    assert lattice_residual(pd, pd.K_inf, half) < 1e-10
    assert abs(pd.K_inf[0] - (0.5 + tau / 2)) < 1e-10 or lattice_residual(pd, pd.K_inf, half) < 1e-10


def test_abel_map_zero_and_segment(n3_periods):
    c = n3_periods.curve
    P = cv.sheeted_point(c, 0.5 + 0.9j, 2)
    assert np.all(abel_map(n3_periods, P, P) == 0)
    a, b = 0.2 + 0.8j, 1.3 + 1.2j  # segment inside C_+, away from the cuts

    def du(lam):
        return cv.du_coefficients(c, lam, np.array([cv.y_value(c, x, 1) for x in lam]), 1)

    seg = np.array([integrate_function(lambda z, i=i: du(z)[i], a, b) for i in range(2)])
    assert np.max(np.abs(abel_u(n3_periods, b) - abel_u(n3_periods, a) - seg)) < 1e-11


def test_abel_u_on_contour_needs_side(n3_periods):
    from zncover.errors import PathThroughBranchPoint
    c = n3_periods.curve
    mid = 0.5 * (c.points[1] + c.points[2])
    with pytest.raises(PathThroughBranchPoint):
        abel_u(n3_periods, mid)
    # the two boundary values differ by a lattice vector
    diff = n3_periods.norm @ (abel_u(n3_periods, mid, 1) - abel_u(n3_periods, mid, -1))
    assert lattice_residual(n3_periods, diff, Characteristics.zero(2)) < 1e-10


@pytest.mark.parametrize("N", [2, 3])
def test_rauch_against_differences(N):
    lams = np.array([0, 0.7 + 0.3j, 1.5 - 0.2j, 2.2 + 0.1j, 3.1])
    pd = period_matrix(cv.make_curve(N, lams))
    for i in (1, 2, 5):
        R = rauch_derivative(pd, i)
        assert np.max(np.abs(R - R.T)) < 1e-12
        e = np.zeros(5, complex)
        e[i - 1] = 1

        def Pi_at(x):
            return period_matrix(cv.make_curve(N, lams + x * e)).Pi

        fd = richardson(Pi_at, 0.0, 2e-3)
        assert np.max(np.abs(R - fd)) < 1e-6 * np.max(np.abs(fd))


def test_rauch_elliptic_value():
    lams = np.array([0, 1, 3])
    pd = period_matrix(cv.make_curve(2, lams))
    fd = richardson(lambda x: period_matrix(cv.make_curve(2, lams + np.array([0, x, 0]))).Pi[0, 0], 0.0, 2e-3)
    assert abs(rauch_derivative(pd, 2)[0, 0] - fd) < 1e-8
