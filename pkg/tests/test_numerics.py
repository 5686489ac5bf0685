import math

import mpmath as mp
import numpy as np
import pytest
from scipy import special

from zncover.curve import all_roots, make_curve
from zncover.errors import DomainError, NonConvergence, ValidationError
from zncover.numerics import (PathSpec, QuadratureSpec, gauss_2f1, gauss_2f1_derivative, integrate_function,
                              integrate_segment, track_root)


def test_constant_integrand():
    assert integrate_segment(lambda u, uc: np.ones_like(u), 0, 1) == pytest.approx(1.0, abs=1e-14)


def test_segment_scaling():
    # int over [1+i, 3-2i] of lam d lam
    a, b = 1 + 1j, 3 - 2j
    val = integrate_function(lambda lam: lam, a, b)
    assert abs(val - (b * b - a * a) / 2) < 1e-13


def test_beta_integral_endpoint_singular():
    spec = QuadratureSpec(abs_tol=1e-14, endpoint_exponents=(-1 / 3, -2 / 3))
    val = integrate_segment(lambda u, uc: u ** (-1 / 3) * uc ** (-2 / 3), 0, 1, spec)
    oracle = special.gamma(1 / 3) * special.gamma(2 / 3)
    assert abs(val - oracle) < 1e-12
    assert abs(val - 2 * math.pi / math.sqrt(3)) < 1e-12


def test_euler_integral_matches_hypergeometric():
    spec = QuadratureSpec(abs_tol=1e-14, endpoint_exponents=(-1 / 3, -2 / 3))
    val = integrate_segment(lambda u, uc: u ** (-1 / 3) * uc ** (-2 / 3) * (1 - u / 2) ** (-1 / 3), 0, 1, spec)
    oracle = 2 * math.pi / math.sqrt(3) * float(mp.hyp2f1(mp.mpf(1) / 3, mp.mpf(2) / 3, 1, 0.5))
    assert abs(val - oracle) < 1e-12


def test_quadrature_spec_validation():
    with pytest.raises(ValidationError):
        QuadratureSpec(abs_tol=0)
    with pytest.raises(ValidationError):
        QuadratureSpec(endpoint_exponents=(-1.0, 0.0))


def test_quadrature_reports_stall():
    spec = QuadratureSpec(abs_tol=1e-14, max_subdivisions=0, max_level=3)
    with pytest.raises(NonConvergence):
        integrate_segment(lambda u, uc: np.sin(400 * u), 0, 1, spec)


def test_2f1_at_origin():
    assert gauss_2f1(1 / 3, 2 / 3, 1, 0) == 1


@pytest.mark.parametrize("t", [0.1, 0.37, 0.5, 0.8 + 0.3j, -0.6 + 1.2j])
def test_2f1_parameter_symmetry(t):
    assert abs(gauss_2f1(1 / 3, 2 / 3, 1, t) - gauss_2f1(2 / 3, 1 / 3, 1, t)) < 1e-14


@pytest.mark.parametrize("a,b,c", [(1 / 3, 2 / 3, 1), (0.5, 0.5, 1), (0.3 + 0.2j, 1.1, 2.4), (1.5, -0.25, 0.7)])
@pytest.mark.parametrize("z", [0.5, 0.93, 0.999, -0.7, 0.2 + 0.9j, 1.3 + 0.4j, -4 + 1j, 0.6 - 0.8j, 2.5 - 0.1j])
def test_2f1_against_mpmath(a, b, c, z):
    ref = complex(mp.hyp2f1(a, b, c, z))
    assert abs(gauss_2f1(a, b, c, z) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_2f1_half_value():
    # direct series oracle, summed in extended precision
    ref = mp.nsum(lambda n: mp.rf(mp.mpf(1) / 3, n) * mp.rf(mp.mpf(2) / 3, n) / mp.factorial(n) ** 2 / 2 ** n,
                  [0, mp.inf])
    assert abs(gauss_2f1(1 / 3, 2 / 3, 1, 0.5) - float(ref)) < 1e-14


def test_2f1_derivative():
    for z in (0.3, 0.7 + 0.2j, 0.98):
        ref = complex(mp.diff(lambda x: mp.hyp2f1(1 / 3, 2 / 3, 1, x), z))
        assert abs(gauss_2f1_derivative(1 / 3, 2 / 3, 1, z) - ref) < 1e-10 * abs(ref)


def test_2f1_domain_errors():
    with pytest.raises(DomainError):
        gauss_2f1(0.5, 0.5, -2, 0.3)
    with pytest.raises(DomainError):
        gauss_2f1(1 / 3, 2 / 3, 1, 1.0)


def _circle(center, r, n=64, turns=1):
    ang = 2 * np.pi * turns * np.arange(n + 1) / n
    ang[-1] = 2 * np.pi * turns
    return PathSpec(tuple(center + r * np.exp(1j * ang)))


def test_constant_path_identity():
    c = make_curve(3, (0, 1, 2))
    val, perm = track_root(PathSpec((0.5 + 0.5j, 0.5 + 0.5j)), lambda lam: all_roots(c, lam))
    assert perm == [1, 2, 3]
    assert val == all_roots(c, 0.5 + 0.5j)[0]


@pytest.mark.parametrize("N", [2, 3, 4])
def test_loop_around_zero_of_p(N):
    c = make_curve(N, (0, 1, 2))
    path = _circle(0.0, 0.3)
    start = all_roots(c, path.vertices[0])[0]
    val, perm = track_root(path, lambda lam: all_roots(c, lam))
    assert abs(val / start - np.exp(2j * np.pi / N)) < 1e-12
    assert perm == [(s % N) + 1 for s in range(1, N + 1)]


@pytest.mark.parametrize("N", [3, 4])
def test_loop_around_zero_of_q(N):
    c = make_curve(N, (0, 1, 2))
    path = _circle(1.0, 0.3)
    start = all_roots(c, path.vertices[0])[0]
    val, perm = track_root(path, lambda lam: all_roots(c, lam))
    assert abs(val / start - np.exp(-2j * np.pi / N)) < 1e-12
    assert perm[0] == N
