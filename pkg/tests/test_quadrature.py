import math

import numpy as np
import pytest
from scipy import special

from wasscert.quadrature import composite_nodes, gauss_legendre, probit_integrate


def test_gauss_legendre_exact_for_degree_2n_minus_1():
    s, w = gauss_legendre(8)
    for k in range(16):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert abs(np.sum(w * s ** k) - exact) < 1e-14


def test_composite_rule_length_split():
    x, w = composite_nodes([0.0, 1.0, 3.0], panels=3, order=5)
    assert abs(w.sum() - 3.0) < 1e-14
    assert abs(np.sum(w * x ** 2) - 9.0) < 1e-12


@pytest.mark.parametrize("k, exact", [(0, 1.0), (2, 1.0), (4, 3.0), (6, 15.0)])
def test_gaussian_moments(k, exact):
    # h(p) = Q(p)^k with Q the standard normal quantile, i.e. h(Phi(z)) = z^k
    val, err = probit_integrate(lambda z: z ** k)
    assert abs(val - exact) < 1e-12 * exact


def test_breaks_handle_quantile_jump():
    # step function in p: 0 below 0.3, 1 above
    val, _ = probit_integrate(lambda z: (special.ndtr(z) > 0.3).astype(float), breaks_p=[0.3])
    assert abs(val - 0.7) < 1e-13


def test_error_estimate_reported():
    val, err = probit_integrate(lambda z: np.cos(z))
    assert abs(val - math.exp(-0.5)) < 1e-12
    assert err >= 0
