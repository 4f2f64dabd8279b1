import numpy as np
import pytest

from wasscert.errors import ConfigError
from wasscert.functions import FunctionSpec, as_function


def test_symbolic_derivatives():
    f = FunctionSpec.from_expr("x**3 - 3*x")
    x = np.array([-1.5, 0.0, 2.0])
    np.testing.assert_allclose(f(x), x ** 3 - 3 * x)
    np.testing.assert_allclose(f.derivative(x), 3 * x ** 2 - 3)
    np.testing.assert_allclose(f.second_derivative(x), 6 * x)
    assert not f.numeric_derivative


def test_constant_second_derivative_and_polynomial():
    assert FunctionSpec.from_expr("x**2/4 + x").constant_second_derivative() == 0.5
    assert FunctionSpec.from_expr("x**4").constant_second_derivative() is None
    assert FunctionSpec.from_expr("1 + 2*x + 3*x**2").polynomial_coefficients() == [1, 2, 3]
    assert FunctionSpec.from_expr("exp(x)").polynomial_coefficients() is None


def test_callable_falls_back_to_differences():
    f = as_function(np.sin)
    assert f.numeric_derivative
    x = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(f.derivative(x), np.cos(x), atol=1e-9)
    np.testing.assert_allclose(f.second_derivative(x), -np.sin(x), atol=1e-6)


def test_constants_are_broadcast():
    f = as_function(0)
    assert f(np.zeros(4)).shape == (4,)


def test_critical_points():
    f = FunctionSpec.from_expr("x**3")
    assert f.critical_points(-5, 5) == [0.0]
    g = as_function(lambda x: (x - 1.0) ** 3)
    pts = g.critical_points(-3, 3)
    assert len(pts) == 1 and abs(pts[0] - 1.0) < 1e-4


@pytest.mark.parametrize("bad", ["x +* 2", "y**2", object()])
def test_bad_expressions(bad):
    with pytest.raises(ConfigError):
        as_function(bad)
