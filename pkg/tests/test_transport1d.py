import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from wasscert.errors import InadmissiblePair, MissingBounds
from wasscert.measure1d import (Gaussian, GridDensity, IntervalSet, PotentialSpec, normalize, restrict,
                                standard_gaussian)
from wasscert.transport1d import (DualPair, contraction_check, cyclical_monotonicity_defect,
                                  dual_gap, ma_residual, optimal_map, w2, w2_squared,
                                  w2_squared_xspace)
from wasscert.verdict import Verdict

# mpmath oracle: T'(0) for the map from gamma to exp(-x^2/2 - x^4/4)/Z
TPRIME0_QUARTIC = 0.7720521778529823


@pytest.fixture(scope="module")
def five(gamma, quartic):
    return [gamma, Gaussian(1.0, 4.0), Gaussian(-0.5, 0.25), quartic,
            normalize(PotentialSpec.custom("x**4/4"))]


class TestOptimalMap:
    @pytest.mark.parametrize("a,s", [(0.0, 2.0), (1.5, 0.5), (-3.0, 1.0)])
    def test_gaussian_linear(self, gamma, a, s):
        T = optimal_map(gamma, Gaussian(a, s * s))
        x = np.array([-1.0, 0.0, 1.0])
        np.testing.assert_allclose(T(x), a + s * x, atol=1e-12)
        np.testing.assert_allclose(T.derivative(x), s, rtol=1e-12)

    def test_self_map(self, quartic):
        T = optimal_map(quartic, quartic)
        assert np.max(np.abs(T.y - T.x)) <= 1e-10

    def test_half_line_target(self, gamma):
        half = restrict(gamma, IntervalSet([(0, "inf")]))
        T = optimal_map(gamma, half)
        assert abs(float(T(np.array([0.0]))[0]) - stats.norm.ppf(0.75)) < 1e-10
        assert "source_support_gap" not in T.flags

    def test_restricted_source_flagged(self, gamma):
        half = restrict(gamma, IntervalSet([(0, "inf")]))
        assert "source_support_gap" in optimal_map(half, gamma).flags

    def test_small_grid_rejected(self, gamma):
        with pytest.raises(ValueError):
            optimal_map(gamma, gamma, K=32)

    def test_invariants_quartic(self, gamma, quartic):
        T = optimal_map(gamma, quartic, K=512)
        assert T.monotone and np.all(np.diff(T.y) > 0)
        assert T.pushforward_defect() < 1e-8
        assert np.all(T.slope > 0)
        assert abs(float(T.derivative(np.array([0.0]))[0]) - TPRIME0_QUARTIC) < 1e-10
        assert cyclical_monotonicity_defect(T.x[::16], T.y[::16]) >= 0

    def test_interpolant_matches_map(self, gamma, quartic):
        T = optimal_map(gamma, quartic, K=1024)
        x = np.linspace(-2, 2, 41)
        assert np.max(np.abs(T.interpolate(x) - T(x))) < 1e-5


class TestW2:
    def test_gaussian_closed_form(self):
        assert abs(w2(Gaussian(0, 1), Gaussian(1, 4)) - math.sqrt(2)) < 1e-10

    def test_identical(self, quartic):
        assert w2(quartic, quartic) == 0.0

    def test_translation(self, gamma):
        assert abs(w2(gamma, gamma.translate(3.0)) - 3.0) < 1e-10

    def test_two_routes_agree(self, five):
        for mu in five:
            for nu in five:
                q, _ = w2_squared(mu, nu)
                x, _ = w2_squared_xspace(mu, nu)
                assert abs(q - x) <= 1e-7 * max(1.0, q)

    def test_metric_axioms(self, five):
        d = np.array([[w2(a, b) for b in five] for a in five])
        assert np.max(np.abs(d - d.T)) <= 1e-9
        assert np.all(np.abs(np.diag(d)) <= 1e-9)
        off = d[~np.eye(len(five), dtype=bool)]
        assert np.all(off > 1e-9)
        for i in range(5):
            for j in range(5):
                for k in range(5):
                    assert d[i, k] <= d[i, j] + d[j, k] + 1e-8

    @given(st.floats(-3, 3), st.floats(0.3, 3), st.floats(-3, 3), st.floats(0.3, 3))
    def test_gaussian_formula(self, a, s, b, r):
        val, _ = w2_squared(Gaussian(a, s * s), Gaussian(b, r * r))
        assert abs(val - ((a - b) ** 2 + (s - r) ** 2)) <= 1e-9 * max(1.0, val)

    @given(st.floats(-2, 2), st.floats(-2, 2), st.booleans())
    def test_translation_identity(self, gamma, quartic, a, b, use_quartic):
        mu = quartic.translate(b) if use_quartic else Gaussian(b, 2.0)
        nu = gamma
        lhs = 0.5 * w2_squared(mu.translate(a), nu)[0] - 0.5 * w2_squared(mu, nu)[0]
        rhs = a * mu.mean - a * nu.mean + a * a / 2
        assert abs(lhs - rhs) <= 1e-7


class TestResidual:
    def test_linear_map(self, gamma):
        r = ma_residual(optimal_map(gamma, Gaussian(0, 4), K=512))
        assert r.residual <= 1e-7
        np.testing.assert_allclose(r.slope_ma, 2.0, rtol=1e-12)
        assert not r.overflow

    def test_identity(self, quartic):
        assert ma_residual(optimal_map(quartic, quartic)).residual <= 1e-9

    def test_convergence_order(self, gamma):
        target = normalize(PotentialSpec.custom("x**4/4"))
        r256 = ma_residual(optimal_map(gamma, target, K=256)).residual
        r512 = ma_residual(optimal_map(gamma, target, K=512)).residual
        assert r256 >= 4 * r512


class TestContraction:
    def test_tight_linear(self, gamma):
        res = contraction_check(optimal_map(gamma, Gaussian(0, 0.25)), 1.0, 4.0)
        assert abs(res.sup_slope - 0.5) < 1e-12 and res.bound == 0.5
        assert res.verdict is Verdict.TIGHT and res.monotone

    def test_identity(self, gamma):
        res = contraction_check(optimal_map(gamma, gamma), 1.0, 1.0)
        assert abs(res.sup_slope - 1.0) < 1e-12
        assert res.verdict in (Verdict.TIGHT, Verdict.HOLDS)

    def test_strict(self, gamma, quartic):
        res = contraction_check(optimal_map(gamma, quartic), 1.0, 1.0)
        assert res.sup_slope < 1.0 and res.verdict is Verdict.HOLDS

    def test_missing_bounds(self, gamma):
        grid = GridDensity(np.linspace(-4, 4, 81), np.exp(-np.linspace(-4, 4, 81) ** 2 / 2))
        with pytest.raises(MissingBounds):
            contraction_check(optimal_map(grid, gamma))


class TestDual:
    def test_zero_pair(self, gamma):
        r = dual_gap(DualPair("0", "0"), gamma, Gaussian(1, 1))
        assert r.dual == 0.0 and abs(r.gap - 1.0) < 1e-10

    def test_optimal_translation_pair(self, gamma):
        r = dual_gap(DualPair("-2*x", "2*x - 1"), gamma, Gaussian(1, 1))
        assert abs(r.dual - 1.0) < 1e-10 and abs(r.gap) < 1e-9

    def test_inadmissible(self, gamma):
        with pytest.raises(InadmissiblePair) as info:
            dual_gap(DualPair("1", "1"), gamma, gamma)
        x, y, margin = info.value.witness
        assert margin < 0

    @given(st.floats(-2, 2), st.floats(-1, 1))
    def test_weak_duality(self, gamma, a, c):
        # f(x) = 2ax - a^2 - c, g(y) = -2ay + c is admissible for |x-y|^2
        pair = DualPair(f"2*({a})*x - ({a})**2 - ({c})", f"-2*({a})*x + ({c})")
        r = dual_gap(pair, gamma, Gaussian(0.5, 2.0))
        assert r.gap >= -1e-8
