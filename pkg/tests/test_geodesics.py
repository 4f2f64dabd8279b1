import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wasscert.errors import DegenerateCurve, DomainError, NumericMonotonicityBreak
from wasscert.functionals import LEBESGUE, relative_entropy
from wasscert.geodesics import (GeodesicCurve, QuantileMixture, chebyshev_times,
                                convexity_modulus, entropy_curve, interpolate)
from wasscert.measure1d import Gaussian, PotentialSpec, normalize
from wasscert.transport1d import w2, w2_squared


class TestInterpolate:
    @given(st.floats(-3, 3), st.floats(0.05, 0.95))
    def test_translation(self, gamma, a, t):
        mu = interpolate(gamma, Gaussian(a, 1), t)
        assert abs(mu.mean - t * a) < 1e-9
        assert abs(mu.variance - 1) < 1e-8
        x = np.array([-1.0, 0.3, 2.0])
        np.testing.assert_allclose(mu.pdf(x), Gaussian(t * a, 1).pdf(x), rtol=1e-8)

    def test_endpoints(self, gamma, quartic):
        assert interpolate(gamma, quartic, 0.0) is gamma
        assert interpolate(gamma, quartic, 1.0) is quartic

    def test_bad_time(self, gamma):
        with pytest.raises(DomainError):
            interpolate(gamma, gamma, 1.5)

    @pytest.mark.parametrize("s0,s1,t", [(1.0, 2.0, 0.5), (0.5, 3.0, 0.25)])
    def test_generalized_gaussian(self, gamma, s0, s1, t):
        mu = interpolate(Gaussian(0, s0 ** 2), Gaussian(0, s1 ** 2), t, base=gamma)
        s = (1 - t) * s0 + t * s1
        assert abs(mu.variance - s * s) < 1e-8
        assert abs(float(mu.cdf(0.7)) - float(Gaussian(0, s * s).cdf(0.7))) < 1e-12

    def test_density_normalised(self, gamma, quartic):
        mu = interpolate(Gaussian(1, 4), quartic, 0.4)
        assert mu.normalization_drift() < 1e-8

    def test_monotonicity_break_detected(self, gamma):
        with pytest.raises(NumericMonotonicityBreak):
            QuantileMixture([Gaussian(0, 4), gamma], [-1.0, 1.0])


class TestCurve:
    def test_endpoint_distances(self, gamma, quartic):
        c = GeodesicCurve(Gaussian(-1, 2), quartic, times=[0.0, 1.0])
        assert w2(c.at(0.0), c.mu0) <= 1e-7
        assert w2(c.at(1.0), c.mu1) <= 1e-7

    def test_constant_speed(self, gamma, quartic):
        c = GeodesicCurve(Gaussian(-1, 2), quartic)
        d = w2(c.mu0, c.mu1)
        for s, t in [(0.1, 0.4), (0.25, 0.9), (0.5, 0.6)]:
            assert abs(w2(c.at(s), c.at(t)) - (t - s) * d) <= 1e-6

    def test_chebyshev_default(self):
        t = chebyshev_times()
        assert t.size == 21 and np.all((t > 0) & (t < 1))


class TestEntropyCurve:
    def test_translation_curve(self, gamma):
        c = GeodesicCurve(gamma, Gaussian(2, 1), times=[0.5])
        ec = entropy_curve(c, gamma)
        assert abs(ec.values[0] - 0.5) < 1e-10

    def test_constant_curve(self, quartic):
        ec = entropy_curve(GeodesicCurve(quartic, quartic), LEBESGUE)
        assert np.max(np.abs(ec.values - ec.values[0])) < 1e-10

    def test_widening_curve(self, gamma):
        c = GeodesicCurve(gamma, Gaussian(0, 4), times=[0.3, 0.7])
        ec = entropy_curve(c, gamma)
        sig = 1 + c.times
        np.testing.assert_allclose(ec.values, (sig ** 2 - 1 - 2 * np.log(sig)) / 2, atol=1e-10)
        assert abs(ec.e1 - 0.806853) < 1e-6

    def test_endpoint_consistency(self, gamma, quartic):
        ec = entropy_curve(GeodesicCurve(Gaussian(1, 0.5), quartic, times=[0.0, 1.0]), gamma)
        assert abs(ec.values[0] - relative_entropy(Gaussian(1, 0.5), gamma).value) <= 1e-6
        assert abs(ec.values[1] - relative_entropy(quartic, gamma).value) <= 1e-6

    def test_csv(self, gamma):
        ec = entropy_curve(GeodesicCurve(gamma, Gaussian(1, 1), times=[0.5]), gamma)
        lines = ec.to_csv().splitlines()
        assert lines[0] == "t,entropy,deficit" and len(lines) == 2

    @pytest.mark.parametrize("pair", [("gauss", "quartic"), ("quartic", "wide"),
                                      ("x4", "shifted")])
    def test_shannon_displacement_convex(self, gamma, quartic, pair):
        pool = {"gauss": gamma, "quartic": quartic, "wide": Gaussian(0.5, 5.0),
                "x4": normalize(PotentialSpec.custom("x**4/4")), "shifted": Gaussian(-2, 0.3)}
        ec = entropy_curve(GeodesicCurve(pool[pair[0]], pool[pair[1]]), LEBESGUE)
        assert np.min(ec.deficits) >= -1e-6


class TestConvexityModulus:
    @pytest.mark.parametrize("a", [0.5, 1.0, 3.0])
    def test_translation_saturates(self, gamma, a):
        assert abs(convexity_modulus(GeodesicCurve(gamma, Gaussian(a, 1)), gamma) - 1) < 1e-6

    def test_lebesgue_translation_is_affine(self, gamma):
        c = GeodesicCurve(gamma, Gaussian(2, 1))
        ec = entropy_curve(c, LEBESGUE)
        assert np.max(np.abs(ec.deficits)) < 1e-9
        assert convexity_modulus(c, LEBESGUE, ec) >= -1e-6

    def test_generalized_prediction(self, gamma):
        c = GeodesicCurve(gamma, Gaussian(0, 4), base=gamma)
        k = convexity_modulus(c, gamma)
        # closed form E(t) = ((1+t)^2 - 1)/2 - log(1+t), W^2 = 1
        t = c.times
        e = ((1 + t) ** 2 - 1) / 2 - np.log1p(t)
        e1 = 1.5 - math.log(2)
        expect = np.min((t * e1 - e) / (0.5 * t * (1 - t)))
        assert abs(k - expect) < 1e-7
        assert k >= 1.25 - 1e-4

    def test_reference_convexity(self, gamma, quartic):
        # quartic reference is 1-convex
        for mu0, mu1 in [(gamma, Gaussian(1, 3)), (Gaussian(-1, 0.5), quartic)]:
            assert convexity_modulus(GeodesicCurve(mu0, mu1), quartic) >= 1 - 1e-4

    def test_equal_barycenter_shannon(self, gamma, quartic):
        # source gamma: Poincare constant 1 and upper curvature 1; k1 is the target's
        # lower curvature, so the predicted Shannon modulus is min(1, k1)
        for mu1, k1 in [(quartic, 1.0), (Gaussian(0, 4), 0.25), (Gaussian(0, 0.5), 2.0)]:
            k = convexity_modulus(GeodesicCurve(gamma, mu1), LEBESGUE)
            assert k >= 1.0 * min(1.0, k1 / 1.0) - 1e-4

    def test_two_sided_prediction(self, gamma):
        # generalized geodesics, base gamma (kappa' = 1), reference gamma (kappa = 1)
        for s0, s1 in [(1.0, 2.0), (0.5, 1.5), (2.0, 3.0)]:
            k0, k1 = 1 / s0 ** 2, 1 / s1 ** 2
            c = GeodesicCurve(Gaussian(0, s0 ** 2), Gaussian(0, s1 ** 2), base=gamma)
            assert convexity_modulus(c, gamma) >= 1 + min(k0, k1) - 1e-4

    def test_degenerate(self, gamma):
        with pytest.raises(DegenerateCurve):
            convexity_modulus(GeodesicCurve(gamma, gamma), gamma)
