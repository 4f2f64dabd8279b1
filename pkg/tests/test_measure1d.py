import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from wasscert.errors import (AmbiguousMode, BoundMismatch, DomainError, EmptyRestriction,
                             InvalidPotential, NonIntegrable)
from wasscert.functionals import relative_entropy
from wasscert.measure1d import (Gaussian, GridDensity, IntervalSet, PotentialSpec, moments,
                                normalize, quantile, restrict, standard_gaussian, tilt,
                                verify_bounds)

LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)
# quartic normalisers: closed form 4^(1/4) Gamma(1/4) / 2 and an mpmath quadrature oracle
Z_X4 = 2.563693352040848
Z_X2_X4 = 1.935247818496727


def _mass(mu):
    lo, hi = mu.effective_support
    x = np.linspace(lo, hi, 400001)
    return integrate.trapezoid(mu.pdf(x), x)


class TestNormalize:
    def test_gaussian_logz(self):
        mu = normalize(PotentialSpec.polynomial([0, 0, 0.5]))
        assert abs(mu.logZ - LOG_SQRT_2PI) < 1e-12

    def test_additive_constant(self):
        mu = normalize(PotentialSpec.polynomial([3, 0, 0.5]))
        assert abs(mu.logZ - (LOG_SQRT_2PI - 3)) < 1e-12

    def test_pure_quartic(self):
        mu = normalize(PotentialSpec.custom("x**4/4"))
        assert abs(math.exp(mu.logZ) - Z_X4) < 1e-10
        assert abs(Z_X4 - 4 ** 0.25 * math.gamma(0.25) / 2) < 1e-14

    def test_quartic_perturbed(self, quartic):
        assert abs(math.exp(quartic.logZ) - Z_X2_X4) < 1e-10

    def test_shifted_quadratic(self):
        mu = normalize(PotentialSpec.quadratic(kappa=4.0, center=1.5))
        assert abs(mu.mean - 1.5) < 1e-12
        assert abs(mu.variance - 0.25) < 1e-12

    def test_divergent(self):
        with pytest.raises(NonIntegrable):
            normalize(PotentialSpec.custom("0.5*log(1 + x**2)"))

    def test_nan_potential(self):
        with pytest.raises((InvalidPotential, NonIntegrable)):
            normalize(PotentialSpec.custom("sqrt(x)"))

    def test_normalization_cross_check(self, quartic):
        assert abs(_mass(quartic) - 1.0) < 1e-9


class TestCdfQuantile:
    def test_cdf_examples(self, gamma):
        assert gamma.cdf(0.0) == 0.5
        assert abs(Gaussian(1, 4).cdf(1.0) - 0.5) < 1e-15
        assert abs(gamma.cdf(1.0) - 0.8413447460685429) < 1e-15

    def test_quantile_examples(self, gamma):
        assert quantile(gamma, 0.5) == 0.0
        assert abs(quantile(gamma, 0.25) + 0.6744897501960817) < 1e-14
        half = restrict(gamma, IntervalSet([("-inf", 0)]))
        assert abs(quantile(half, 0.5) + 0.6744897501960817) < 1e-12

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_domain(self, gamma, p):
        with pytest.raises(DomainError):
            quantile(gamma, p)

    def test_round_trip_tabulated(self, quartic):
        p = np.linspace(1e-6, 1 - 1e-6, 20001)
        lower = p <= 0.5
        back = np.where(lower, quartic.cdf(quartic.ppf(p)), 1 - quartic.sf(quartic.isf(1 - p)))
        assert np.max(np.abs(back - p)) <= 1e-10

    def test_tail_aware_inverse(self, quartic):
        # left of the median ppf(cdf) and right of it isf(sf) recover x
        x = np.linspace(-3.2, 3.2, 641)
        x = x[quartic.pdf(x) > 1e-12]
        left, right = x[x <= 0], x[x > 0]
        assert np.max(np.abs(quartic.ppf(quartic.cdf(left)) - left)) < 1e-8
        assert np.max(np.abs(quartic.isf(quartic.sf(right)) - right)) < 1e-8

    def test_cdf_monotone_and_limits(self, quartic):
        x = np.linspace(-10, 10, 2001)
        F = quartic.cdf(x)
        assert np.all(np.diff(F) >= 0)
        assert quartic.cdf(-np.inf) == 0.0 and quartic.cdf(np.inf) == 1.0

    @given(st.floats(-4, 4), st.floats(0.2, 5))
    def test_tabulated_gaussian_quantiles(self, a, s):
        mu = normalize(PotentialSpec.quadratic(kappa=1 / s ** 2, center=a))
        z = np.linspace(-6, 6, 25)
        ref = stats.norm(a, s).ppf(stats.norm.cdf(z))
        np.testing.assert_allclose(mu.quantile_z(z), ref, atol=1e-9 * max(1, s))


class TestMoments:
    def test_standard(self, gamma):
        assert moments(gamma) == (0.0, 1.0, 0.0)

    def test_gaussian_exact(self):
        assert moments(Gaussian(2, 9)) == (2.0, 13.0, 2.0)

    def test_half_line(self, gamma):
        half = restrict(gamma, IntervalSet([("-inf", 0)]))
        b, m2, xi = moments(half)
        assert abs(b + math.sqrt(2 / math.pi)) < 1e-12
        assert abs(m2 - 1.0) < 1e-12
        assert xi == 0.0

    def test_quartic_second_moment(self, quartic):
        # mpmath oracle
        assert abs(quartic.second_moment - 0.4679199169736652) < 1e-12
        assert abs(quartic.mean) < 1e-14
        assert abs(quartic.mode) < 1e-9

    def test_ambiguous_mode(self):
        mu = normalize(PotentialSpec.custom("(x**2 - 4)**2/8"))
        with pytest.raises(AmbiguousMode):
            mu.mode

    def test_plateau_restriction_is_ambiguous(self):
        flat = GridDensity([-1, 1], [1, 1])
        with pytest.raises(AmbiguousMode):
            flat.mode


class TestRestrict:
    @pytest.mark.parametrize("A", [[("-inf", 0)], [(1, "inf")], [(-2, -1), (0.5, 3)]])
    def test_against_truncnorm(self, gamma, A):
        r = restrict(gamma, IntervalSet(A))
        pieces = [stats.truncnorm(float(a), float(b)) for a, b in IntervalSet(A).intervals]
        w = np.array([stats.norm.cdf(b) - stats.norm.cdf(a) for a, b in IntervalSet(A).intervals])
        mean = float(np.sum(w * [p.mean() for p in pieces]) / w.sum())
        assert abs(r.mean - mean) < 1e-10
        assert abs(math.exp(r.log_total) - w.sum()) < 1e-14

    def test_upper_half_line(self, gamma):
        r = restrict(gamma, IntervalSet([(1, "inf")]))
        assert abs(r.mean - 1.525135276160982) < 1e-10
        assert abs(float(r.ppf(0.5)) - 1.4096087092934546) < 1e-10

    def test_entropy_is_minus_log_mass(self, gamma, quartic):
        for m in (gamma, quartic):
            for A in ([("-inf", 0)], [(1, "inf")], [(-0.5, 0.25), (2, 3)]):
                r = restrict(m, IntervalSet(A))
                ent = relative_entropy(r, m).value
                assert abs(ent + r.log_total) < 1e-8

    def test_real_line_is_identity(self, gamma):
        assert restrict(gamma, IntervalSet.real_line()) is gamma

    def test_empty(self, gamma):
        with pytest.raises(EmptyRestriction):
            restrict(gamma, IntervalSet([(60, 70)]))

    def test_nested_restriction_intersects(self, gamma):
        r = restrict(restrict(gamma, IntervalSet([("-inf", 1)])), IntervalSet([(0, "inf")]))
        assert r.A.intervals == ((0.0, 1.0),)

    def test_interval_set_merges(self):
        s = IntervalSet([(2, 3), (0, 1), (0.5, 1.5)])
        assert s.intervals == ((0.0, 1.5), (2.0, 3.0))
        assert s.distance(IntervalSet([(4, 5)])) == 1.0
        assert s.mirror().intervals == ((-3.0, -2.0), (-1.5, 0.0))


class TestTilt:
    def test_null_tilt(self, gamma):
        t = tilt(gamma, "0", 1.0)
        assert abs(t.log_integral) < 1e-13
        assert abs(t.variance - 1) < 1e-11

    def test_linear_tilt(self, gamma):
        t = tilt(gamma, "x", 1.0)
        assert abs(t.log_integral - 0.5) < 1e-12
        assert abs(t.mean - 1) < 1e-11 and abs(t.variance - 1) < 1e-10

    def test_quadratic_tilt(self, gamma):
        t = tilt(gamma, "x**2/4", 1.0)
        assert abs(t.log_integral - 0.5 * math.log(2)) < 1e-12
        assert abs(t.variance - 2) < 1e-10
        assert abs(t.kappa_lo - 0.5) < 1e-15

    def test_divergent_tilt(self, gamma):
        with pytest.raises(NonIntegrable):
            tilt(gamma, "x**2", 1.0)

    def test_restricted_base_commutes(self, gamma):
        A = IntervalSet([(0, "inf")])
        t1 = tilt(restrict(gamma, A), "x", 1.0)
        # e^x restricted to [0, inf): log int = 1/2 + log Phi(1) - log(1/2)
        expect = 0.5 + math.log(stats.norm.cdf(1.0)) - math.log(0.5)
        assert abs(t1.log_integral - expect) < 1e-12

    @pytest.mark.parametrize("kappa", [0.0, -1.0])
    def test_bad_strength(self, gamma, kappa):
        with pytest.raises(DomainError):
            tilt(gamma, "x", kappa)


class TestBoundsAndFlags:
    def test_inferred_polynomial_bounds(self, quartic):
        assert quartic.kappa_lo == 1.0

    def test_verify_bounds(self, gamma, quartic):
        verify_bounds(gamma, 1.0, 1.0)
        verify_bounds(quartic, kappa_lo=1.0)
        with pytest.raises(BoundMismatch):
            verify_bounds(gamma, kappa_lo=2.0)
        with pytest.raises(BoundMismatch):
            verify_bounds(quartic, kappa_hi=2.0)

    def test_derivative_defect(self):
        pot = PotentialSpec.polynomial([0, 1, 0.5, 0, 0.1])
        assert pot.derivative_defect(np.linspace(-3, 3, 61)) < 1e-6

    def test_grid_density_flag(self):
        g = GridDensity(np.linspace(-3, 3, 61), np.exp(-np.linspace(-3, 3, 61) ** 2 / 2))
        assert "hypotheses_unverified" in g.flags
        assert abs(float(g.cdf(0.0)) - 0.5) < 1e-12

    def test_gaussian_rejects_degenerate(self):
        with pytest.raises(DomainError):
            Gaussian(0, 0)

    def test_tail_bound(self, quartic):
        C = quartic.tail_bound_constant()
        for R in (1.0, 2.0, 3.0):
            out = float(quartic.cdf(-R) + quartic.sf(R))
            assert out <= C * math.exp(-quartic.kappa_lo * R * R / 2)
