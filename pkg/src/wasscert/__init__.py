"""Certified numerics for transport inequalities on the real line."""
__version__ = "0.1.0"

from wasscert.errors import *  # noqa: F401,F403
from wasscert.measure1d import (Gaussian, GridDensity, IntervalSet, Measure1D, PotentialSpec,
                                moments, normalize, quantile, restrict, standard_gaussian, tilt,
                                verify_bounds)
from wasscert.transport1d import (DualPair, TransportMap1D, contraction_check, dual_gap,
                                  ma_residual, optimal_map, w2, w2_squared)
from wasscert.functionals import (LEBESGUE, fisher_information, levy_point, phi_correction,
                                  relative_entropy)
from wasscert.geodesics import (GeodesicCurve, convexity_modulus, entropy_curve, interpolate)
from wasscert.gaussian_nd import (GaussianNd, SpdPair, bures_w2, equality_case,
                                  gauss_rel_entropy, logdet_gap, translation_check)
from wasscert.certificate import Certificate
from wasscert.verdict import Verdict
from wasscert.certify import (Bounds, CATALOG, SweepSpec, evaluate, sweep, verify_blaschke_santalo,
                              verify_concentration, verify_hwi_lsi, verify_lemma_core,
                              verify_poincare, verify_symmetrized, verify_talagrand)
