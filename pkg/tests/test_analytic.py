import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from leakaudit import analytic
from leakaudit.analytic import (
    BoundIngredients,
    MixtureParams,
    QuadratureError,
    QuadratureSpec,
    SampleTooSmallError,
)

# 40-digit mpmath references, frozen
PHI_3 = 0.9986501019683699
DENSITY_MU0_T0 = 0.4000222589212848
DENSITY_MU01_TMU = 0.4000758619553908
TRUE_LOSS_MU001 = 0.9999026755098892
TRUE_LOSS_MU01 = 0.9903573854487046
MIXTURE_BOUND_MU01 = 0.10869269901043253
MIXTURE_BOUND_MU001 = 0.02795609094536545
CLS_SQ_BOUND = 0.019194103648752325
WEISSMAN = 0.09276405654124927
LOG_BOUND = 0.308886622264863
GAP_025_4 = 0.8369882167858358
HB_02 = 0.5004024235381879


def test_normal_cdf_matches_reference():
    assert analytic.std_normal_cdf(3.0) == pytest.approx(PHI_3, abs=1e-15)
    assert analytic.std_normal_cdf(0.0) == 0.5


@given(st.floats(-30, 30))
@settings(max_examples=200, deadline=None)
def test_normal_cdf_against_mpmath(x):
    ref = float(mpmath.ncdf(x))
    # rounding of x / sqrt(2) is amplified by about x^2 in the lower tail
    rel = 4e-16 * max(1.0, x * x)
    assert analytic.std_normal_cdf(x) == pytest.approx(ref, rel=rel, abs=1e-300)


def test_normal_cdf_rejects_nan():
    with pytest.raises(ValueError):
        analytic.std_normal_cdf(float("nan"))


def test_truncated_density_values():
    p0 = MixtureParams(0.0)
    assert analytic.truncated_density(0.0, 1, p0) == pytest.approx(DENSITY_MU0_T0, rel=1e-14)
    p = MixtureParams(0.1)
    assert analytic.truncated_density(0.1, 1, p) == pytest.approx(DENSITY_MU01_TMU, rel=1e-14)
    assert analytic.truncated_density(3.5, 1, p) == 0.0
    vals = analytic.truncated_density(np.array([-4.0, 0.0, 4.0]), -1, p)
    assert vals[0] == 0.0 and vals[2] == 0.0 and vals[1] > 0


@pytest.mark.parametrize("mu", [0.0, 0.1, 0.7])
def test_truncated_density_integrates_to_one(mu):
    p = MixtureParams(mu)
    for sign in (-1, 1):
        mass, _ = quad(lambda t: analytic.truncated_density(t, sign, p), -3, 3, epsabs=1e-13)
        assert mass == pytest.approx(1.0, abs=1e-12)


def test_eta_is_tanh():
    assert analytic.eta(1.0, 0.1) == pytest.approx(0.09966799462495582, rel=1e-15)
    assert analytic.eta(2.0, 1.0) == pytest.approx(math.tanh(2.0))


@pytest.mark.parametrize("mu", [0.01, 0.1, 1.0])
def test_barron_constant_numeric(mu):
    value = analytic.barron_constant_numeric(mu)
    assert abs(value - mu) / mu < 1e-6
    assert analytic.barron_constant_tanh(-mu) == mu


def test_barron_numeric_rejects_zero():
    with pytest.raises(ValueError):
        analytic.barron_constant_numeric(0.0)


def test_minimal_true_loss():
    assert analytic.minimal_true_loss(MixtureParams(0.0)) == pytest.approx(1.0, abs=1e-8)
    assert analytic.minimal_true_loss(MixtureParams(0.01)) == pytest.approx(TRUE_LOSS_MU001, abs=1e-10)
    assert analytic.minimal_true_loss(MixtureParams(0.1)) == pytest.approx(TRUE_LOSS_MU01, abs=1e-10)


def test_minimal_true_loss_decreases_with_separation():
    values = [analytic.minimal_true_loss(MixtureParams(m)) for m in (0.0, 0.2, 0.5, 0.9)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert all(0.0 <= v <= 1.0 for v in values)


def test_quadrature_non_convergence_raises():
    with pytest.raises(QuadratureError) as info:
        analytic.minimal_true_loss(MixtureParams(0.3), QuadratureSpec(1e-300, 2))
    assert info.value.estimate is not None


def test_mixture_bound_reference_values():
    assert analytic.mixture_bound(0.1, 0.01, 100_000, 1000) == pytest.approx(MIXTURE_BOUND_MU01, rel=1e-13)
    assert analytic.mixture_bound(0.01, 0.01, 100_000, 1000) == pytest.approx(MIXTURE_BOUND_MU001, rel=1e-13)


@given(mu=st.floats(0.0, 1.0), n=st.integers(10, 10**7), k=st.integers(1, 10**4),
       delta=st.floats(1e-6, 0.5))
@settings(max_examples=200, deadline=None)
def test_generic_bound_matches_mixture_form(mu, n, k, delta):
    b = BoundIngredients(delta=delta, n=n, k=k, c_eta=mu, diam=6.0)
    assert analytic.representation_bound(b) == pytest.approx(
        analytic.mixture_bound(mu, delta, n, k), rel=1e-12)


def test_bound_terms_sum_and_monotone():
    b = BoundIngredients(delta=0.01, n=10_000, k=50, c_eta=0.3, diam=6.0)
    terms = analytic.representation_bound_terms(b)
    assert math.fsum(terms) == pytest.approx(analytic.representation_bound(b))
    bigger = BoundIngredients(delta=0.01, n=40_000, k=50, c_eta=0.3, diam=6.0)
    assert analytic.representation_bound(bigger) < analytic.representation_bound(b)


def test_bound_ingredients_validation():
    with pytest.raises(ValueError):
        BoundIngredients(delta=0.0, n=10)
    with pytest.raises(ValueError):
        BoundIngredients(delta=0.1, n=0)


def test_classification_bounds():
    assert analytic.classification_sq_bound(0.01, 100_000) == pytest.approx(CLS_SQ_BOUND, rel=1e-13)
    assert analytic.weissman_radius(0.01, 1000, 2) == pytest.approx(WEISSMAN, rel=1e-13)
    assert analytic.classification_log_bound(0.01, 1000, 2) == pytest.approx(LOG_BOUND, rel=1e-12)
    assert analytic.min_samples_log_bound(0.01, 2) == 35


def test_log_bound_needs_enough_samples():
    with pytest.raises(SampleTooSmallError) as info:
        analytic.classification_log_bound(0.01, 20, 2)
    assert info.value.min_n == 35


@given(delta=st.floats(1e-4, 0.5), n=st.integers(1, 10**6), d=st.integers(1, 50))
@settings(max_examples=200, deadline=None)
def test_log_bound_is_gap_of_radius(delta, n, d):
    try:
        value = analytic.classification_log_bound(delta, n, d)
    except SampleTooSmallError:
        return
    theta = analytic.weissman_radius(delta, n, d)
    assert value == pytest.approx(analytic.alhejji_smith_gap(theta, 2), rel=1e-12)


def test_gap_and_entropy_values():
    assert analytic.alhejji_smith_gap(0.25, 4) == pytest.approx(GAP_025_4, rel=1e-13)
    assert analytic.binary_entropy(0.2) == pytest.approx(HB_02, rel=1e-14)
    assert analytic.binary_entropy(0.0) == 0.0
    assert analytic.binary_entropy(0.5) == pytest.approx(math.log(2.0))
    with pytest.raises(ValueError):
        analytic.binary_entropy(1.5)
