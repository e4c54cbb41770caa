import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import logsumexp

import mtrumor as mt


def test_log_pmf_V_examples(consts):
    table = mt.get_table(12)
    assert mt.log_pmf_V(10, 1, table, consts) == pytest.approx(math.log(0.01),
                                                               abs=1e-12)
    assert mt.log_pmf_V(1, 1, table, consts) == pytest.approx(0.0, abs=1e-12)
    assert mt.log_pmf_V(2, 2, table, consts) == pytest.approx(math.log(0.75),
                                                              abs=1e-12)
    with pytest.raises(ValueError):
        mt.log_pmf_V(5, 0, table, consts)
    with pytest.raises(ValueError):
        mt.log_pmf_V(5, 6, table, consts)


def test_n1_distribution():
    d = mt.distribution(1, "rational")
    assert d.fractions == [Fraction(1)]
    assert mt.dp_distribution(1).pmf(0) == 1.0
    assert mt.moments(1) == (0.0, 0.0)


def test_n2_distribution():
    d = mt.distribution(2, "rational")
    assert d.fractions == [Fraction(3, 4), Fraction(1, 4)]
    dp = mt.dp_distribution(2)
    assert dp.pmf([0, 1]) == pytest.approx([0.75, 0.25], abs=1e-15)


def test_n2_moments():
    mean, var = mt.moments(2)
    assert mean == pytest.approx(0.25, abs=1e-15)
    assert var == pytest.approx(3.0 / 16.0, abs=1e-15)


@pytest.mark.parametrize("n", [2, 10, 100])
def test_endpoint_identity_exact(n):
    d = mt.distribution(n, "rational")
    assert d.fractions[n - 1] * n * n == 1


def test_rational_normalization_exact():
    for n in range(1, 61):
        d = mt.distribution(n, "rational")
        assert sum(d.fractions) == 1
        assert d.normalization_error() == 0.0


def test_dp_exact_equals_rational_formula():
    # under the formula rate convention the jump chain reproduces the exact
    # PMF identically, fraction by fraction
    for n in range(1, 13):
        formula = mt.distribution(n, "rational").fractions
        dp = mt.dp_distribution(n, exact=True).fractions
        assert dp == formula


def test_dp_matches_formula_to_1e12():
    for n in range(1, 61):
        f = np.exp(mt.distribution(n, "auto").dense_log_pmf())
        g = np.exp(mt.dp_distribution(n).dense_log_pmf())
        assert float(np.max(np.abs(f - g))) <= 1e-12


def test_paper_literal_n2_distribution():
    dp = mt.dp_distribution(2, convention="paper_literal", exact=True)
    assert dp.fractions == [Fraction(10, 27), Fraction(8, 27), Fraction(9, 27)]
    lemma = np.array([0.75, 0.25, 0.0])
    tv = mt.total_variation(dp.pmf([0, 1, 2]), lemma)
    assert tv >= 0.15


def test_paper_literal_n1_breaks_lemma():
    dp = mt.dp_distribution(1, convention="paper_literal", exact=True)
    assert dp.fractions == [Fraction(1, 2), Fraction(1, 2)]


def test_float_formula_matches_rational():
    dr = mt.distribution(120, "rational")
    df = mt.distribution(120, "float_formula")
    rel = np.max(np.abs(np.expm1(df.dense_log_pmf() - dr.dense_log_pmf())))
    assert rel <= 1e-11


def test_asymptotic_matches_float_centrally(consts):
    mt.get_table(600)
    da = mt.distribution(600, "asymptotic_d")
    df = mt.distribution(600, "float_formula")
    ks = np.arange(600)
    window = np.abs(ks - 600 * consts.x_inf) <= 5 * consts.sigma * math.sqrt(600)
    rel = np.max(np.abs(np.expm1(da.log_pmf(ks[window]) - df.log_pmf(ks[window]))))
    assert 0 < rel <= 0.01


def test_backend_auto_selection():
    caps = mt.ResourceCaps(rational_max=50, float_max=200)
    assert mt.distribution(50, "auto", caps=caps).backend == "rational"
    assert mt.distribution(51, "auto", caps=caps).backend == "float_formula"
    assert mt.distribution(201, "auto", caps=caps).backend == "asymptotic_d"


def test_resource_caps_reported():
    caps = mt.ResourceCaps(rational_max=20, float_max=50, dp_max=30)
    with pytest.raises(ValueError, match="rational"):
        mt.distribution(21, "rational", caps=caps)
    with pytest.raises(ValueError, match="float_formula"):
        mt.distribution(51, "float_formula", caps=caps)
    with pytest.raises(ValueError, match="dp_oracle"):
        mt.dp_distribution(31, caps=caps)
    with pytest.raises(ValueError):
        mt.distribution(10, "no_such_backend")
    with pytest.raises(ValueError):
        mt.distribution(0)


def test_support_bounds_checked():
    d = mt.distribution(5, "rational")
    with pytest.raises(ValueError):
        d.log_pmf(5)
    with pytest.raises(ValueError):
        d.log_pmf(-1)


def test_tail_whole_support_is_zero(consts):
    # pick z so small that both half-lines meet: the tail is everything
    n = 10
    z = 0.01 / math.sqrt(n)
    assert mt.tail_log_prob(n, z, 1.0, "both") == pytest.approx(0.0, abs=1e-12)


def test_tail_against_direct_sum(consts):
    n, z, b = 100, 1.0, 2.0
    d = mt.distribution(n, "rational")
    lp = d.dense_log_pmf()
    center = n * consts.x_inf
    a = z * b * math.sqrt(n)
    ks = np.arange(n)
    mask = np.abs(ks - center) >= a
    want = float(logsumexp(lp[mask]))
    assert mt.tail_log_prob(n, z, b, "both") == pytest.approx(want, abs=1e-12)
    left = float(logsumexp(lp[(ks - center) <= -a]))
    right = float(logsumexp(lp[(ks - center) >= a]))
    assert mt.tail_log_prob(n, z, b, "left") == pytest.approx(left, abs=1e-12)
    assert mt.tail_log_prob(n, z, b, "right") == pytest.approx(right, abs=1e-12)


def test_right_tail_dominates_endpoint(consts):
    # the endpoint k = n-1 with mass n^-2 belongs to any right tail that
    # reaches it, so the right-tail log-probability is at least ln(n^-2)
    for n, b in ((100, 2.0), (3000, 1.5), (10 ** 6, 2.0)):
        lp = mt.tail_log_prob(n, 1.0, b, "right")
        assert lp >= -2.0 * math.log(n)


def test_windowed_tail_matches_dense():
    # force the windowed path at an n the dense path can also handle
    small_caps = mt.ResourceCaps(float_max=1000)
    res_w = mt.tail_log_prob_detail(4000, 1.0, 1.5, "both", caps=small_caps)
    dense = mt.tail_log_prob(4000, 1.0, 1.5, "both")
    assert res_w.backend == "asymptotic_d"
    assert res_w.log_prob == pytest.approx(dense, abs=1e-3)
    assert res_w.trunc_log_bound < dense - 30


def test_tail_empty_is_minus_inf():
    assert mt.tail_log_prob(10, 50.0, 10.0, "both") == -math.inf
    with pytest.raises(ValueError):
        mt.tail_log_prob(10, -1.0, 1.0)
    with pytest.raises(ValueError):
        mt.tail_log_prob(10, 1.0, 0.0)
    with pytest.raises(ValueError):
        mt.tail_log_prob(10, 1.0, 1.0, "sideways")


def test_left_layer_log_prob(consts):
    # P(V_n <= delta n) against a direct rational sum
    n = 60
    d = mt.distribution(n, "rational")
    want = float(sum(d.fractions[n - j - 1 + 1] for j in range(0, 6)))
    # careful: k = n - j, j = 1..6 -> k = 54..59
    want = float(sum(d.fractions[k] for k in range(54, 60)))
    got = math.exp(mt.left_layer_log_prob(n, 0.1))
    assert got == pytest.approx(want, rel=1e-12)
    assert mt.left_layer_log_prob(50, 1e-3) == -math.inf
    with pytest.raises(ValueError):
        mt.left_layer_log_prob(50, 0.0)


def test_moments_trend(consts):
    mean, var = mt.moments(500)
    assert abs(mean / 500 - consts.x_inf) <= 5e-3
    assert abs(var / 500 - consts.sigma2) <= 0.05 * consts.sigma2


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=1, max_value=40))
def test_dp_and_formula_agree(n):
    f = np.exp(mt.distribution(n, "auto").dense_log_pmf())
    g = np.exp(mt.dp_distribution(n).dense_log_pmf())
    assert float(np.max(np.abs(f - g))) <= 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=1, max_value=60))
def test_float_normalization(n):
    d = mt.distribution(n, "float_formula")
    assert d.normalization_error() <= 1e-10


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=1, max_value=25))
def test_literal_support_size(n):
    dp = mt.dp_distribution(n, convention="paper_literal")
    assert dp.support_size == n + 1
    assert mt.dp_distribution(n).support_size == n
