import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smalldev.brownian import wiener_term_prob
from smalldev.errors import DivergentSeriesError, DomainError
from smalldev.params import DriftSpec, WeightParams
from smalldev.scaling import log_ve
from smalldev.series import (critical_threshold, eps_for_lambda, limit_constant,
                             limit_probe, weighted_series_wiener)

from _frozen import (DRIFT_RATIO_LAM_005, FOUR_OVER_PI, SERIES_NEVILLE_4PT,
                     SERIES_NORMALIZED)

ENGINE_RTOL = 5e-8  # engine agrees with the 30-digit oracle well inside this


def test_weight_params_validation():
    with pytest.raises(DomainError):
        WeightParams(1.0, 0.0)
    with pytest.raises(DomainError):
        WeightParams(0.5, 0.0)
    with pytest.raises(DomainError):
        WeightParams(2.0, -1.0)
    WeightParams(1.0001, -0.9999)


def test_drift_spec_validation():
    with pytest.raises(DomainError):
        DriftSpec(1.0, "zero")
    with pytest.raises(DomainError):
        DriftSpec(0.0, "sinusoidal")
    assert DriftSpec.zero().value_at(17) == 0.0
    assert DriftSpec.canonical(3.0).value_at(1) == 3.0  # log(1 v e) = 1


def test_critical_threshold_values():
    assert critical_threshold(WeightParams(2.0, 0.0), 1.0, "phi") == pytest.approx(1.0)
    assert critical_threshold(WeightParams(5.0, 0.0), 1.0, "phi") == pytest.approx(0.5)
    assert critical_threshold(WeightParams(2.0, 0.0), 1.0, "sqrt_n_over_log_n") \
        == pytest.approx(math.pi / math.sqrt(8.0), rel=1e-14)
    assert critical_threshold(WeightParams(2.0, 0.0), 2.0, "sqrt_n_over_log_n") \
        == pytest.approx(2.0 * math.pi / math.sqrt(8.0), rel=1e-14)
    with pytest.raises(DomainError):
        critical_threshold(WeightParams(2.0, 0.0), -1.0, "phi")
    with pytest.raises(DomainError):
        critical_threshold(WeightParams(2.0, 0.0), 1.0, "bogus")


def test_limit_constant_values():
    assert limit_constant(WeightParams(2.0, 0.0), 0.0) == pytest.approx(FOUR_OVER_PI, rel=1e-14)
    assert limit_constant(WeightParams(2.0, 1.0), 0.0) == pytest.approx(FOUR_OVER_PI, rel=1e-14)
    assert limit_constant(WeightParams(2.0, 0.0), 1.0) \
        == pytest.approx(FOUR_OVER_PI * math.exp(2.0), rel=1e-14)
    assert limit_constant(WeightParams(5.0, 0.0), 0.5) \
        == pytest.approx(FOUR_OVER_PI * math.exp(8.0), rel=1e-14)


@pytest.mark.parametrize("case", sorted(SERIES_NORMALIZED))
def test_engine_matches_high_precision_oracle(case):
    r, a, tau = case
    params = WeightParams(r, a)
    drift = DriftSpec.canonical(tau)
    for lam, want in SERIES_NORMALIZED[case].items():
        res = weighted_series_wiener(params, eps_for_lambda(params, lam), drift, 1e-7)
        assert res.normalized == pytest.approx(want, rel=ENGINE_RTOL)
        assert abs(res.normalized - want) / want <= max(res.rel_err_bound, 1e-12) * 5


def test_result_identities_hold_exactly():
    params = WeightParams(2.0, 0.5)
    res = weighted_series_wiener(params, 0.8, DriftSpec.canonical(0.3), 1e-6)
    assert res.total == res.partial_sum + res.tail_correction
    assert res.normalized == res.lam ** (params.a + 1.0) * res.total
    assert res.lam == pytest.approx(0.8 ** -2 - 1.0, rel=1e-15)
    assert res.partial_sum > 0.0 and res.tail_correction > 0.0
    assert math.isfinite(res.normalized)


def test_engine_is_deterministic():
    params = WeightParams(2.0, 0.0)
    a = weighted_series_wiener(params, 0.9, DriftSpec.zero(), 1e-6)
    b = weighted_series_wiener(params, 0.9, DriftSpec.zero(), 1e-6)
    assert a == b


def test_divergent_eps_rejected():
    params = WeightParams(2.0, 0.0)
    for eps in (1.0, 1.1, 5.0):
        with pytest.raises(DivergentSeriesError):
            weighted_series_wiener(params, eps, DriftSpec.zero(), 1e-6)
    # threshold scales with r
    with pytest.raises(DivergentSeriesError):
        weighted_series_wiener(WeightParams(5.0, 0.0), 0.5, DriftSpec.zero(), 1e-6)


def test_input_validation():
    params = WeightParams(2.0, 0.0)
    with pytest.raises(DomainError):
        weighted_series_wiener(params, -0.5, DriftSpec.zero(), 1e-6)
    with pytest.raises(DomainError):
        weighted_series_wiener(params, 0.9, DriftSpec.zero(), 0.5)
    with pytest.raises(DomainError):
        weighted_series_wiener(params, 0.9, DriftSpec.zero(), 0.0)
    with pytest.raises(DomainError):
        weighted_series_wiener(params, 0.9, DriftSpec.zero(), 1e-6, cutoff=10)


def test_refinement_consistency():
    params = WeightParams(2.0, 0.0)
    coarse = weighted_series_wiener(params, 0.95, DriftSpec.zero(), 1e-4)
    fine = weighted_series_wiener(params, 0.95, DriftSpec.zero(), 5e-5)
    rel_change = abs(fine.total - coarse.total) / coarse.total
    assert rel_change <= coarse.rel_err_bound + fine.rel_err_bound


def test_cutoff_override_keeps_answer_stable():
    params = WeightParams(2.0, 0.0)
    drift = DriftSpec.canonical(1.0)
    eps = eps_for_lambda(params, 0.05)
    want = SERIES_NORMALIZED[(2.0, 0.0, 1.0)][0.05]
    for cutoff in (5_000, 50_000):
        res = weighted_series_wiener(params, eps, drift, 1e-6, cutoff=cutoff)
        assert res.cutoff_N == cutoff
        assert res.normalized == pytest.approx(want, rel=1e-7)


def test_drift_consistency_is_bitwise():
    # Canonical drift at (n, eps) must equal zero drift at eps + tau/log n.
    tau, eps = 0.7, 0.8
    for n in (1, 2, 3, 10, 1_000, 123_456):
        with_drift = wiener_term_prob(n, eps, DriftSpec.canonical(tau))
        shifted = wiener_term_prob(n, eps + tau / log_ve(n), DriftSpec.zero())
        assert with_drift.value == shifted.value


def test_drift_product_is_constant():
    drift = DriftSpec.canonical(0.7)
    for n in (1, 2, 3, 10, 999, 10 ** 7):
        assert drift.value_at(n) * log_ve(n) == pytest.approx(0.7, rel=1e-15)


def test_summand_decreasing_beyond_computable_index():
    # The summand w(n) P_n grows while the drift inflates early terms, then
    # decays once the exponent slope E'(log n) exceeds (r-2) + a/log n.
    r, a, tau, lam = 2.5, 1.0, 1.0, 0.05
    params = WeightParams(r, a)
    eps = eps_for_lambda(params, lam)

    def exponent_slope(y):
        return y * y * (eps * y + 3.0 * tau) / (eps * y + tau) ** 3

    lo, hi = 1.0, 200.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if exponent_slope(mid) > (r - 2.0) + a / mid:
            hi = mid
        else:
            lo = mid
    n_star = int(math.exp(hi)) + 1

    def summand(n):
        w = n ** (r - 2.0) * log_ve(n) ** a
        return w * wiener_term_prob(n, eps, DriftSpec.canonical(tau)).value

    grid = [int(n_star * 2 ** k) for k in range(6)]
    vals = [summand(n) for n in grid]
    assert all(b < v for v, b in zip(vals, vals[1:]))
    # and the hump is real: some earlier summand exceeds its predecessor
    early = [summand(n) for n in (3, 10, 40)]
    assert any(b > v for v, b in zip(early, early[1:]))


def test_lambda_sequence_approaches_limit_monotonically():
    params = WeightParams(2.0, 0.0)
    drift = DriftSpec.zero()
    limit = limit_constant(params, 0.0)
    gaps = []
    for lam in (0.1, 0.05, 0.02, 0.01):
        res = weighted_series_wiener(params, eps_for_lambda(params, lam), drift, 1e-7)
        gaps.append(abs(res.normalized - limit))
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_limit_probe_three_point_schedule():
    params = WeightParams(2.0, 0.0)
    probe = limit_probe(params, DriftSpec.zero(), [0.1, 0.05, 0.025], 1e-7,
                        agree_tol=0.02)
    assert probe.extrapolated == pytest.approx(FOUR_OVER_PI, rel=0.02)
    assert probe.agrees is True
    assert probe.analytic == pytest.approx(FOUR_OVER_PI, rel=1e-14)
    assert len(probe.lambdas) == len(probe.normalized_values) == 3
    assert "first order" in probe.extrapolation_model


def test_limit_probe_four_point_matches_oracle_extrapolation():
    for (r, a, tau), want in SERIES_NEVILLE_4PT.items():
        params = WeightParams(r, a)
        probe = limit_probe(params, DriftSpec.canonical(tau),
                            [0.1, 0.05, 0.025, 0.0125], 1e-7)
        assert probe.extrapolated == pytest.approx(want, rel=1e-6)


def test_limit_probe_validation():
    params = WeightParams(2.0, 0.0)
    with pytest.raises(DomainError):
        limit_probe(params, DriftSpec.zero(), [], 1e-6)
    with pytest.raises(DomainError):
        limit_probe(params, DriftSpec.zero(), [0.05, 0.1], 1e-6)
    with pytest.raises(DomainError):
        limit_probe(params, DriftSpec.zero(), [0.1, -0.05], 1e-6)


def test_drift_ratio_tends_to_exp_two():
    params = WeightParams(2.0, 0.0)
    target = math.exp(2.0)
    gaps = []
    for lam in (0.1, 0.025, 0.01):
        eps = eps_for_lambda(params, lam)
        v1 = weighted_series_wiener(params, eps, DriftSpec.canonical(1.0), 1e-7)
        v0 = weighted_series_wiener(params, eps, DriftSpec.zero(), 1e-7)
        ratio = v1.normalized / v0.normalized
        assert ratio < target
        gaps.append(target - ratio)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    # frozen oracle pin for the lam = 0.05 ratio
    eps = eps_for_lambda(params, 0.05)
    v1 = weighted_series_wiener(params, eps, DriftSpec.canonical(1.0), 1e-7)
    v0 = weighted_series_wiener(params, eps, DriftSpec.zero(), 1e-7)
    assert v1.normalized / v0.normalized == pytest.approx(DRIFT_RATIO_LAM_005, rel=1e-7)


def test_log_weight_ratio_tends_to_gamma_ratio():
    # a = 1 vs a = 0 at small lambda: ratio -> Gamma(2)/Gamma(1) = 1.
    lam = 0.01
    drift = DriftSpec.zero()
    v1 = weighted_series_wiener(WeightParams(2.0, 1.0),
                                eps_for_lambda(WeightParams(2.0, 1.0), lam), drift, 1e-7)
    v0 = weighted_series_wiener(WeightParams(2.0, 0.0),
                                eps_for_lambda(WeightParams(2.0, 0.0), lam), drift, 1e-7)
    assert v1.normalized / v0.normalized == pytest.approx(1.0, abs=5e-3)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=1.3, max_value=3.5),
       st.floats(min_value=-0.8, max_value=2.0),
       st.floats(min_value=0.02, max_value=0.6))
def test_positive_finite_and_bounded_error(r, a, lam):
    params = WeightParams(r, a)
    res = weighted_series_wiener(params, eps_for_lambda(params, lam),
                                 DriftSpec.zero(), 1e-5)
    assert res.normalized > 0.0
    assert math.isfinite(res.normalized)
    assert res.rel_err_bound <= 1e-5


def test_extreme_weight_exponents_meet_tolerance():
    # r near 1 makes eps large and the theta corrections decay slowly; the
    # per-component tail closure keeps the error bound honest without an
    # enormous prefix.  Large r stresses the weighted truncation accounting.
    p_low = WeightParams(1.05, -0.99)
    res = weighted_series_wiener(p_low, eps_for_lambda(p_low, 0.02),
                                 DriftSpec.zero(), 1e-6)
    assert res.rel_err_bound <= 1e-6
    assert res.cutoff_N <= 10_000
    p_high = WeightParams(6.0, 2.0)
    res = weighted_series_wiener(p_high, eps_for_lambda(p_high, 0.1),
                                 DriftSpec.zero(), 1e-6)
    assert res.rel_err_bound <= 1e-6
    assert res.normalized == pytest.approx(limit_constant(p_high, 0.0), rel=0.01)


def test_negative_drift_suppresses_series():
    params = WeightParams(2.0, 0.0)
    eps = eps_for_lambda(params, 0.05)
    down = weighted_series_wiener(params, eps, DriftSpec.canonical(-0.5), 1e-6)
    base = weighted_series_wiener(params, eps, DriftSpec.zero(), 1e-6)
    assert 0.0 < down.normalized < base.normalized
    assert down.rel_err_bound <= 1e-6
