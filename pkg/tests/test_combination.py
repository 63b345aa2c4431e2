import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from scepticalp.calibration import gamma_c
from scepticalp.combination import (
    COMBINATION_METHODS,
    combination_partial_t1e,
    combine,
    partial_t1e_bound,
    pearson_partial_bound,
    region_area,
    region_boundary,
    two_trials,
)
from scepticalp.exceptions import DomainError
from scepticalp.methods import Method
from scepticalp.simulation import SimConfig, Truth, simulate_rate

probs = st.floats(min_value=1e-12, max_value=1.0, exclude_min=False)


def test_two_trials_values():
    v = two_trials(0.01, 0.02)
    assert v.statistic == 0.02
    assert v.p_overall_scale == pytest.approx(4e-4)
    assert v.success_at(0.025)
    assert two_trials(0.5, 0.5).p_overall_scale == 0.25
    assert not two_trials(0.01, 0.03).success_at(0.025)


@pytest.mark.parametrize("method", COMBINATION_METHODS)
@pytest.mark.parametrize("bad", [0.0, -0.1, 1.1, math.nan])
def test_domain(method, bad):
    with pytest.raises(DomainError):
        combine(method, bad, 0.1)


def test_fisher_definition():
    v = combine(Method.FISHER, 0.01, 0.02)
    assert v.statistic == pytest.approx(-2 * math.log(0.0002))
    assert v.p_overall_scale == pytest.approx(stats.chi2(4).sf(v.statistic))


def test_pearson_definition():
    v = combine(Method.PEARSON, 0.01, 0.02)
    assert v.statistic == pytest.approx(-2 * math.log(0.99 * 0.98))
    assert v.p_overall_scale == pytest.approx(stats.chi2(4).cdf(v.statistic))


def test_fisher_succeeds_with_unit_p_value():
    assert combine(Method.FISHER, 1.0, 1e-7).success_at(0.025)
    assert combine(Method.FISHER, 1e-7, 1.0).success_at(0.025)


@given(probs, probs)
def test_stouffer_symmetric(a, b):
    assert combine(Method.STOUFFER, a, b) == combine(Method.STOUFFER, b, a)


@pytest.mark.parametrize("method", COMBINATION_METHODS)
def test_direction_requirement(method):
    v = combine(method, 1e-9, 0.9, require_direction=True)
    assert not v.direction_ok and not v.success_at(0.025)
    assert combine(method, 1e-9, 0.9).direction_ok


def test_pearson_bound_values():
    assert pearson_partial_bound(0.025) == pytest.approx(0.035, abs=5e-4)
    # shrinks like sqrt(2) alpha as alpha -> 0
    assert pearson_partial_bound(1e-6) == pytest.approx(math.sqrt(2) * 1e-6, rel=1e-3)
    assert partial_t1e_bound(Method.PEARSON, 0.025) == pearson_partial_bound(0.025)


def test_partial_bounds_by_method():
    assert partial_t1e_bound(Method.TWO_TRIALS, 0.025) == 0.025
    assert partial_t1e_bound(Method.FISHER, 0.025) == 1.0
    assert partial_t1e_bound(Method.STOUFFER, 0.025) == 1.0
    assert partial_t1e_bound(Method.SCEPTICAL_CONTROLLED, 0.025, 1.0) == gamma_c(0.025, 1.0)


@pytest.mark.parametrize("method", [*COMBINATION_METHODS, Method.SCEPTICAL_CONTROLLED])
def test_region_area_alpha_squared(method):
    assert region_area(method, 0.025, 1.0) == pytest.approx(0.000625, abs=1e-7)


@pytest.mark.parametrize("method", COMBINATION_METHODS)
@pytest.mark.parametrize("p_o", [1e-5, 1e-3, 0.02])
def test_region_boundary_is_success_edge(method, p_o):
    b = region_boundary(method, p_o, 0.025)
    if 0 < b < 1:
        assert combine(method, p_o, b * (1 - 1e-6)).success_at(0.025)
        assert not combine(method, p_o, min(b * (1 + 1e-4), 1.0)).success_at(0.025)


@pytest.mark.parametrize("method, drift, expected, tol", [
    (Method.TWO_TRIALS, 10.0, 0.025, 1e-8),
    (Method.FISHER, 10.0, 1.0, 1e-3),
    (Method.STOUFFER, 10.0, 1.0, 1e-3),
    (Method.PEARSON, 10.0, 0.0351464, 1e-6),
])
def test_partial_error_approaches_supremum(method, drift, expected, tol):
    assert combination_partial_t1e(method, 0.025, drift) == pytest.approx(expected, abs=tol)


@pytest.mark.parametrize("method", COMBINATION_METHODS)
def test_partial_error_at_zero_drift_is_size(method):
    assert combination_partial_t1e(method, 0.025, 0.0) == pytest.approx(0.000625, abs=1e-9)


def test_pearson_partial_monotone_to_bound():
    vals = [combination_partial_t1e(Method.PEARSON, 0.05, d) for d in (0, 1, 2, 4, 8)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[-1] <= pearson_partial_bound(0.05)
    assert vals[-1] == pytest.approx(pearson_partial_bound(0.05), abs=1e-4)


def test_pearson_bound_by_simulation():
    # the supremum over drift is reached as the non-null study becomes certain
    sim = simulate_rate(SimConfig(Truth.UNION_NULL_ORIGINAL, mu=12.0, c=1.0, alpha=0.05,
                                  method=Method.PEARSON, n_rep=1_000_000, seed=9))
    assert sim.within(pearson_partial_bound(0.05), k=3)


@pytest.mark.parametrize("method", [Method.FISHER, Method.STOUFFER, Method.PEARSON])
def test_size_by_simulation(method):
    sim = simulate_rate(SimConfig(Truth.INTERSECTION_NULL, c=1.0, method=method,
                                  n_rep=2_000_000, seed=21))
    assert sim.within(0.000625, k=3)
