import math

import numpy as np
import pytest
from scipy import stats
from hypothesis import given, settings
from hypothesis import strategies as st

from maxineq import marginals as mg
from maxineq.process_models import (
    PathEnsemble,
    ProcessModel,
    aana_A,
    aana_battery,
    demimartingale_alpha,
    demimartingale_battery,
    empirical_correlation,
    generate,
    na_covariance_battery,
    partial_sum_std,
    rho_schedule,
    stream_paths,
    theoretical_bound,
)

SEED = 20240601


# -- parameter validation ---------------------------------------------------

@pytest.mark.parametrize(
    "kind, params",
    [
        ("AR1", {"a": 1.0}),
        ("AR1", {"a": -1.2}),
        ("LogOU", {"beta": 0.0}),
        ("AANA", {"q_scale": -1.0}),
        ("AANA", {"q_scale": 1.0, "q_power": 0.0}),
        ("NAGaussian", {"c": 1.5}),
        ("NAGaussian", {"structure": "blocks"}),
        ("Bogus", {}),
    ],
)
def test_invalid_parameters_rejected(kind, params):
    with pytest.raises(ValueError):
        ProcessModel(kind, 10, params)


def test_spec_round_trip():
    m = ProcessModel.aana(50, q_scale=0.5, q_power=2.0)
    again = ProcessModel.from_spec(m.to_spec())
    assert again.kind == m.kind and again.n == m.n
    np.testing.assert_array_equal(again.q, m.q)


# -- generation -----------------------------------------------------------------

def test_iid_first_coordinate_mean():
    P = 10**5
    e = generate(ProcessModel.iid(10), P, SEED)
    assert abs(e.increments[:, 0].mean()) < 3.3 / math.sqrt(P)


def test_log_ou_covariance_two_four():
    P = 10**5
    e = generate(ProcessModel.log_ou(4, beta=1.0), P, SEED)
    x2, x4 = e.increments[:, 1], e.increments[:, 3]
    prod = x2 * x4
    se = prod.std() / math.sqrt(P)
    assert abs(prod.mean() - 0.5) < 4 * se


def test_ar1_lag_one_correlation():
    P = 20000
    e = generate(ProcessModel.ar1(50, a=0.5), P, SEED)
    x = e.increments
    r = np.corrcoef(x[:, 20], x[:, 21])[0, 1]
    assert abs(r - 0.5) < 4 * (1 - 0.25) / math.sqrt(P)


def test_log_ou_correlation_grid():
    P = 20000
    beta = 0.7
    idx = np.arange(1, 11)
    e = generate(ProcessModel.log_ou(10, beta=beta), P, SEED)
    emp = empirical_correlation(e, idx)
    k, l = np.meshgrid(idx, idx)
    ref = (np.minimum(k, l) / np.maximum(k, l)) ** beta
    se = (1 - ref**2) / math.sqrt(P) + 1e-12
    assert np.all(np.abs(emp - ref) <= 4 * se + 1e-9)


def test_unit_variances():
    P = 40000
    for model in (ProcessModel.aana(20), ProcessModel.ar1(20, 0.8), ProcessModel.log_ou(20, 2.0)):
        e = generate(model, P, SEED)
        v = e.increments.var(axis=0)
        np.testing.assert_allclose(v, model.variances(), rtol=0.05)


def test_partial_sums_reproduce_increments():
    e = generate(ProcessModel.demimartingale(30), 50, SEED)
    np.testing.assert_array_equal(np.diff(e.partial_sums, axis=1), np.diff(np.cumsum(e.increments, axis=1), axis=1))
    again = PathEnsemble.from_increments(e.increments)
    np.testing.assert_array_equal(again.partial_sums, e.partial_sums)


@pytest.mark.parametrize(
    "model",
    [
        ProcessModel.iid(40, "rademacher"),
        ProcessModel.na_gaussian(40, c=0.5),
        ProcessModel.na_gaussian(40, c=0.9, structure="pairs"),
        ProcessModel.ar1(40, 0.9),
        ProcessModel.aana(40),
        ProcessModel.log_ou(40),
        ProcessModel.demimartingale(40),
    ],
    ids=lambda m: m.kind,
)
def test_generation_independent_of_workers(model):
    a = generate(model, 300, SEED, workers=1, block_size=64)
    b = generate(model, 300, SEED, workers=3, block_size=17)
    c = generate(model, 300, SEED)
    assert np.array_equal(a.increments, b.increments)
    assert np.array_equal(a.increments, c.increments)


def test_stream_matches_generate():
    model = ProcessModel.ar1(25, 0.3)
    s = stream_paths(model, 200, SEED, block_size=33).materialize()
    g = generate(model, 200, SEED)
    assert np.array_equal(s.increments, g.increments)


@given(seed=st.integers(0, 2**63 - 1), P=st.integers(1, 40))
@settings(max_examples=25)
def test_generation_deterministic(seed, P):
    model = ProcessModel.iid(8, "normal")
    assert np.array_equal(generate(model, P, seed).increments, generate(model, P, seed).increments)


def test_path_prefix_stable_under_more_paths():
    model = ProcessModel.log_ou(12)
    small = generate(model, 10, SEED).increments
    big = generate(model, 100, SEED).increments
    assert np.array_equal(small, big[:10])


def test_seeds_differ():
    model = ProcessModel.iid(8)
    assert not np.array_equal(generate(model, 5, 1).increments, generate(model, 5, 2).increments)


# -- dependence structure ---------------------------------------------------------

def test_na_gaussian_orthant_covariances():
    e = generate(ProcessModel.na_gaussian(12, c=0.8), 20000, SEED)
    cov = na_covariance_battery(e, n_pairs=2000, seed=1)
    assert np.all(cov[:, 0] <= 3 * cov[:, 1] + 1e-12)


def test_na_pairs_exceedances_match_null_rate():
    # coordinates in different pairs are independent, so many covariances are
    # exactly zero and a 3-SE rule has a false-alarm rate of about 0.00135 each
    e = generate(ProcessModel.na_gaussian(12, c=0.8, structure="pairs"), 20000, SEED)
    cov = na_covariance_battery(e, n_pairs=2000, seed=1)
    over = int(np.sum(cov[:, 0] > 3 * cov[:, 1] + 1e-12))
    assert over <= stats.binom.ppf(0.999, 2000, stats.norm.sf(3.0))
    assert np.all(cov[:, 0] <= 5 * cov[:, 1] + 1e-12)


def test_demimartingale_increment_condition():
    e = generate(ProcessModel.demimartingale(20, gamma=0.3), 20000, SEED)
    for name, j, m, se in demimartingale_battery(e):
        assert m >= -3 * se, (name, j)


def test_aana_covariance_condition():
    model = ProcessModel.aana(20)
    e = generate(model, 20000, SEED)
    for m, k, f, g, corr, se, q in aana_battery(e, model):
        assert corr <= q + 3 * se + 1e-12, (m, k, f, g)


# -- bound schemes ------------------------------------------------------------------

def test_iid_probability_scheme():
    s = theoretical_bound(ProcessModel.iid(7), 2, "probability")
    assert s.K == 1.0 and s.r == 2.0
    assert np.all(s.alpha.values == 1.0)


def test_na_order_two_constant():
    assert theoretical_bound(ProcessModel.na_gaussian(10), 2).K == 2.0


def test_na_order_three_constant():
    s = theoretical_bound(ProcessModel.na_gaussian(10), 3)
    assert s.K == pytest.approx(2 * (45 / math.log(3)) ** 3)


def test_aana_constant_limit():
    model = ProcessModel.aana(10**6)
    A = aana_A(model.q, model.n)
    assert A == pytest.approx(math.pi**2 / 6, abs=1e-5)
    K = theoretical_bound(model, 2).K
    assert K == pytest.approx(2 * (A + math.sqrt(1 + A * A)) ** 2)
    assert abs(K - 25.49) < 5e-3


def test_ar1_constant_estimated():
    s = theoretical_bound(ProcessModel.ar1(16, 0.5), 2)
    assert s.estimated


@pytest.mark.parametrize(
    "model, order, ineq",
    [
        (ProcessModel.iid(5), 3, "probability"),
        (ProcessModel.na_gaussian(5), 1, "probability"),
        (ProcessModel.aana(5), 2, "moment"),
        (ProcessModel.log_ou(5), 2, "probability"),
        (ProcessModel.iid(5, {"name": "cauchy"}), 2, "kw"),
    ],
)
def test_unsupported_bounds_raise(model, order, ineq):
    with pytest.raises(ValueError):
        theoretical_bound(model, order, ineq)


def test_kw_scheme_for_any_model():
    s = theoretical_bound(ProcessModel.log_ou(6), 2, "kw")
    np.testing.assert_allclose(s.alpha.values, 2 * np.arange(1, 7) - 1.0)


# -- demimartingale weights ---------------------------------------------------------

def test_demimartingale_alpha_standard_normal():
    e = generate(ProcessModel.iid(3), 10**5, SEED)
    d = demimartingale_alpha(e)
    closed = np.array([1.0, math.sqrt(2) - 1, math.sqrt(3) - math.sqrt(2)]) / math.sqrt(2 * math.pi)
    np.testing.assert_allclose(d.closed_form, closed, rtol=1e-12)
    assert d.estimate[0] == pytest.approx(0.3989, abs=0.005)
    assert d.estimate[1] == pytest.approx(0.1652, abs=0.005)
    assert np.all(d.ci_low <= closed + 0.002) and np.all(closed - 0.002 <= d.ci_high)


def test_demimartingale_alpha_zero_process():
    e = generate(ProcessModel.iid(5, "zero"), 100, SEED)
    assert np.all(demimartingale_alpha(e).alpha.values == 0.0)


def test_demimartingale_alpha_empty():
    with pytest.raises(ValueError):
        demimartingale_alpha(PathEnsemble.from_increments(np.zeros((0, 3))))


def test_partial_sum_std_demimartingale_matches_mc():
    model = ProcessModel.demimartingale(15, gamma=0.3)
    s = partial_sum_std(model)
    e = generate(model, 40000, SEED)
    np.testing.assert_allclose(e.partial_sums.std(axis=0), s, rtol=0.03)


# -- mixing schedule ------------------------------------------------------------------

def test_rho_schedule_half():
    r = rho_schedule(ProcessModel.ar1(8, 0.5))
    np.testing.assert_allclose(r.values[:3], [0.5, 0.25, 0.0625])


def test_rho_schedule_independent():
    r = rho_schedule(ProcessModel.ar1(1024, 0.0))
    assert np.all(r.values == 0.0) and r.limit == 0.0


def test_rho_schedule_stabilizes():
    r = rho_schedule(ProcessModel.ar1(2**20, 0.9), terms=21)
    assert r.partial_sums[:3] == pytest.approx([0.9, 1.71, 2.3661])
    assert r.stabilized_at <= 6
    assert abs(r.partial_sums[6] - r.limit) < 1e-5 * r.limit


def test_rho_schedule_requires_ar1():
    with pytest.raises(ValueError):
        rho_schedule(ProcessModel.iid(4))


@given(a=st.floats(-0.99, 0.99))
def test_rho_schedule_geometric(a):
    r = rho_schedule(ProcessModel.ar1(256, a))
    np.testing.assert_allclose(r.values, abs(a) ** (2.0 ** np.arange(r.values.size)), rtol=1e-12)
    assert np.all(np.diff(r.values) <= 0)


def test_marginal_moments():
    assert mg.normal().abs_moment(1) == pytest.approx(math.sqrt(2 / math.pi))
    assert mg.symmetric_pareto(1.8).abs_moment(1.5) == pytest.approx(1.8 / 0.3)
    assert math.isinf(mg.cauchy().abs_moment(1.5))
