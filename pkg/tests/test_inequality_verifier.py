import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxineq import rng
from maxineq.inequality_verifier import (
    RademacherEnumeration,
    chandra_ghosal_constant,
    check_chandra_ghosal,
    check_christofides,
    check_hajek_renyi,
    check_kolmogorov,
    check_kounias_weng,
    check_kuczmaszewska_4th,
    check_serfling,
    check_shao_na,
    estimate_implied_constant,
    exact_rademacher_stats,
    hajek_renyi_bound,
    mc_max_statistic,
    shao_na_bound,
    transfer_trial,
    verdict_for,
)
from maxineq.process_models import PathEnsemble, ProcessModel, generate, theoretical_bound
from maxineq.sequence_calculus import NormalizerSequence

SEED = 20240601


def brute_force_maxima(n):
    """Independent oracle: max_l |S_l| over all sign patterns via itertools."""
    out = []
    for signs in itertools.product((-1, 1), repeat=n):
        s = np.cumsum(signs)
        out.append(np.max(np.abs(s)))
    return np.array(out, dtype=float)


# -- verdict rule --------------------------------------------------------------

def test_verdict_rule():
    assert verdict_for(1.0, (1.0, 1.0), 1.0, exact=True) == "Holds"
    assert verdict_for(1.0 + 1e-9, (0, 0), 1.0, exact=True) == "Violated"
    assert verdict_for(0.5, (0.4, 0.6), 1.0, exact=False) == "Holds"
    assert verdict_for(0.9, (0.8, 1.1), 1.0, exact=False) == "HoldsWithinCI"
    assert verdict_for(1.05, (0.9, 1.2), 1.0, exact=False) == "Inconclusive"
    assert verdict_for(1.3, (1.1, 1.5), 1.0, exact=False) == "Violated"


# -- exact oracle -----------------------------------------------------------------

def test_n3_spot_values():
    assert exact_rademacher_stats(3, "ProbOfMax", epsilon=2).estimate == 0.5
    assert exact_rademacher_stats(3, "MomentOfMax", r=2).estimate == 3.75
    m = brute_force_maxima(3)
    assert sorted(m**2) == sorted([9, 4, 1, 1, 1, 1, 4, 9])


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_enumeration_matches_itertools(n):
    ref = brute_force_maxima(n)
    got = RademacherEnumeration(n).path_max()
    assert sorted(got) == sorted(ref)


def test_single_step_large_epsilon():
    assert exact_rademacher_stats(1, "ProbOfMax", epsilon=1.5).estimate == 0.0


def test_enumeration_bounds():
    with pytest.raises(ValueError):
        RademacherEnumeration(23)
    with pytest.raises(ValueError):
        exact_rademacher_stats(4, "ProbOfMax", epsilon=1, lo=3, hi=2)
    with pytest.raises(ValueError):
        exact_rademacher_stats(4, "ProbOfMax", epsilon=0)


def test_positive_part_means_small():
    # E S_1^+ = 1/2, E S_2^+ = 1/2 (S_2 = 2 w.p. 1/4)
    np.testing.assert_allclose(RademacherEnumeration(2).positive_part_means(), [0.5, 0.5])


# -- Monte Carlo statistics -------------------------------------------------

def test_doob_bound_iid_normal():
    e = generate(ProcessModel.iid(1000), 10**4, SEED)
    st_ = mc_max_statistic(e, "MomentOfMax", r=2, n_boot=300)
    assert st_.ci[1] < 4000
    assert 4000 / st_.estimate > 1


def test_zero_process_statistics():
    e = generate(ProcessModel.iid(20, "zero"), 100, SEED)
    assert mc_max_statistic(e, "MomentOfMax").estimate == 0.0
    assert mc_max_statistic(e, "ProbOfMax", epsilon=0.1).estimate == 0.0
    recs = check_kolmogorov(e, theoretical_bound(ProcessModel.iid(20), 2), epsilons=[1.0])
    assert recs[0].verdict == "Holds" and math.isinf(recs[0].margin)


def test_probability_monotone_in_epsilon():
    e = generate(ProcessModel.iid(50), 2000, SEED)
    eps = np.linspace(0.5, 40, 25)
    vals = [mc_max_statistic(e, "ProbOfMax", epsilon=x, n_boot=50).estimate for x in eps]
    assert np.all(np.diff(vals) <= 0)
    assert vals[-1] == 0.0


def test_two_segment_monotone_in_m():
    b = np.arange(1, 15, dtype=float)
    vals = [exact_rademacher_stats(14, "TwoSegmentProb", epsilon=0.3, norm=b, lo=m).estimate
            for m in range(1, 15)]
    assert np.all(np.diff(vals) <= 1e-15)


def test_calibration_against_exact():
    n = 10
    exact_p = exact_rademacher_stats(n, "ProbOfMax", epsilon=4).estimate
    exact_m = exact_rademacher_stats(n, "MomentOfMax", r=2).estimate
    model = ProcessModel.iid(n, "rademacher")
    cover_p = cover_m = 0
    for k in range(100):
        e = generate(model, 2000, rng.derive_seed(SEED, "calibration", k))
        sp = mc_max_statistic(e, "ProbOfMax", epsilon=4, n_boot=400)
        sm = mc_max_statistic(e, "MomentOfMax", r=2, n_boot=400)
        cover_p += sp.ci[0] <= exact_p <= sp.ci[1]
        cover_m += sm.ci[0] <= exact_m <= sm.ci[1]
    assert cover_p >= 95
    assert cover_m >= 95


# -- Kolmogorov and Hajek-Renyi -----------------------------------------------------

def test_iid_kolmogorov_example():
    e = generate(ProcessModel.iid(1000), 10**4, SEED)
    scheme = theoretical_bound(ProcessModel.iid(1000), 2)
    rec = check_kolmogorov(e, scheme, windows=[1000], epsilons=[60.0], n_boot=300)[0]
    assert rec.bound_value == pytest.approx(1000 / 3600)
    assert rec.verdict == "Holds"


def test_rademacher_kolmogorov_grid():
    enum = RademacherEnumeration(12)
    scheme = theoretical_bound(enum.model, 2)
    recs = check_kolmogorov(enum, scheme, epsilons=np.arange(0.5, 12.01, 0.5))
    assert all(r.verdict == "Holds" for r in recs)


def test_rademacher_hajek_renyi_grid():
    enum = RademacherEnumeration(12)
    scheme = theoretical_bound(enum.model, 2)
    b = NormalizerSequence.power(1.0, 1.0, 12)
    recs = check_hajek_renyi(enum, scheme, b, epsilons=np.arange(0.1, 3.0, 0.1))
    for rec in recs:
        e = rec.params["epsilon"]
        assert rec.bound_value == pytest.approx(4 * np.sum(1.0 / np.arange(1, 13) ** 2) / e**2)
        assert rec.verdict == "Holds"


def test_constant_normalizer_reduces_to_kolmogorov():
    enum = RademacherEnumeration(10)
    scheme = theoretical_bound(enum.model, 2)
    eps = [1.0, 2.0, 3.0, 5.0]
    hr = check_hajek_renyi(enum, scheme, NormalizerSequence.constant(1.0, 10), epsilons=eps, C=1.0)
    ko = check_kolmogorov(enum, scheme, epsilons=eps)
    for a, b in zip(hr, ko):
        assert a.statistic.estimate == b.statistic.estimate
        assert a.bound_value == pytest.approx(b.bound_value)


def test_iid_two_segment_hajek_renyi():
    e = generate(ProcessModel.iid(1000), 10**4, SEED)
    scheme = theoretical_bound(ProcessModel.iid(1000), 2)
    b = NormalizerSequence.power(1.0, 1.0, 1000)
    recs = check_hajek_renyi(e, scheme, b, m=100, n_boot=300)
    assert all(r.params["C"] == pytest.approx(9.0) for r in recs)
    assert all(r.verdict in ("Holds", "HoldsWithinCI") for r in recs)


def test_estimated_scheme_requires_constant():
    e = generate(ProcessModel.ar1(16), 10, SEED)
    with pytest.raises(ValueError):
        check_kolmogorov(e, theoretical_bound(ProcessModel.ar1(16), 2))


def test_hajek_renyi_two_segment_bracket():
    scheme = theoretical_bound(ProcessModel.iid(4), 2)
    b = np.array([1.0, 2.0, 3.0, 4.0])
    assert hajek_renyi_bound(scheme, b, 4, 2) == pytest.approx(2 / 4 + 1 / 9 + 1 / 16)


# -- exact oracles never violate a valid theorem ----------------------------------------

def _exact_battery(n):
    recs = []
    for process in ("iid", "martingale_diff"):
        enum = RademacherEnumeration(n, process)
        scheme = theoretical_bound(enum.model, 2)
        base = float(np.sum(enum.model.variances()))
        eps = np.geomspace(0.25, 2 * math.sqrt(base) + 1, 12)
        windows = list(range(1, n + 1)) + [(k, n) for k in range(2, n + 1)]
        recs += check_kolmogorov(enum, scheme, windows=windows, epsilons=eps)
        recs += check_kolmogorov(enum, theoretical_bound(enum.model, 2, "moment"))
        for norm in (NormalizerSequence.power(1.0, 1.0, n), NormalizerSequence.power(1.0, 0.5, n),
                     NormalizerSequence.constant(2.0, n)):
            recs += check_hajek_renyi(enum, scheme, norm, epsilons=eps / 3)
            recs += check_hajek_renyi(enum, theoretical_bound(enum.model, 2, "moment"), norm)
            for m in (1, max(1, n // 2), n):
                recs += check_hajek_renyi(enum, scheme, norm, m=m, epsilons=eps / 3)
                recs += check_hajek_renyi(enum, theoretical_bound(enum.model, 2, "moment"), norm, m=m)
            recs += check_christofides(enum, norm, epsilons=eps / 3)
            for r in (1.0, 2.0, 3.0):
                recs += check_kounias_weng(enum, r, norm, epsilons=eps / 3)
        recs += check_serfling(enum)
        recs += check_serfling(enum, a=1, length=n - 1)
    return recs


@pytest.mark.parametrize("n", [3, 6, 10, 14])
def test_exact_battery_never_violated(n):
    recs = _exact_battery(n)
    bad = [(r.check, r.params) for r in recs if r.verdict != "Holds"]
    assert not bad


@pytest.mark.filterwarnings("ignore:fourth-moment")
@pytest.mark.parametrize("n", [2, 6, 12])
def test_fourth_moment_na_bound_on_exact_oracle(n):
    # independent signs are negatively associated; this bound must then hold
    rec = check_kuczmaszewska_4th(RademacherEnumeration(n))[0]
    assert rec.verdict == "Holds", (rec.statistic.estimate, rec.bound_value)


@settings(max_examples=40)
@given(
    n=st.integers(3, 12),
    seed=st.integers(0, 2**32),
    r=st.sampled_from([1.0, 2.0]),
)
def test_transfer_implication_property(n, seed, r):
    gen = rng.stream(seed, 0)
    alpha = gen.uniform(0.2, 2.0, n)
    b = np.cumsum(gen.uniform(0.0, 2.0, n)) + gen.uniform(0.5, 2.0)
    t = transfer_trial(RademacherEnumeration(n), alpha, b, r)
    assert t.first_ok and t.second_ok and t.moment_ok


# -- named inequalities ---------------------------------------------------------------

def test_fourth_moment_rhs_example():
    e = generate(ProcessModel.na_gaussian(50), 200, SEED)
    rec = check_kuczmaszewska_4th(e, n_boot=50)[0]
    assert rec.bound_value == pytest.approx(2600.0)


@pytest.mark.filterwarnings("ignore:fourth-moment")
def test_fourth_moment_single_variable_boundary():
    e = generate(ProcessModel.iid(1), 10**5, SEED)
    rec = check_kuczmaszewska_4th(e, n_boot=100)[0]
    assert rec.bound_value == pytest.approx(3.0)
    assert rec.statistic.ci[0] <= 3.0 <= rec.statistic.ci[1]


@pytest.mark.filterwarnings("ignore:fourth-moment")
def test_fourth_moment_zero_process():
    e = generate(ProcessModel.iid(5, "zero"), 10, SEED)
    rec = check_kuczmaszewska_4th(e, n_boot=10)[0]
    assert rec.bound_value == 0.0 and rec.verdict == "Holds"


def test_shao_bound_formulas():
    assert shao_na_bound(np.ones(10), np.ones(10), 2.0) == pytest.approx(20.0)
    z3 = 2 * math.sqrt(2 / math.pi)
    ref = 2 * (45 / math.log(3)) ** 3 * (10**1.5 + 10 * z3)
    assert shao_na_bound(np.full(10, z3), np.ones(10), 3.0) == pytest.approx(ref)
    with pytest.raises(ValueError):
        shao_na_bound(np.ones(3), np.ones(3), 1.0)


def test_shao_single_variable_margin():
    e = generate(ProcessModel.na_gaussian(1), 10**4, SEED)
    rec = check_shao_na(e, 2.0, n_boot=100)[0]
    assert rec.bound_value == pytest.approx(2.0)
    assert rec.margin == pytest.approx(2.0, rel=0.05)


def test_chandra_ghosal_constants():
    q = 1.0 / np.arange(1, 101)
    K = chandra_ghosal_constant(q, 100)
    A = float(np.sum(q[:99] ** 2))
    assert A == pytest.approx(1.6349, abs=1e-4)
    assert K == pytest.approx(2 * (A + math.sqrt(1 + A * A)) ** 2)
    assert 25.2 < K < 25.3
    assert chandra_ghosal_constant(np.zeros(100), 100) == 2.0


def test_chandra_ghosal_mc():
    e = generate(ProcessModel.aana(100), 5000, SEED)
    rec = check_chandra_ghosal(e, epsilons=[40.0], n_boot=200)[0]
    K = rec.params["K"]
    assert rec.bound_value == pytest.approx(K * 100 / 1600)
    assert rec.verdict == "Holds" and rec.margin > 1


def test_christofides_two_step_bound():
    e = generate(ProcessModel.iid(2), 10**4, SEED)
    rec = check_christofides(e, epsilons=[1.0], n_boot=200)[0]
    assert rec.bound_value == pytest.approx(math.sqrt(2) / math.sqrt(2 * math.pi))
    assert rec.verdict == "Holds"
    assert "two_sided_estimate" in rec.notes


def test_christofides_weights_divide():
    e = generate(ProcessModel.iid(20), 1000, SEED)
    flat = check_christofides(e, NormalizerSequence.constant(1.0, 20), epsilons=[1.0], n_boot=50)[0]
    lin = check_christofides(e, NormalizerSequence.power(1.0, 1.0, 20), epsilons=[1.0], n_boot=50)[0]
    assert lin.bound_value < flat.bound_value


def test_christofides_zero_process():
    e = generate(ProcessModel.iid(6, "zero"), 20, SEED)
    rec = check_christofides(e, epsilons=[0.5], n_boot=10)[0]
    assert rec.bound_value == 0.0 and rec.statistic.estimate == 0.0


def test_kounias_weng_example():
    e = generate(ProcessModel.iid(10), 10**4, SEED)
    rec = check_kounias_weng(e, 1.0, epsilons=[10.0], n_boot=200)[0]
    assert rec.bound_value == pytest.approx(math.sqrt(2 / math.pi))
    assert rec.verdict == "Holds"


def test_kounias_weng_r2_is_variance_bound():
    e = generate(ProcessModel.iid(10), 100, SEED)
    rec = check_kounias_weng(e, 2.0, epsilons=[5.0], n_boot=20)[0]
    assert rec.bound_value == pytest.approx(100 / 25)
    assert rec.notes["domination_holds"]


def test_kounias_weng_universality():
    gen = rng.stream(SEED, 7)
    makers = [
        lambda n: ProcessModel.copies(n),
        lambda n: ProcessModel.ar1(n, float(gen.uniform(-0.95, 0.95))),
        lambda n: ProcessModel.log_ou(n, float(gen.uniform(0.1, 3))),
        lambda n: ProcessModel.na_gaussian(n, float(gen.uniform(0, 1))),
        lambda n: ProcessModel.demimartingale(n, float(gen.uniform(0, 1))),
        lambda n: ProcessModel.aana(n, float(gen.uniform(0, 2))),
        lambda n: ProcessModel.iid(n, "rademacher"),
    ]
    verdicts = []
    for k in range(500):
        n = int(gen.integers(2, 40))
        model = makers[k % len(makers)](n)
        e = generate(model, 400, rng.derive_seed(SEED, "kw", k))
        r = float(gen.choice([0.5, 1.0, 1.5, 2.0, 3.0]))
        b = np.cumsum(gen.uniform(0.0, 1.5, n)) + 1.0
        eps = [float(gen.uniform(0.2, 3.0))]
        verdicts.append(check_kounias_weng(e, r, b, epsilons=eps, n_boot=50)[0].verdict)
    assert "Violated" not in verdicts


def test_serfling_example():
    e = generate(ProcessModel.iid(16), 5000, SEED)
    rec = check_serfling(e, g=lambda a, n: float(n), n_boot=100)[0]
    assert rec.bound_value == pytest.approx(400.0)
    assert rec.verdict == "Holds"
    assert rec.notes["superadditive"]


def test_serfling_single_term():
    # (log 2 / log 2)**2 g = g: equality with E S_1**2
    e = generate(ProcessModel.iid(1), 10**4, SEED)
    rec = check_serfling(e, n_boot=200)[0]
    assert rec.bound_value == pytest.approx(1.0)
    assert rec.statistic.ci[0] <= 1.0 <= rec.statistic.ci[1]


def test_serfling_table_and_errors():
    e = generate(ProcessModel.iid(4), 10, SEED)
    with pytest.raises(ValueError):
        check_serfling(e, g={(0, 4): 4.0})
    with pytest.raises(ValueError):
        check_serfling(e, a=3, length=3)


# -- implied constants ---------------------------------------------------------------

def test_implied_constant_needs_doublings():
    with pytest.raises(ValueError):
        estimate_implied_constant(ProcessModel.ar1(8), [8, 16, 32], 10, SEED)
    with pytest.raises(ValueError):
        estimate_implied_constant(ProcessModel.ar1(8), [8, 16, 30, 60, 120], 10, SEED)


def test_implied_constant_iid_below_doob():
    ic = estimate_implied_constant(ProcessModel.ar1(8, 0.0), [32, 64, 128, 256, 512], 2000, SEED,
                                   n_boot=100)
    assert ic.verdict == "Bounded"
    assert np.all(ic.K_hat < 4)


def test_implied_constant_ar1_half():
    lengths = [2**k for k in range(7, 12)]
    ic = estimate_implied_constant(ProcessModel.ar1(8, 0.5), lengths, 2000, SEED, n_boot=100)
    assert np.all((ic.ratios >= 0.8) & (ic.ratios <= 1.2))
