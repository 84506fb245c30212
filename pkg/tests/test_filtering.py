import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from statefilter.filtering import (
    FilterProblem, Strategy, basis_problem, choose_strategy, failure_at, failure_probabilities,
    overlap_S, parallel_norm_sq, regime_scan, regime_switches, wk_closed_forms, zeta1, zeta2,
    equal_prior_Qpovm)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def test_problem_validation():
    e = np.eye(3)
    with pytest.raises(ValueError):
        FilterProblem(e[0], (e[1],), (0.5, 0.4))
    with pytest.raises(ValueError):
        FilterProblem(e[0], (2 * e[1],), (0.5, 0.5))
    with pytest.raises(ValueError):
        FilterProblem(e[0], (e[1],), (0.5,))


def test_S_orthogonal():
    e = np.eye(3)
    assert overlap_S(FilterProblem(e[0], (e[1], e[2]), (0.5, 0.25, 0.25))) == 0.0


def test_S_basis_problem():
    # 7 balanced basis vectors, overlaps (1/2, 1/2, -1/2, 0, 0, 0, 0), eta = 1/8
    assert overlap_S(basis_problem(3, 2, 1 / 8)) == pytest.approx(3 / 32, abs=1e-15)


def test_S_two_half_overlaps():
    psi1 = np.array([1.0, 0.0, 0.0])
    a = unit([0.5, math.sqrt(3) / 2, 0])
    b = unit([0.5, 0, math.sqrt(3) / 2])
    p = FilterProblem(psi1, (a, b), (0.5, 0.25, 0.25))
    assert overlap_S(p) == pytest.approx(1 / 8, abs=1e-15)


def test_failures_equal_priors():
    fp = failure_probabilities(basis_problem(3, 2, 1 / 8))
    assert fp.Q1 == pytest.approx(7 / 32, abs=1e-12)
    assert fp.Q2 == pytest.approx(7 / 32, abs=1e-12)
    assert fp.Qpovm == pytest.approx(math.sqrt(3) / 8, abs=1e-12)
    assert fp.q1_opt == pytest.approx(math.sqrt(3 / 4), abs=1e-12)


def test_failures_orthogonal_case():
    e = np.eye(3)
    fp = failure_probabilities(FilterProblem(e[0], (e[1], e[2]), (0.3, 0.4, 0.3)))
    assert fp.Q1 == pytest.approx(0.3)
    assert fp.Q2 == 0.0
    rep = choose_strategy(FilterProblem(e[0], (e[1], e[2]), (0.3, 0.4, 0.3)))
    assert rep.chosen is Strategy.VN2 and rep.Q == 0.0


def test_failures_half_prior():
    fp = failure_probabilities(basis_problem(3, 2, 1 / 2))
    assert fp.Q2 == pytest.approx(25 / 56, abs=1e-12)
    assert fp.Qpovm is None


@pytest.mark.parametrize("eta1, chosen, Q", [
    (1 / 8, Strategy.POVM, math.sqrt(3) / 8),
    (1 / 2, Strategy.VN2, 25 / 56),
    (0.05, Strategy.VN1, 0.05 + 0.95 * 0.75 / 7),
])
def test_choose_strategy(eta1, chosen, Q):
    rep = choose_strategy(basis_problem(3, 2, eta1))
    assert rep.chosen is chosen
    assert rep.Q == pytest.approx(Q, abs=1e-12)
    feasible = [rep.Q1, rep.Q2] + ([rep.Qpovm] if rep.Qpovm is not None else [])
    assert rep.Q == pytest.approx(min(feasible), abs=1e-15)


@pytest.mark.parametrize("eta1", [0.0, 1.0])
def test_trivial_priors(eta1):
    rep = choose_strategy(basis_problem(3, 2, eta1))
    assert rep.degenerate and rep.chosen is Strategy.TRIVIAL and rep.Q == 0.0


def test_closed_forms_small():
    cf = wk_closed_forms(3, 2, 1 / 8)
    assert cf.zeta1 == pytest.approx(4 / 25, abs=1e-15)
    assert cf.zeta2 == pytest.approx(3 / 31, abs=1e-15)
    assert cf.par_norm_sq == 0.75
    assert cf.Qpovm / cf.Q1 == pytest.approx((math.sqrt(3) / 8) / (7 / 32), abs=1e-12)
    assert cf.Qpovm / cf.Q2 == pytest.approx(0.98974, abs=1e-5)


def test_closed_forms_equal_prior_large():
    cf = wk_closed_forms(10, 4, 2 ** -10)
    assert cf.Qpovm == pytest.approx(math.sqrt(15) / 2 ** 12, abs=1e-15)
    assert equal_prior_Qpovm(10, 4) == pytest.approx(cf.Qpovm, abs=1e-15)


@pytest.mark.parametrize("n, k", [(3, 2), (4, 2), (4, 3), (5, 3), (6, 4)])
@pytest.mark.parametrize("eta1", [0.001, 0.03, 1 / 8, 0.3, 0.7])
def test_closed_forms_match_explicit_problem(n, k, eta1):
    cf = wk_closed_forms(n, k, eta1)
    problem = basis_problem(n, k, eta1)
    rep = choose_strategy(problem)
    eta = (1 - eta1) / (2 ** n - 1)
    assert overlap_S(problem) == pytest.approx(eta * cf.f_k, abs=1e-12)
    assert parallel_norm_sq(problem) == pytest.approx(cf.f_k, abs=1e-12)
    assert rep.Q1 == pytest.approx(cf.Q1, abs=1e-12)
    assert rep.Q2 == pytest.approx(cf.Q2, abs=1e-12)
    assert (rep.chosen is Strategy.POVM) == cf.in_window
    if cf.in_window:
        assert rep.Qpovm == pytest.approx(cf.Qpovm, abs=1e-12)
    elif eta1 < cf.zeta2:
        assert rep.chosen is Strategy.VN1
    else:
        assert rep.chosen is Strategy.VN2


@pytest.mark.parametrize("n, k", [(3, 2), (5, 3), (6, 3)])
def test_regime_scan_locates_thresholds(n, k):
    grid, labels = regime_scan(n, k, 10_000)
    step = grid[1] - grid[0]
    sw = regime_switches(grid, labels)
    assert [(a, b) for _, a, b in sw] == [(Strategy.VN1, Strategy.POVM), (Strategy.POVM, Strategy.VN2)]
    assert abs(sw[0][0] - zeta2(n, k)) <= step
    assert abs(sw[1][0] - zeta1(n, k)) <= step


def _random_problem(seed, dim=None, n_others=None):
    rng = np.random.default_rng(seed)
    dim = dim or int(rng.integers(2, 9))
    n_others = n_others or int(rng.integers(1, dim))
    psi1 = unit(rng.normal(size=dim))
    others = tuple(unit(rng.normal(size=dim)) for _ in range(n_others))
    pri = rng.dirichlet(np.ones(n_others + 1))
    pri[-1] = 1 - pri[:-1].sum()
    return FilterProblem(psi1, others, tuple(pri))


@settings(max_examples=60)
@given(st.integers(0, 2 ** 20))
def test_q1_opt_minimises_over_feasible_range(seed):
    problem = _random_problem(seed)
    rep = choose_strategy(problem)
    P = rep.par_norm_sq
    if P <= 0 or rep.degenerate:
        return
    grid = np.linspace(P, 1.0, 10_000)
    vals = failure_at(grid, rep.eta1, rep.S)
    best = grid[np.argmin(vals)]
    step = grid[1] - grid[0]
    assert P - 1e-12 <= rep.q1_opt <= 1 + 1e-12
    assert abs(best - rep.q1_opt) <= step + 1e-12
    assert failure_at(rep.q1_opt, rep.eta1, rep.S) == pytest.approx(rep.Q, abs=1e-12)
    assert rep.Q <= vals.min() + 1e-12


@settings(max_examples=60)
@given(st.integers(0, 2 ** 20))
def test_povm_beats_projective_inside_window(seed):
    rep = choose_strategy(_random_problem(seed))
    if rep.Qpovm is not None:
        assert rep.Qpovm <= min(rep.Q1, rep.Q2) + 1e-12


def test_continuity_at_window_edges():
    # choose eta1 exactly at the edges of the window for a fixed geometry
    P, S = 0.6, 0.09
    from statefilter.filtering import _report
    upper = _report(S, S, P)           # S == eta1: POVM meets VN1
    assert upper.chosen is Strategy.POVM
    assert upper.Qpovm == pytest.approx(upper.Q1, abs=1e-12)
    eta1 = S / P ** 2                  # S == eta1 P^2: POVM meets VN2
    lower = _report(eta1, S, P)
    assert lower.chosen is Strategy.POVM
    assert lower.Qpovm == pytest.approx(lower.Q2, abs=1e-12)


@settings(max_examples=30)
@given(st.integers(0, 2 ** 20), st.randoms(use_true_random=False))
def test_permutation_invariance(seed, rnd):
    problem = _random_problem(seed)
    order = list(range(len(problem.others)))
    rnd.shuffle(order)
    shuffled = FilterProblem(problem.psi1, tuple(problem.others[i] for i in order),
                             (problem.eta1,) + tuple(problem.priors[1 + i] for i in order))
    a, b = choose_strategy(problem), choose_strategy(shuffled)
    assert a.chosen is b.chosen
    assert a.Q == pytest.approx(b.Q, abs=1e-12)


def test_report_json():
    obj = choose_strategy(basis_problem(3, 2, 1 / 8)).to_json()
    assert obj["chosen"] == "POVM"
    assert set(obj) >= {"S", "par_norm_sq", "Q1", "Q2", "Qpovm", "q1_opt", "chosen"}


def test_closed_form_range_errors():
    with pytest.raises(ValueError):
        wk_closed_forms(3, 4, 0.1)
    with pytest.raises(ValueError):
        wk_closed_forms(3, 2, 1.5)
