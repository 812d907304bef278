import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import grid_scan_root, random_problems
from ruinbound.adjustment import (
    NO_INTEREST,
    AdjustmentProblem,
    InterestModel,
    log_lundberg_function,
    lundberg_function,
    solve_adjustment,
)
from ruinbound.distributions import Deterministic, Gamma, Poisson
from ruinbound.errors import ConfigError, NetProfitViolated, NumericalOverflow


def reference_problem(condition, rate=0.0):
    return AdjustmentProblem(Poisson(1.1), Gamma(0.5, 0.5), InterestModel.constant(rate), condition)


def test_interest_model_validation():
    InterestModel.discrete([(0.0, 0.5), (0.1, 0.5)])
    with pytest.raises(ConfigError):
        InterestModel.constant(-0.01)
    with pytest.raises(ConfigError):
        InterestModel.discrete([(0.0, 0.5), (0.1, 0.4)])
    assert InterestModel.from_dict({"kind": "constant", "rate": 0.05}) == InterestModel.constant(0.05)
    rec = {"kind": "discrete", "atoms": [[0.0, 0.25], [0.1, 0.75]]}
    assert InterestModel.from_dict(rec).to_dict() == rec


def test_g_at_zero_is_one():
    assert lundberg_function(reference_problem("due", 0.05), 0.0) == 1.0
    assert lundberg_function(reference_problem("immediate"), 0.0) == 1.0


def test_g_at_published_roots():
    assert lundberg_function(reference_problem("immediate"), 0.0613828) == pytest.approx(1.0, abs=1e-4)
    assert lundberg_function(reference_problem("due", 0.051325), 0.0951395) == pytest.approx(1.0, abs=1e-4)


def test_g_diverges_past_domain():
    assert lundberg_function(reference_problem("immediate"), 0.5) == math.inf
    # due domain is (1 + r) * rate
    assert math.isfinite(lundberg_function(reference_problem("due", 0.1), 0.54))
    assert lundberg_function(reference_problem("due", 0.1), 0.55) == math.inf


def test_negative_R_rejected():
    with pytest.raises(ValueError):
        log_lundberg_function(reference_problem("due"), -0.1)


def test_solve_published_immediate_root():
    res = solve_adjustment(reference_problem("immediate"))
    assert res.status == "root"
    assert res.R == pytest.approx(0.0613828, abs=5e-7)
    assert res.residual <= 1e-10
    assert res.bracket[0] <= res.R <= res.bracket[1]
    assert res.bracket[1] - res.bracket[0] <= 1e-10


def test_solve_published_due_root():
    res = solve_adjustment(reference_problem("due", 0.051325))
    assert res.R == pytest.approx(0.0951395, abs=5e-7)
    assert res.domain_sup == pytest.approx(0.5 * 1.051325)


def test_unbounded_when_no_claims():
    res = solve_adjustment(AdjustmentProblem(Deterministic(1.0), Deterministic(0.0)))
    assert res.status == "unbounded"
    assert lundberg_function(AdjustmentProblem(Deterministic(1.0), Deterministic(0.0)), res.R) < 1


def test_net_profit_violated_equal_means():
    with pytest.raises(NetProfitViolated):
        solve_adjustment(AdjustmentProblem(Deterministic(1.0), Deterministic(1.0)))


def test_net_profit_violated_loss_making():
    with pytest.raises(NetProfitViolated):
        solve_adjustment(AdjustmentProblem(Poisson(0.9), Gamma(0.5, 0.5), NO_INTEREST, "immediate"))


def test_due_interest_can_restore_net_profit():
    # E[Y] = 1 > E[X] = 0.98, but discounting at 5% brings E[Y]/(1.05) below 0.98
    prob = AdjustmentProblem(Poisson(0.98), Gamma(0.5, 0.5), InterestModel.constant(0.05), "due")
    assert solve_adjustment(prob).status == "root"


def test_numerical_overflow():
    prob = AdjustmentProblem(Deterministic(1e308), Poisson(1.0), NO_INTEREST, "immediate")
    with pytest.raises(NumericalOverflow):
        solve_adjustment(prob)


def test_zero_interest_due_equals_immediate():
    due = solve_adjustment(reference_problem("due", 0.0))
    imm = solve_adjustment(reference_problem("immediate"))
    assert due.R == imm.R


def test_root_increases_with_interest():
    roots = [solve_adjustment(reference_problem("due", r)).R for r in (0.0, 0.051325, 0.1)]
    assert roots[0] <= roots[1] <= roots[2]


def test_immediate_ignores_interest():
    a = solve_adjustment(reference_problem("immediate", 0.0)).R
    b = solve_adjustment(reference_problem("immediate", 0.2)).R
    assert a == b


def test_discrete_interest_expectation():
    interest = InterestModel.discrete([(0.0, 0.3), (0.1, 0.7)])
    prob = AdjustmentProblem(Poisson(1.1), Gamma(0.5, 0.5), interest, "due")
    R = 0.08
    expected = (0.3 * (1 - R / 0.5) ** -0.5 + 0.7 * (1 - R / 1.1 / 0.5) ** -0.5) * math.exp(1.1 * math.expm1(-R))
    assert lundberg_function(prob, R) == pytest.approx(expected, rel=1e-13)


def test_constant_interest_condition_written_out():
    r = 0.051325
    R = solve_adjustment(reference_problem("due", r)).R
    # E[exp(R (Y/(1+r) - X))] written out
    val = (1 - R / (1 + r) / 0.5) ** -0.5 * math.exp(1.1 * (math.exp(-R) - 1))
    assert val == pytest.approx(1.0, abs=1e-9)


@given(st.floats(0.001, 0.499), st.floats(0.001, 0.499), st.floats(0.01, 0.99))
def test_g_convex(a, b, lam):
    prob = reference_problem("due", 0.051325)
    t1, t3 = sorted((a, b))
    t2 = lam * t1 + (1 - lam) * t3
    g1, g2, g3 = (lundberg_function(prob, t) for t in (t1, t2, t3))
    assert g2 <= lam * g1 + (1 - lam) * g3 + 1e-12 * (g1 + g3)


@pytest.mark.parametrize("params", random_problems(), ids=lambda p: f"lam{p[0]:.2f}-{p[5]}")
def test_solver_matches_grid_scan(params):
    lam, alpha, beta, rates, probs, condition = params
    prob = AdjustmentProblem(Poisson(lam), Gamma(alpha, beta),
                             InterestModel.discrete(list(zip(rates, probs))), condition)
    res = solve_adjustment(prob)
    root, lo, hi = grid_scan_root(lam, alpha, beta, rates, probs, condition)
    assert lo <= res.R <= hi
    assert abs(res.R - root) <= 10 * 1e-10
