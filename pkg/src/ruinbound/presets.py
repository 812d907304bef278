"""Reference numerical example: Poisson premiums, gamma claims, constant interest."""

from __future__ import annotations

from .adjustment import NO_INTEREST, AdjustmentProblem, Condition, InterestModel
from .distributions import Gamma, Poisson

PREMIUM = Poisson(1.1)
CLAIM = Gamma(0.5, 0.5)
INTEREST_RATE = 0.051325
INTEREST = InterestModel.constant(INTEREST_RATE)
DEPENDENCE_ORDER = 2

# published values, 7 significant digits
PUBLISHED_R_IMMEDIATE = 0.0613828
PUBLISHED_R_DUE = 0.0951395
TABLE_U = (55.0, 60.0, 65.0, 70.0, 75.0, 80.0)
PUBLISHED_TABLE = {
    55.0: (0.0341836, 0.5243464, 0.9736296),
    60.0: (0.0251494, 0.4474602, 0.8789496),
    65.0: (0.0185029, 0.3818480, 0.7934767),
    70.0: (0.0185029, 0.3258567, 0.7163156),
    75.0: (0.0100152, 0.2780755, 0.6466580),
    80.0: (0.0073683, 0.2373006, 0.5837742),
}


def immediate_problem() -> AdjustmentProblem:
    """Condition without interest; its root drives the classical and immediate columns."""
    return AdjustmentProblem(PREMIUM, CLAIM, NO_INTEREST, Condition.IMMEDIATE)


def due_problem() -> AdjustmentProblem:
    return AdjustmentProblem(PREMIUM, CLAIM, INTEREST, Condition.DUE)
