"""Lundberg condition functions and the adjustment coefficient.

For premiums X, claims Y and i.i.d. interest I (all mutually independent)
the two conditions are

    due:        g(R) = E[mgf_Y(R / (1 + I))] * mgf_X(-R)
    immediate:  h(R) = mgf_Y(R) * mgf_X(-R)

and the adjustment coefficient is the positive root of ``g(R) = 1``. The
solver works in log space so that ``inf`` stands for divergence of an MGF
factor and the bisection never sees overflow.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Any, Mapping, Optional

import numpy as np

from . import distributions as dist
from .distributions import DistributionSpec
from .errors import ConfigError, NetProfitViolated, NumericalOverflow

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
# relative gap kept from a finite MGF domain boundary while bracketing
BOUNDARY_MARGIN = 1e-9
# expansion stops here when the domain is unbounded and g stays below 1
MAX_PROBE = 1e6
MAX_ITER = 500


class Condition(str, enum.Enum):
    DUE = "due"
    IMMEDIATE = "immediate"


@dataclass(frozen=True)
class InterestModel:
    """i.i.d. interest rates with a finite law ``((rate, prob), ...)``.

    A constant rate is the single-atom case.
    """

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((float(r), float(p)) for r, p in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ConfigError("interest law needs at least one atom")
        for r, p in atoms:
            if not (math.isfinite(r) and r >= 0):
                raise ConfigError(f"interest rate must be >= 0, got {r}")
            if not p > 0:
                raise ConfigError(f"interest probability must be > 0, got {p}")
        total = math.fsum(p for _, p in atoms)
        if abs(total - 1.0) > 1e-12:
            raise ConfigError(f"interest probabilities sum to {total!r}, not 1")

    @classmethod
    def constant(cls, rate: float) -> "InterestModel":
        return cls(((rate, 1.0),))

    @classmethod
    def discrete(cls, atoms) -> "InterestModel":
        return cls(tuple((r, p) for r, p in atoms))

    @property
    def is_constant(self) -> bool:
        return len(self.atoms) == 1

    @property
    def rates(self) -> np.ndarray:
        return np.array([r for r, _ in self.atoms])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms])

    def mean_discount(self) -> float:
        """E[1 / (1 + I)]."""
        return math.fsum(p / (1.0 + r) for r, p in self.atoms)

    def sample(self, rng: Optional[np.random.Generator], size: int) -> np.ndarray:
        if self.is_constant:
            return np.full(size, self.atoms[0][0])
        p = self.probs
        return rng.choice(self.rates, size=size, p=p / p.sum())

    @classmethod
    def from_dict(cls, record: Mapping[str, Any]) -> "InterestModel":
        if not isinstance(record, Mapping):
            raise ConfigError(f"interest record must be an object: {record!r}")
        kind = str(record.get("kind", "constant")).lower()
        try:
            if kind == "constant":
                return cls.constant(float(record["rate"]))
            if kind in ("discrete", "iid_discrete"):
                return cls.discrete(record["atoms"])
        except KeyError as exc:
            raise ConfigError(f"interest '{kind}' is missing field {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad interest record {record!r}: {exc}") from None
        raise ConfigError(f"unknown interest kind '{kind}'")

    def to_dict(self) -> dict:
        if self.is_constant:
            return {"kind": "constant", "rate": self.atoms[0][0]}
        return {"kind": "discrete", "atoms": [list(a) for a in self.atoms]}


NO_INTEREST = InterestModel.constant(0.0)


@dataclass(frozen=True)
class AdjustmentProblem:
    premium: DistributionSpec
    claim: DistributionSpec
    interest: InterestModel = NO_INTEREST
    condition: Condition = Condition.DUE

    def __post_init__(self):
        object.__setattr__(self, "condition", Condition(self.condition))

    def premium_mean(self) -> float:
        return dist.mean(self.premium)

    def discounted_claim_mean(self) -> float:
        if self.condition is Condition.IMMEDIATE:
            return dist.mean(self.claim)
        return dist.mean(self.claim) * self.interest.mean_discount()

    def net_profit_holds(self) -> bool:
        return self.discounted_claim_mean() < self.premium_mean()

    def domain_sup(self) -> float:
        """Supremum of R for which every factor of g(R) is finite."""
        y_sup = dist.mgf_domain_sup(self.claim)
        if self.condition is Condition.IMMEDIATE:
            return y_sup
        return min((1.0 + r) * y_sup for r, _ in self.interest.atoms)


@dataclass(frozen=True)
class AdjustmentResult:
    R: float
    residual: float
    bracket: tuple
    iterations: int
    domain_sup: float
    status: str  # "root" or "unbounded"

    def to_dict(self) -> dict:
        return {
            "R": self.R,
            "residual": self.residual,
            "bracket": list(self.bracket),
            "iterations": self.iterations,
            "domain_sup": self.domain_sup,
            "status": self.status,
        }


def log_lundberg_function(problem: AdjustmentProblem, R: float) -> float:
    """log g(R); ``inf`` if any MGF factor diverges or overflows."""
    if R < 0:
        raise ValueError(f"R must be >= 0, got {R}")
    if R == 0:
        return 0.0
    lx = dist.log_mgf(problem.premium, -R)
    if problem.condition is Condition.IMMEDIATE:
        ly = dist.log_mgf(problem.claim, R)
    else:
        terms = [math.log(p) + dist.log_mgf(problem.claim, R / (1.0 + r)) for r, p in problem.interest.atoms]
        top = max(terms)
        if math.isinf(top):
            ly = top
        else:
            ly = top + math.log(math.fsum(math.exp(t - top) for t in terms))
    if math.isinf(ly) or math.isinf(lx):
        return math.inf if ly == math.inf or lx == math.inf else -math.inf
    return ly + lx


def lundberg_function(problem: AdjustmentProblem, R: float) -> float:
    """g(R) for the due condition, h(R) for the immediate one."""
    lg = log_lundberg_function(problem, R)
    if lg == 0.0:
        return 1.0
    try:
        return math.exp(lg)
    except OverflowError:
        return math.inf


def _residual(problem: AdjustmentProblem, R: float) -> float:
    return abs(lundberg_function(problem, R) - 1.0)


def solve_adjustment(problem: AdjustmentProblem, tol: float = DEFAULT_TOL) -> AdjustmentResult:
    """Positive root of g(R) = 1 by geometric bracketing then bisection.

    Raises NetProfitViolated when the expected discounted claim is not below
    the expected premium.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not problem.net_profit_holds():
        raise NetProfitViolated(
            f"E[discounted claim] = {problem.discounted_claim_mean():.7g} is not below "
            f"E[premium] = {problem.premium_mean():.7g}"
        )
    sup = problem.domain_sup()
    cap = sup * (1.0 - BOUNDARY_MARGIN) if math.isfinite(sup) else MAX_PROBE

    lo, hi = 0.0, min(tol, cap)
    iterations = 0
    while True:
        iterations += 1
        lg = log_lundberg_function(problem, hi)
        if lg > 0:
            if math.isinf(lg) and hi < sup:
                raise NumericalOverflow(f"g({hi:.7g}) overflowed inside the MGF domain (sup {sup:.7g})")
            break
        if hi >= cap:
            logger.debug("g < 1 up to R=%g, adjustment coefficient unbounded", hi)
            return AdjustmentResult(hi, _residual(problem, hi), (lo, hi), iterations, sup, "unbounded")
        lo, hi = hi, min(2.0 * hi, cap)

    mid = 0.5 * (lo + hi)
    residual = _residual(problem, mid)
    for _ in range(MAX_ITER):
        if (hi - lo <= tol and residual <= tol) or not lo < mid < hi:
            break
        iterations += 1
        if log_lundberg_function(problem, mid) > 0:
            hi = mid
        else:
            lo = mid
        mid = 0.5 * (lo + hi)
        residual = _residual(problem, mid)
    return AdjustmentResult(mid, residual, (lo, hi), iterations, sup, "root")
