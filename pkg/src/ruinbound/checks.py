"""Statistical self-checks run by ``ruinbound check``.

Each check returns a :class:`CheckResult`; ``scale`` shrinks the Monte Carlo
sample sizes proportionally (1.0 = full size).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from . import distributions as dist
from . import presets
from .adjustment import NO_INTEREST, solve_adjustment
from .bounds import lundberg_bound
from .dependence import DependenceSpec, generate_sequence, lag_correlation
from .distributions import Deterministic, FiniteDiscrete, Gamma, Poisson
from .risk_models import (
    Model,
    RiskModelConfig,
    discounted_loss,
    estimate_ruin_curves,
    exponential_moments,
    first_exceedance,
    simulate_path,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _n(base: int, scale: float, floor: int = 100) -> int:
    return max(floor, int(round(base * scale)))


def check_mgf_agreement(scale: float = 1.0, seed: int = 1) -> CheckResult:
    """Sample means of exp(tX) against the closed-form MGF, within 4 SE."""
    n = _n(1_000_000, scale, 10_000)
    rng = np.random.default_rng(seed)
    cases = [
        (Poisson(1.1), [-0.5, 0.1, 0.3]),
        (Gamma(0.5, 0.5), [-0.5, 0.1, 0.2]),
        (Deterministic(2.0), [0.3]),
        (FiniteDiscrete(((0.0, 0.5), (2.0, 0.5))), [0.4]),
    ]
    worst = 0.0
    for spec, ts in cases:
        x = np.asarray(spec.sample(rng, n), dtype=float)
        for t in ts:
            assert 2 * t < dist.mgf_domain_sup(spec)
            z = np.exp(t * x)
            err = abs(z.mean() - dist.mgf(spec, t))
            if dist.variance(spec) == 0:
                worst = max(worst, 0.0 if err <= 1e-12 * dist.mgf(spec, t) else math.inf)
                continue
            worst = max(worst, err / (z.std(ddof=1) / math.sqrt(n)))
    return CheckResult("mgf_agreement", worst <= 4.0, f"max |MC - mgf| = {worst:.2f} SE (limit 4) at n={n}")


def check_lag_correlations(scale: float = 1.0, seed: int = 2) -> CheckResult:
    n = _n(100_000, scale, 10_000)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for target in (presets.PREMIUM, presets.CLAIM):
        spec = DependenceSpec(target, 3)
        x = generate_sequence(spec, n, rng)
        for k in range(1, 5):
            emp = np.corrcoef(x[:-k], x[k:])[0, 1]
            worst = max(worst, abs(emp - lag_correlation(spec, k)))
    return CheckResult("lag_correlations", worst <= 0.02, f"max |empirical - exact| = {worst:.4f} (limit 0.02) at n={n}")


def check_first_passage(scale: float = 1.0, seed: int = 3) -> CheckResult:
    n_paths = _n(1000, scale, 50)
    rng = np.random.default_rng(seed)
    mismatches = 0
    ruined = 0
    for model in (Model.DUE, Model.IMMEDIATE):
        base = RiskModelConfig(model, 0.0, DependenceSpec.with_order(presets.PREMIUM, 2),
                               DependenceSpec.with_order(presets.CLAIM, 2), presets.INTEREST, 200)
        for k in range(n_paths):
            cfg = base.with_u(float(rng.uniform(0, 20)))
            path = simulate_path(cfg, seed, k)
            ruined += path.ruined
            if first_exceedance(discounted_loss(path), cfg.u) != path.ruin_time:
                mismatches += 1
    return CheckResult("first_passage_equivalence", mismatches == 0,
                       f"{mismatches} mismatches over {2 * n_paths} paths ({ruined} ruined)")


def check_supermartingale(scale: float = 1.0, seed: int = 4, workers: Optional[int] = None) -> CheckResult:
    n_paths = _n(100_000, scale, 1000)
    ns = [1, 5, 20, 50]
    worst = -math.inf
    for model, interest in ((Model.IMMEDIATE, NO_INTEREST), (Model.DUE, presets.INTEREST)):
        cfg = RiskModelConfig(model, 0.0, DependenceSpec.iid(presets.PREMIUM), DependenceSpec.iid(presets.CLAIM),
                              interest, max(ns))
        R = solve_adjustment(cfg.adjustment_problem()).R
        for est in exponential_moments(cfg, R, ns, n_paths, seed, workers):
            worst = max(worst, (est.mean - 1.0) / est.std_error)
    return CheckResult("supermartingale_decay", worst <= 4.0,
                       f"max (mean - 1)/SE = {worst:.2f} (limit 4) over n={ns}, {n_paths} paths")


def check_bound_domination(scale: float = 1.0, seed: int = 1, workers: Optional[int] = None) -> CheckResult:
    n_paths = _n(100_000, scale, 1000)
    u_values = [55.0, 65.0, 80.0]
    cfg = RiskModelConfig(Model.DUE, u_values[0], DependenceSpec.with_order(presets.PREMIUM, 2),
                          DependenceSpec.with_order(presets.CLAIM, 2), presets.INTEREST, 1000)
    curves = estimate_ruin_curves(cfg, u_values, n_paths, seed, workers, models=[Model.DUE, Model.IMMEDIATE])
    failures = []
    for model, estimates in curves.items():
        R = solve_adjustment(RiskModelConfig(model, 0.0, cfg.premiums, cfg.claims, cfg.interest).adjustment_problem()).R
        for est in estimates:
            b = lundberg_bound(R, est.u, cfg.m).bound
            if not est.wilson_high < b:
                failures.append(f"{model} u={est.u:g}: {est.wilson_high:.4g} >= {b:.4g}")
    detail = "; ".join(failures) if failures else f"Wilson upper < bound at u={u_values} for due/immediate, {n_paths} paths"
    return CheckResult("bound_domination", not failures, detail)


CHECKS: List[Callable[..., CheckResult]] = [
    check_mgf_agreement,
    check_lag_correlations,
    check_first_passage,
    check_supermartingale,
    check_bound_domination,
]


def run_checks(scale: float = 1.0, workers: Optional[int] = None) -> List[CheckResult]:
    results = []
    for fn in CHECKS:
        if "workers" in fn.__code__.co_varnames:
            results.append(fn(scale=scale, workers=workers))
        else:
            results.append(fn(scale=scale))
    return results
