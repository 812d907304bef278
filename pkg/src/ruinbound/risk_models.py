"""Surplus-process simulation for the classical, annuity-due and annuity-immediate models.

Recursions, with ``U_0 = u``:

    classical:  U_n = U_{n-1} + X_n - Y_n
    due:        U_n = (U_{n-1} + X_n)(1 + I_n) - Y_n
    immediate:  U_n = U_{n-1}(1 + I_n) + X_n - Y_n

Ruin is the first ``n`` with ``U_n < 0``. Dividing ``U_n`` by the
accumulation factor ``prod_{j<=n}(1 + I_j)`` turns this into the first ``n``
with ``S_n > u`` for the discounted loss ``S_n``; the Monte Carlo estimators
use that form, so one path yields ruin indicators for every ``u`` at once.

Random streams: path ``k`` under seed ``s`` draws premiums, claims and
interest from three Philox generators keyed by ``(s, role)`` and ``k``.
Paths are processed in fixed blocks of :data:`BLOCK_SIZE`, so results do not
depend on how many workers share the blocks.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from statistics import NormalDist
from typing import Any, Callable, List, Mapping, Optional, Sequence

import numpy as np

from .adjustment import NO_INTEREST, AdjustmentProblem, Condition, InterestModel
from .dependence import DependenceSpec, generate_sequence
from .errors import ConfigError, ModelMismatch, VarianceUnbounded

BLOCK_SIZE = 1000
THREADS_ENV = "RUINBOUND_THREADS"
_MASK64 = (1 << 64) - 1
_ROLES = {"premium": 0, "claim": 1, "interest": 2}
_Z975 = NormalDist().inv_cdf(0.975)


class Model(str, enum.Enum):
    CLASSICAL = "classical"
    DUE = "due"
    IMMEDIATE = "immediate"

    @property
    def condition(self) -> Condition:
        """Lundberg condition whose root bounds this model's ruin probability."""
        return Condition.DUE if self is Model.DUE else Condition.IMMEDIATE


@dataclass(frozen=True)
class RiskModelConfig:
    model: Model
    u: float
    premiums: DependenceSpec
    claims: DependenceSpec
    interest: InterestModel = NO_INTEREST
    horizon: int = 1000

    def __post_init__(self):
        try:
            object.__setattr__(self, "model", Model(self.model))
        except ValueError:
            raise ConfigError(f"model must be one of classical|due|immediate, got {self.model!r}") from None
        if not (math.isfinite(self.u) and self.u >= 0):
            raise ConfigError(f"u must be >= 0, got {self.u}")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ConfigError(f"horizon must be a positive integer, got {self.horizon}")
        object.__setattr__(self, "horizon", int(self.horizon))

    def adjustment_problem(self) -> AdjustmentProblem:
        interest = NO_INTEREST if self.model is Model.CLASSICAL else self.interest
        return AdjustmentProblem(self.premiums.target, self.claims.target, interest, self.model.condition)

    @property
    def m(self) -> int:
        """Dependence order shared by the premium and claim sequences."""
        return max(self.premiums.m, self.claims.m)

    def with_u(self, u: float) -> "RiskModelConfig":
        return replace(self, u=float(u))

    @classmethod
    def from_dict(cls, record: Mapping[str, Any]) -> "RiskModelConfig":
        """Build from a config record; errors are prefixed with the offending field."""
        parsers = {
            "premiums": DependenceSpec.from_dict,
            "claims": DependenceSpec.from_dict,
            "interest": InterestModel.from_dict,
        }
        parts = {}
        for name, parse in parsers.items():
            if name not in record:
                if name == "interest":
                    parts[name] = NO_INTEREST
                    continue
                raise ConfigError(f"{name}: missing field")
            try:
                parts[name] = parse(record[name])
            except ConfigError as exc:
                raise ConfigError(f"{name}: {exc}") from None
        if "model" not in record:
            raise ConfigError("model: missing field")
        try:
            u = float(record.get("u", 0.0))
        except (TypeError, ValueError):
            raise ConfigError(f"u: expected a number, got {record.get('u')!r}") from None
        return cls(model=record["model"], u=u, horizon=record.get("horizon", 1000), **parts)

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "u": self.u,
            "premiums": self.premiums.to_dict(),
            "claims": self.claims.to_dict(),
            "interest": self.interest.to_dict(),
            "horizon": self.horizon,
        }


@dataclass
class SurplusPath:
    model: Model
    u: float
    surplus: np.ndarray  # U_0..U_N
    premiums: np.ndarray
    claims: np.ndarray
    rates: np.ndarray
    ruin_time: Optional[int] = None

    @property
    def ruined(self) -> bool:
        return self.ruin_time is not None


@dataclass(frozen=True)
class SimulationEstimate:
    """Finite-horizon ruin frequency; a lower-biased estimate of the ultimate ruin probability."""

    model: str
    u: float
    horizon: int
    n_paths: int
    seed: int
    n_ruined: int
    probability: float
    std_error: float
    wilson_low: float
    wilson_high: float

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["finite_horizon_lower_bound"] = True
        return d


@dataclass(frozen=True)
class MomentEstimate:
    n: int
    mean: float
    std_error: float
    n_paths: int


# -- streams -------------------------------------------------------------------

def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def path_stream(seed: int, path_index: int, role: str) -> np.random.Generator:
    """Counter-based generator for one (seed, path, role) triple."""
    if not 0 <= seed < (1 << 62):
        raise ConfigError(f"seed must be in [0, 2**62), got {seed}")
    if not 0 <= path_index <= _MASK64:
        raise ValueError(f"path index out of range: {path_index}")
    key = [_splitmix64((seed << 2) | _ROLES[role]), path_index]
    return np.random.Generator(np.random.Philox(key=key))


def draw_inputs(config: RiskModelConfig, seed: int, path_index: int):
    """Premiums, claims and rates of length ``horizon`` for path ``path_index``.

    Rates are drawn for every model (the classical recursion ignores them) so
    that all models see identical inputs on a given path.
    """
    n = config.horizon
    x = generate_sequence(config.premiums, n, path_stream(seed, path_index, "premium"))
    y = generate_sequence(config.claims, n, path_stream(seed, path_index, "claim"))
    if config.interest.is_constant:
        rates = config.interest.sample(None, n)
    else:
        rates = config.interest.sample(path_stream(seed, path_index, "interest"), n)
    return x, y, rates


# -- single paths ----------------------------------------------------------------

def simulate_path(config: RiskModelConfig, seed: int = 0, path_index: int = 0) -> SurplusPath:
    """Run the model's surplus recursion on path ``path_index`` of stream ``seed``."""
    x, y, rates = draw_inputs(config, seed, path_index)
    return run_recursion(config.model, config.u, x, y, rates)


def run_recursion(model, u: float, x, y, rates) -> SurplusPath:
    model = Model(model)
    n = len(x)
    surplus = np.empty(n + 1)
    surplus[0] = u
    ruin_time = None
    prev = float(u)
    for i in range(n):
        if model is Model.CLASSICAL:
            cur = prev + x[i] - y[i]
        elif model is Model.DUE:
            cur = (prev + x[i]) * (1.0 + rates[i]) - y[i]
        else:
            cur = prev * (1.0 + rates[i]) + x[i] - y[i]
        surplus[i + 1] = cur
        if ruin_time is None and cur < 0:
            ruin_time = i + 1
        prev = cur
    return SurplusPath(model, float(u), surplus, np.asarray(x), np.asarray(y), np.asarray(rates), ruin_time)


def loss_sequence(model, x, y, rates) -> np.ndarray:
    """Discounted loss S_1..S_N along the last axis (works on path matrices).

    due:        S_n = sum_i (Y_i/(1+I_i) - X_i) prod_{j<i} 1/(1+I_j)
    immediate:  S_n = sum_i (Y_i - X_i) prod_{j<=i} 1/(1+I_j)
    classical:  S_n = sum_i (Y_i - X_i)
    """
    model = Model(model)
    x, y, rates = np.asarray(x, float), np.asarray(y, float), np.asarray(rates, float)
    if model is Model.CLASSICAL:
        return np.cumsum(y - x, axis=-1)
    disc = np.cumprod(1.0 / (1.0 + rates), axis=-1)
    if model is Model.IMMEDIATE:
        return np.cumsum((y - x) * disc, axis=-1)
    prev_disc = np.ones_like(disc)
    prev_disc[..., 1:] = disc[..., :-1]
    return np.cumsum((y / (1.0 + rates) - x) * prev_disc, axis=-1)


def discounted_loss(path: SurplusPath, model=None) -> np.ndarray:
    """S_1..S_N for a due or immediate path; ``S_n > u`` iff ``U_n < 0``."""
    model = Model(model if model is not None else path.model)
    if model is Model.CLASSICAL:
        raise ModelMismatch("classical model has no interest discounting; use S_n = cumsum(Y - X)")
    return loss_sequence(model, path.premiums, path.claims, path.rates)


def first_exceedance(losses: np.ndarray, u: float) -> Optional[int]:
    """1-based first index with S_n > u, or None."""
    hits = np.flatnonzero(np.asarray(losses) > u)
    return int(hits[0]) + 1 if hits.size else None


# -- Monte Carlo -------------------------------------------------------------------

def resolve_workers(workers: Optional[int] = None) -> int:
    """Requested workers (default: CPU count), capped by ``RUINBOUND_THREADS``."""
    n = workers if workers is not None else (os.cpu_count() or 1)
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            n = min(n, int(cap))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return max(1, int(n))


def _blocks(n_paths: int):
    return [(start, min(start + BLOCK_SIZE, n_paths)) for start in range(0, n_paths, BLOCK_SIZE)]


def _block_inputs(config: RiskModelConfig, seed: int, start: int, stop: int):
    rows = [draw_inputs(config, seed, k) for k in range(start, stop)]
    return tuple(np.stack(col) for col in zip(*rows))


def _block_max_loss(config: RiskModelConfig, seed: int, models: Sequence[Model], bounds) -> np.ndarray:
    x, y, rates = _block_inputs(config, seed, *bounds)
    return np.column_stack([loss_sequence(m, x, y, rates).max(axis=1) for m in models])


def _block_exp_loss(config: RiskModelConfig, seed: int, R: float, ns: Sequence[int], bounds) -> np.ndarray:
    x, y, rates = _block_inputs(config, seed, *bounds)
    s = loss_sequence(config.model, x, y, rates)
    return np.exp(R * s[:, [n - 1 for n in ns]])


def _map_blocks(fn: Callable, n_paths: int, workers: Optional[int]) -> np.ndarray:
    blocks = _blocks(n_paths)
    n_workers = min(resolve_workers(workers), len(blocks))
    if n_workers == 1:
        parts = [fn(b) for b in blocks]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(fn, blocks))
    return np.concatenate(parts)


def max_losses(config: RiskModelConfig, n_paths: int, seed: int, workers: Optional[int] = None,
               models: Optional[Sequence] = None) -> np.ndarray:
    """max_{n<=N} S_n per path (rows, in path order) and per model (columns).

    All models share the same premium, claim and interest draws.
    """
    models = [Model(m) for m in (models or [config.model])]
    return _map_blocks(partial(_block_max_loss, config, seed, models), n_paths, workers)


def wilson_interval(k: int, n: int, z: float = _Z975):
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return max(0.0, min(center - half, p)), min(1.0, max(center + half, p))


def _estimate(model: Model, horizon: int, u: float, peaks: np.ndarray, seed: int) -> SimulationEstimate:
    n = peaks.size
    k = int(np.count_nonzero(peaks > u))
    p = k / n
    low, high = wilson_interval(k, n)
    return SimulationEstimate(model.value, float(u), horizon, n, seed, k, p, math.sqrt(p * (1 - p) / n), low, high)


def estimate_ruin_curves(config: RiskModelConfig, u_values: Sequence[float], n_paths: int, seed: int,
                         workers: Optional[int] = None,
                         models: Optional[Sequence] = None) -> dict:
    """Ruin estimates for several models and initial surpluses from one set of paths.

    Returns ``{model name: [estimate per u]}``.
    """
    if n_paths < 100:
        raise ConfigError(f"n_paths must be >= 100, got {n_paths}")
    models = [Model(m) for m in (models or [config.model])]
    peaks = max_losses(config, n_paths, seed, workers, models)
    return {
        m.value: [_estimate(m, config.horizon, u, peaks[:, j], seed) for u in u_values]
        for j, m in enumerate(models)
    }


def estimate_ruin_curve(config: RiskModelConfig, u_values: Sequence[float], n_paths: int, seed: int,
                        workers: Optional[int] = None) -> List[SimulationEstimate]:
    return estimate_ruin_curves(config, u_values, n_paths, seed, workers)[config.model.value]


def estimate_ruin_probability(config: RiskModelConfig, n_paths: int, seed: int,
                              workers: Optional[int] = None) -> SimulationEstimate:
    """Fraction of ``n_paths`` paths ruined by the horizon, with Wilson 95% interval."""
    return estimate_ruin_curve(config, [config.u], n_paths, seed, workers)[0]


def exponential_moments(config: RiskModelConfig, R: float, ns: Sequence[int], n_paths: int, seed: int,
                        workers: Optional[int] = None) -> List[MomentEstimate]:
    """Monte Carlo mean and standard error of exp(R S_n) for each n in ``ns``."""
    ns = [int(n) for n in ns]
    if any(n < 1 for n in ns):
        raise ValueError("n must be >= 1")
    if R == 0:
        return [MomentEstimate(n, 1.0, 0.0, n_paths) for n in ns]
    sup = config.adjustment_problem().domain_sup()
    if not 2 * R * config.claims.window < sup:
        raise VarianceUnbounded(
            f"2 R w = {2 * R * config.claims.window:.7g} is not inside the claim MGF domain (sup {sup:.7g})"
        )
    cfg = replace(config, horizon=max(ns))
    z = _map_blocks(partial(_block_exp_loss, cfg, seed, float(R), ns), n_paths, workers)
    return [
        MomentEstimate(n, float(z[:, j].mean()), float(z[:, j].std(ddof=1) / math.sqrt(n_paths)), n_paths)
        for j, n in enumerate(ns)
    ]


def exponential_moment(config: RiskModelConfig, R: float, n: int, n_paths: int, seed: int,
                       workers: Optional[int] = None) -> MomentEstimate:
    return exponential_moments(config, R, [n], n_paths, seed, workers)[0]
