"""Nonnegative parametric laws with closed-form moment generating functions.

Every law exposes ``mgf``/``log_mgf`` (returning ``inf`` outside the domain
rather than raising), ``mgf_domain_sup``, ``mean``, ``variance`` and a
``sample`` method that draws from an explicit ``numpy.random.Generator``.

Config records are tagged dicts, e.g. ``{"kind": "gamma", "shape": 0.5,
"rate": 0.5}``; see :func:`from_dict`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence, Union

import numpy as np

from .errors import ConfigError

_PROB_TOL = 1e-12


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class Poisson:
    rate: float

    kind = "poisson"

    def __post_init__(self):
        _require(math.isfinite(self.rate) and self.rate > 0, f"poisson.rate must be > 0, got {self.rate}")

    def log_mgf(self, t: float) -> float:
        if t == 0:
            return 0.0
        return self.rate * (_exp(t) - 1.0)

    def mgf_domain_sup(self) -> float:
        return math.inf

    def mean(self) -> float:
        return float(self.rate)

    def variance(self) -> float:
        return float(self.rate)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.poisson(self.rate, size).astype(float) if size is not None else float(rng.poisson(self.rate))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "rate": self.rate}


@dataclass(frozen=True)
class Gamma:
    """Gamma law in the shape/rate parameterization, density ``b^a y^(a-1) e^(-b y) / Gamma(a)``."""

    shape: float
    rate: float

    kind = "gamma"

    def __post_init__(self):
        _require(math.isfinite(self.shape) and self.shape > 0, f"gamma.shape must be > 0, got {self.shape}")
        _require(math.isfinite(self.rate) and self.rate > 0, f"gamma.rate must be > 0, got {self.rate}")

    def log_mgf(self, t: float) -> float:
        if t == 0:
            return 0.0
        if t >= self.rate:
            return math.inf
        return -self.shape * math.log1p(-t / self.rate)

    def mgf_domain_sup(self) -> float:
        return float(self.rate)

    def mean(self) -> float:
        return self.shape / self.rate

    def variance(self) -> float:
        return self.shape / self.rate**2

    def sample(self, rng: np.random.Generator, size=None):
        out = rng.gamma(self.shape, 1.0 / self.rate, size)
        return out if size is not None else float(out)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "shape": self.shape, "rate": self.rate}


@dataclass(frozen=True)
class Deterministic:
    value: float

    kind = "deterministic"

    def __post_init__(self):
        _require(math.isfinite(self.value) and self.value >= 0, f"deterministic.value must be >= 0, got {self.value}")

    def log_mgf(self, t: float) -> float:
        if t == 0:
            return 0.0
        return t * self.value

    def mgf_domain_sup(self) -> float:
        return math.inf

    def mean(self) -> float:
        return float(self.value)

    def variance(self) -> float:
        return 0.0

    def sample(self, rng: np.random.Generator, size=None):
        return np.full(size, float(self.value)) if size is not None else float(self.value)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value}


@dataclass(frozen=True)
class FiniteDiscrete:
    """Finitely many nonnegative atoms ``((value, prob), ...)``."""

    atoms: tuple

    kind = "discrete"

    def __post_init__(self):
        atoms = tuple((float(v), float(p)) for v, p in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        _require(len(atoms) > 0, "discrete.atoms must be nonempty")
        for v, p in atoms:
            _require(math.isfinite(v) and v >= 0, f"discrete atom value must be >= 0, got {v}")
            _require(p > 0, f"discrete atom probability must be > 0, got {p}")
        total = math.fsum(p for _, p in atoms)
        _require(abs(total - 1.0) <= _PROB_TOL, f"discrete probabilities sum to {total!r}, not 1")

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.atoms])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms])

    def log_mgf(self, t: float) -> float:
        if t == 0:
            return 0.0
        terms = [math.log(p) + t * v for v, p in self.atoms]
        top = max(terms)
        return top + math.log(math.fsum(math.exp(x - top) for x in terms))

    def mgf_domain_sup(self) -> float:
        return math.inf

    def mean(self) -> float:
        return math.fsum(v * p for v, p in self.atoms)

    def variance(self) -> float:
        mu = self.mean()
        return max(math.fsum(p * (v - mu) ** 2 for v, p in self.atoms), 0.0)

    def sample(self, rng: np.random.Generator, size=None):
        p = self.probs
        out = rng.choice(self.values, size=size, p=p / p.sum())
        return out if size is not None else float(out)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "atoms": [list(a) for a in self.atoms]}


DistributionSpec = Union[Poisson, Gamma, Deterministic, FiniteDiscrete]


def mgf(spec: DistributionSpec, t: float) -> float:
    """E[exp(t X)], ``inf`` where it diverges."""
    return _exp(spec.log_mgf(t))


def log_mgf(spec: DistributionSpec, t: float) -> float:
    return spec.log_mgf(t)


def mgf_domain_sup(spec: DistributionSpec) -> float:
    return spec.mgf_domain_sup()


def mean(spec: DistributionSpec) -> float:
    return spec.mean()


def variance(spec: DistributionSpec) -> float:
    return spec.variance()


def sample(spec: DistributionSpec, stream: np.random.Generator, size=None):
    return spec.sample(stream, size)


def from_dict(record: Mapping[str, Any]) -> DistributionSpec:
    """Build a spec from a tagged config record."""
    if not isinstance(record, Mapping) or "kind" not in record:
        raise ConfigError(f"distribution record needs a 'kind' field: {record!r}")
    kind = str(record["kind"]).lower()
    try:
        if kind == "poisson":
            return Poisson(float(record["rate"]))
        if kind == "gamma":
            return Gamma(float(record["shape"]), float(record["rate"]))
        if kind == "deterministic":
            return Deterministic(float(record["value"]))
        if kind in ("discrete", "finite_discrete"):
            atoms: Sequence = record["atoms"]
            return FiniteDiscrete(tuple((v, p) for v, p in atoms))
    except KeyError as exc:
        raise ConfigError(f"distribution '{kind}' is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad '{kind}' distribution record {record!r}: {exc}") from None
    raise ConfigError(f"unknown distribution kind '{kind}'")
