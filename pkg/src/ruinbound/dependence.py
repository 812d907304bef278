"""m-dependent, identically distributed sequences built from moving sums.

``X_i = Z_i + ... + Z_{i+w-1}`` with i.i.d. innovations ``Z`` is
``(w - 1)``-dependent, and the marginal of ``X_i`` is the w-fold convolution
of the innovation law. For the Poisson, gamma and point-mass families the
innovation is chosen so that this convolution is exactly the target.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, field
from typing import Any, List, Mapping, Optional

import numpy as np

from . import distributions as dist
from .distributions import Deterministic, DistributionSpec, Gamma, Poisson
from .errors import ConfigError, NonDivisibleFamily, ZeroVariance


def innovation_for_target(target: DistributionSpec, w: int) -> DistributionSpec:
    """Law of Z whose w-fold independent sum has the law ``target``."""
    if int(w) != w or w < 1:
        raise ConfigError(f"window must be a positive integer, got {w}")
    if w == 1:
        return target
    if isinstance(target, Poisson):
        return Poisson(target.rate / w)
    if isinstance(target, Gamma):
        return Gamma(target.shape / w, target.rate)
    if isinstance(target, Deterministic):
        return Deterministic(target.value / w)
    raise NonDivisibleFamily(f"{type(target).__name__} has no general {w}-th convolution root")


def _convolve_power(z: DistributionSpec, w: int) -> Optional[DistributionSpec]:
    if w == 1:
        return z
    if isinstance(z, Poisson):
        return Poisson(z.rate * w)
    if isinstance(z, Gamma):
        return Gamma(z.shape * w, z.rate)
    if isinstance(z, Deterministic):
        return Deterministic(z.value * w)
    return None


@dataclass(frozen=True)
class DependenceSpec:
    """Moving-sum construction with window ``window`` (dependence order ``window - 1``)."""

    target: DistributionSpec
    window: int = 1
    innovation: Optional[DistributionSpec] = field(default=None)

    def __post_init__(self):
        if int(self.window) != self.window or self.window < 1:
            raise ConfigError(f"window must be a positive integer, got {self.window}")
        object.__setattr__(self, "window", int(self.window))
        if self.innovation is None:
            object.__setattr__(self, "innovation", innovation_for_target(self.target, self.window))
            return
        total = _convolve_power(self.innovation, self.window)
        if total is None:
            if self.window == 1 and self.innovation != self.target:
                raise ConfigError("with window 1 the innovation must equal the target")
            return
        if type(total) is not type(self.target) or not np.allclose(
            astuple(total), astuple(self.target), rtol=1e-12, atol=0
        ):
            raise ConfigError(f"{self.window}-fold sum of {self.innovation} is not {self.target}")

    @classmethod
    def iid(cls, target: DistributionSpec) -> "DependenceSpec":
        return cls(target, 1)

    @classmethod
    def with_order(cls, target: DistributionSpec, m: int) -> "DependenceSpec":
        return cls(target, int(m) + 1)

    @property
    def m(self) -> int:
        return self.window - 1

    @classmethod
    def from_dict(cls, record: Mapping[str, Any]) -> "DependenceSpec":
        if not isinstance(record, Mapping) or "marginal" not in record:
            raise ConfigError(f"dependence record needs a 'marginal' field: {record!r}")
        m = record.get("m", 0)
        if not isinstance(m, int) or isinstance(m, bool) or m < 0:
            raise ConfigError(f"dependence.m must be a nonnegative integer, got {m!r}")
        return cls.with_order(dist.from_dict(record["marginal"]), m)

    def to_dict(self) -> dict:
        return {"marginal": self.target.to_dict(), "m": self.m}


def generate_sequence(spec: DependenceSpec, n: int, stream: np.random.Generator) -> np.ndarray:
    """Draw ``n + w - 1`` innovations and return the ``n`` moving sums."""
    z = np.asarray(spec.innovation.sample(stream, n + spec.window - 1), dtype=float)
    if spec.window == 1:
        return z
    return moving_sums(z, spec.window)


def moving_sums(z: np.ndarray, w: int) -> np.ndarray:
    """Window-w sums along the last axis, each summed left to right."""
    out = z[..., : z.shape[-1] - w + 1].copy()
    for j in range(1, w):
        out += z[..., j : z.shape[-1] - w + 1 + j]
    return out


def lag_correlation(spec: DependenceSpec, k: int) -> float:
    """Exact Corr(X_i, X_{i+k}) = max(w - k, 0) / w."""
    if k < 0:
        raise ValueError("lag must be nonnegative")
    if dist.variance(spec.innovation) <= 0:
        raise ZeroVariance(f"innovation {spec.innovation} has zero variance")
    return max(spec.window - k, 0) / spec.window


def split_subsequences(n: int, m: int) -> List[List[int]]:
    """Partition 1..n by residue mod m+1; members of one part are m+1 apart."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if m < 0:
        raise ValueError("m must be >= 0")
    return [list(range(r, n + 1, m + 1)) for r in range(1, m + 2)]
