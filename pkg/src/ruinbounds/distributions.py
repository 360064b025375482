"""Closed-form log moment generating functions and exact samplers.

Every family in the catalogue evaluates log E exp(t Y) analytically as a
plain float, with math.inf standing for a divergent expectation. Values are
never NaN: the only non-finite result an evaluation may produce is +inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf

__all__ = [
    "INF",
    "IncrementDistribution",
    "Normal",
    "Uniform",
    "TwoPoint",
    "ShiftedExponential",
    "CompoundIncrement",
    "Degenerate",
    "Scaled",
    "FiniteDiscrete",
    "log_mgf",
    "log_mgf_at",
    "mgf_domain",
    "mgf_domain_sup",
    "mean",
    "support_bounds",
    "has_atom_at",
    "sample",
]


def _require_finite(name: str, **params: float) -> None:
    for key, val in params.items():
        if not isinstance(val, (int, float)) or not math.isfinite(val):
            raise ValueError(f"{name}.{key} must be a finite number, got {val!r}")


def _logaddexp(a: float, b: float) -> float:
    if a == -INF:
        return b
    if b == -INF:
        return a
    m = a if a > b else b
    if m == INF:
        return INF
    return m + math.log1p(math.exp(-abs(a - b)))


def _log_expm1_ratio(x: float) -> float:
    """log((exp(x) - 1) / x), continuous through x = 0."""
    if abs(x) < 1e-6:
        # series keeps relative error below 1e-12 where expm1(x)/x cancels
        return x / 2.0 + x * x / 24.0
    if x > 30.0:
        return x + math.log1p(-math.exp(-x)) - math.log(x)
    if x < -30.0:
        return math.log1p(-math.exp(x)) - math.log(-x)
    return math.log(math.expm1(x) / x)


class IncrementDistribution:
    """Base class for the closed catalogue of one-dimensional increment laws."""

    __slots__ = ()

    def _lmgf(self, t: float) -> float:
        raise NotImplementedError

    def _domain(self) -> tuple[float, float]:
        """Open interval of t where log E exp(t Y) is finite."""
        raise NotImplementedError

    def _support(self) -> tuple[float, float]:
        raise NotImplementedError

    def _mean(self) -> float:
        raise NotImplementedError

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def _atom_at(self, x: float) -> bool:
        return False


@dataclass(frozen=True)
class Normal(IncrementDistribution):
    mean: float
    variance: float

    def __post_init__(self) -> None:
        _require_finite("Normal", mean=self.mean, variance=self.variance)
        if self.variance <= 0.0:
            raise ValueError("Normal.variance must be positive")

    def _lmgf(self, t: float) -> float:
        return t * self.mean + 0.5 * self.variance * t * t

    def _domain(self) -> tuple[float, float]:
        return (-INF, INF)

    def _support(self) -> tuple[float, float]:
        return (-INF, INF)

    def _mean(self) -> float:
        return self.mean

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.mean + math.sqrt(self.variance) * rng.standard_normal(size)


@dataclass(frozen=True)
class Uniform(IncrementDistribution):
    lower: float
    upper: float

    def __post_init__(self) -> None:
        _require_finite("Uniform", lower=self.lower, upper=self.upper)
        if not self.lower < self.upper:
            raise ValueError("Uniform requires lower < upper")

    def _lmgf(self, t: float) -> float:
        return t * self.lower + _log_expm1_ratio(t * (self.upper - self.lower))

    def _domain(self) -> tuple[float, float]:
        return (-INF, INF)

    def _support(self) -> tuple[float, float]:
        return (self.lower, self.upper)

    def _mean(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.lower + (self.upper - self.lower) * rng.random(size)


@dataclass(frozen=True)
class TwoPoint(IncrementDistribution):
    x1: float
    p1: float
    x2: float

    def __post_init__(self) -> None:
        _require_finite("TwoPoint", x1=self.x1, p1=self.p1, x2=self.x2)
        if not 0.0 <= self.p1 <= 1.0:
            raise ValueError("TwoPoint.p1 must lie in [0, 1]")

    def _lmgf(self, t: float) -> float:
        if self.p1 == 0.0:
            return t * self.x2
        if self.p1 == 1.0:
            return t * self.x1
        return _logaddexp(
            math.log(self.p1) + t * self.x1,
            math.log1p(-self.p1) + t * self.x2,
        )

    def _domain(self) -> tuple[float, float]:
        return (-INF, INF)

    def _support(self) -> tuple[float, float]:
        xs = [x for x, p in ((self.x1, self.p1), (self.x2, 1.0 - self.p1)) if p > 0.0]
        return (min(xs), max(xs))

    def _mean(self) -> float:
        return self.p1 * self.x1 + (1.0 - self.p1) * self.x2

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        # inverse transform: u < p1 selects x1
        return np.where(rng.random(size) < self.p1, self.x1, self.x2)

    def _atom_at(self, x: float) -> bool:
        return (self.p1 > 0.0 and x == self.x1) or (self.p1 < 1.0 and x == self.x2)


@dataclass(frozen=True)
class ShiftedExponential(IncrementDistribution):
    """Y = shift + E with E exponential of the given rate: P[Y > x] = exp(-rate (x - shift))."""

    rate: float
    shift: float = 0.0

    def __post_init__(self) -> None:
        _require_finite("ShiftedExponential", rate=self.rate, shift=self.shift)
        if self.rate <= 0.0:
            raise ValueError("ShiftedExponential.rate must be positive")

    def _lmgf(self, t: float) -> float:
        if t >= self.rate:
            # divergent at the boundary as well, keeping the domain sup strict
            return INF
        return t * self.shift + math.log(self.rate) - math.log(self.rate - t)

    def _domain(self) -> tuple[float, float]:
        return (-INF, self.rate)

    def _support(self) -> tuple[float, float]:
        return (self.shift, INF)

    def _mean(self) -> float:
        return self.shift + 1.0 / self.rate

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        # inverse transform; random() < 1 keeps log1p argument > -1
        return self.shift - np.log1p(-rng.random(size)) / self.rate


@dataclass(frozen=True)
class Degenerate(IncrementDistribution):
    value: float

    def __post_init__(self) -> None:
        _require_finite("Degenerate", value=self.value)

    def _lmgf(self, t: float) -> float:
        return t * self.value

    def _domain(self) -> tuple[float, float]:
        return (-INF, INF)

    def _support(self) -> tuple[float, float]:
        return (self.value, self.value)

    def _mean(self) -> float:
        return self.value

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        # consumes no randomness
        return np.full(size, self.value)

    def _atom_at(self, x: float) -> bool:
        return x == self.value


@dataclass(frozen=True)
class Scaled(IncrementDistribution):
    factor: float
    inner: IncrementDistribution

    def __post_init__(self) -> None:
        _require_finite("Scaled", factor=self.factor)
        if self.factor == 0.0:
            raise ValueError("Scaled.factor must be nonzero")
        if not isinstance(self.inner, IncrementDistribution):
            raise ValueError("Scaled.inner must be an IncrementDistribution")

    def _lmgf(self, t: float) -> float:
        return log_mgf_at(self.inner, t * self.factor)

    def _domain(self) -> tuple[float, float]:
        lo, hi = self.inner._domain()
        if self.factor > 0.0:
            return (lo / self.factor, hi / self.factor)
        return (hi / self.factor, lo / self.factor)

    def _support(self) -> tuple[float, float]:
        lo, hi = self.inner._support()
        if self.factor > 0.0:
            return (self.factor * lo, self.factor * hi)
        return (self.factor * hi, self.factor * lo)

    def _mean(self) -> float:
        return self.factor * self.inner._mean()

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.factor * self.inner._draw(rng, size)

    def _atom_at(self, x: float) -> bool:
        return self.inner._atom_at(x / self.factor)


@dataclass(frozen=True)
class CompoundIncrement(IncrementDistribution):
    """Net loss over one inter-claim period: Y = claim - premium_rate * interarrival."""

    claim: IncrementDistribution
    premium_rate: float
    interarrival: IncrementDistribution

    def __post_init__(self) -> None:
        _require_finite("CompoundIncrement", premium_rate=self.premium_rate)
        if self.premium_rate <= 0.0:
            raise ValueError("CompoundIncrement.premium_rate must be positive")
        if self.claim._support()[0] < 0.0:
            raise ValueError("CompoundIncrement.claim must have nonnegative support")
        ia_lo = self.interarrival._support()[0]
        if ia_lo < 0.0 or self.interarrival._atom_at(0.0):
            raise ValueError("CompoundIncrement.interarrival must have positive support")

    def _lmgf(self, t: float) -> float:
        claim_part = log_mgf_at(self.claim, t)
        if claim_part == INF:
            return INF
        return claim_part + log_mgf_at(self.interarrival, -t * self.premium_rate)

    def _domain(self) -> tuple[float, float]:
        z_lo, z_hi = self.claim._domain()
        t_lo, t_hi = self.interarrival._domain()
        # -t * premium_rate must stay inside the interarrival domain
        lo = max(z_lo, -t_hi / self.premium_rate if t_hi != INF else -INF)
        hi = min(z_hi, -t_lo / self.premium_rate if t_lo != -INF else INF)
        return (lo, hi)

    def _support(self) -> tuple[float, float]:
        z_lo, z_hi = self.claim._support()
        t_lo, t_hi = self.interarrival._support()
        p = self.premium_rate
        lo = -INF if t_hi == INF else z_lo - p * t_hi
        hi = INF if z_hi == INF else z_hi - p * t_lo
        return (lo, hi)

    def _mean(self) -> float:
        return self.claim._mean() - self.premium_rate * self.interarrival._mean()

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        # draw order is part of the reproducibility contract: claim first
        z = self.claim._draw(rng, size)
        theta = self.interarrival._draw(rng, size)
        return z - self.premium_rate * theta

    def _atom_at(self, x: float) -> bool:
        # atoms are not tracked through the difference convolution
        return False


@dataclass(frozen=True)
class FiniteDiscrete(IncrementDistribution):
    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        atoms = tuple((float(x), float(p)) for x, p in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("FiniteDiscrete needs at least one atom")
        total = 0.0
        for x, p in atoms:
            _require_finite("FiniteDiscrete.atom", value=x, probability=p)
            if p < 0.0:
                raise ValueError("FiniteDiscrete probabilities must be nonnegative")
            total += p
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"FiniteDiscrete probabilities sum to {total}, not 1")

    def _lmgf(self, t: float) -> float:
        acc = -INF
        for x, p in self.atoms:
            if p > 0.0:
                acc = _logaddexp(acc, math.log(p) + t * x)
        return acc

    def _domain(self) -> tuple[float, float]:
        return (-INF, INF)

    def _support(self) -> tuple[float, float]:
        xs = [x for x, p in self.atoms if p > 0.0]
        return (min(xs), max(xs))

    def _mean(self) -> float:
        return sum(x * p for x, p in self.atoms)

    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        values = np.array([x for x, _ in self.atoms])
        cum = np.cumsum([p for _, p in self.atoms])
        idx = np.searchsorted(cum, rng.random(size), side="right")
        # cum[-1] can sit a few ulp below 1; clamp the overflow index
        return values[np.minimum(idx, len(values) - 1)]

    def _atom_at(self, x: float) -> bool:
        return any(p > 0.0 and v == x for v, p in self.atoms)


def log_mgf_at(dist: IncrementDistribution, t: float) -> float:
    """log E exp(t Y) at any real t. Exact zero at t = 0 for every family."""
    if math.isnan(t):
        raise ValueError("log_mgf argument must not be NaN")
    if t == 0.0:
        return 0.0
    return dist._lmgf(t)


def log_mgf(dist: IncrementDistribution, h: float) -> float:
    """log E exp(h Y) for h >= 0; math.inf past the finiteness frontier."""
    if not h >= 0.0:
        raise ValueError(f"log_mgf requires h >= 0, got {h!r}")
    return log_mgf_at(dist, h)


def mgf_domain(dist: IncrementDistribution) -> tuple[float, float]:
    """Open interval of arguments where the MGF is finite."""
    return dist._domain()


def mgf_domain_sup(dist: IncrementDistribution) -> float:
    """sup of h >= 0 with log_mgf(dist, h) finite."""
    return dist._domain()[1]


def mean(dist: IncrementDistribution) -> float:
    return dist._mean()


def support_bounds(dist: IncrementDistribution) -> tuple[float, float]:
    """Essential infimum and supremum of the law."""
    return dist._support()


def has_atom_at(dist: IncrementDistribution, x: float) -> bool:
    """Whether P[Y = x] > 0, conservatively False where atoms are not tracked."""
    return dist._atom_at(x)


def sample(dist: IncrementDistribution, rng: np.random.Generator, size: int | None = None):
    """Exact draws from dist; a scalar when size is None, else an ndarray."""
    if size is None:
        return float(dist._draw(rng, 1)[0])
    return dist._draw(rng, size)
