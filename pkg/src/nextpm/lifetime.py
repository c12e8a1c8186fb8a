"""Weibull component lifetime model.

Survival function, exact moments, and inverse-CDF sampling of both
unconditional lifetimes and lifetimes conditioned on survival to a given age.
Times are in months, costs in kUSD.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ComponentSpec:
    """Weibull parameters and maintenance costs of one component."""

    id: int
    alpha: float  # scale, months
    beta: float   # shape
    cm_cost: float  # b, kUSD per corrective repair
    pm_cost: float  # c, kUSD per preventive renewal
    name: str = ""

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"component {self.id}: alpha must be > 0, got {self.alpha}")
        if self.beta <= 0:
            raise ValueError(f"component {self.id}: beta must be > 0, got {self.beta}")
        if self.cm_cost < 0 or self.pm_cost < 0:
            raise ValueError(f"component {self.id}: costs must be >= 0")
        if self.cm_cost < self.pm_cost:
            warnings.warn(
                f"component {self.id}: CM cost {self.cm_cost} below PM cost "
                f"{self.pm_cost}; preventive maintenance can never pay off",
                stacklevel=2,
            )


@dataclass(frozen=True)
class LifetimeMoments:
    mean: float       # months
    variance: float   # months^2


def survival(spec: ComponentSpec, t: float) -> float:
    """P(L > t) = exp(-(t/alpha)^beta)."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return math.exp(-((t / spec.alpha) ** spec.beta))


def density(spec: ComponentSpec, t: float) -> float:
    """Weibull density; 0 at t=0 for beta > 1."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0:
        return 0.0 if spec.beta > 1 else (spec.beta / spec.alpha if spec.beta == 1 else math.inf)
    a, b = spec.alpha, spec.beta
    return (b / a) * (t / a) ** (b - 1) * math.exp(-((t / a) ** b))


def moments(spec: ComponentSpec) -> LifetimeMoments:
    """Exact mean alpha*Gamma(1+1/beta) and matching variance."""
    mean = spec.alpha * math.gamma(1.0 + 1.0 / spec.beta)
    variance = spec.alpha**2 * math.gamma(1.0 + 2.0 / spec.beta) - mean**2
    return LifetimeMoments(mean=mean, variance=variance)


def lives_from_uniforms(spec: ComponentSpec, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF transform: L = alpha * (-ln U)^(1/beta)."""
    return spec.alpha * (-np.log(u)) ** (1.0 / spec.beta)


def residual_total_from_uniforms(spec: ComponentSpec, age: float, u: np.ndarray) -> np.ndarray:
    """Total life conditioned on exceeding `age`; always > age.

    Inverse CDF of {L | L > age}: L = alpha * ((age/alpha)^beta - ln U)^(1/beta).
    """
    if age < 0:
        raise ValueError(f"age must be >= 0, got {age}")
    shift = (age / spec.alpha) ** spec.beta
    return spec.alpha * (shift - np.log(u)) ** (1.0 / spec.beta)


def sample_life(spec: ComponentSpec, rng: np.random.Generator) -> float:
    """One unconditional lifetime draw."""
    return float(lives_from_uniforms(spec, rng.random()))


def sample_residual_life(spec: ComponentSpec, age: float, rng: np.random.Generator) -> float:
    """One draw of the TOTAL life conditioned on survival past `age`.

    Returns total life (> age); the remaining life is the return value minus
    `age`.
    """
    return float(residual_total_from_uniforms(spec, age, np.asarray(rng.random())))
