"""Empirical-distribution tooling and the reference limit laws.

The two reference laws are the exponential (tree limit) and the product
of two independent standard exponentials (hypercube limit).  The product
law's survival function P(E1*E2 > z) = int_0^inf exp(-t - z/t) dt is
evaluated by adaptive quadrature split at the integrand peak t = sqrt(z)
(equivalently 2*sqrt(z)*K1(2*sqrt(z)), but quadrature keeps the module
free of Bessel machinery and directly testable).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

_QUAD_TARGET = 1e-10


@dataclass(frozen=True)
class Sample:
    """A sorted batch of real observations."""

    values: np.ndarray

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("sample must be non-empty")
        if not np.isfinite(self.values).all():
            raise ValueError("sample values must be finite")

    @classmethod
    def from_values(cls, values) -> "Sample":
        return cls(np.sort(np.asarray(values, dtype=float)))

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ReferenceLaw:
    tag: str
    cdf: Callable[[np.ndarray], np.ndarray]


def exponential_law(mean: float = 1.0) -> ReferenceLaw:
    if mean <= 0:
        raise ValueError("mean must be positive")

    def cdf(z):
        z = np.asarray(z, dtype=float)
        return np.where(z < 0, 0.0, -np.expm1(-z / mean))

    return ReferenceLaw(tag=f"exponential(mean={mean})", cdf=cdf)


def prodexp_survival(z: float) -> float:
    """P(E1*E2 > z) = int_0^inf exp(-t - z/t) dt for z >= 0."""
    if z < 0:
        raise ValueError(f"z must be >= 0, got {z}")
    if z == 0.0:
        return 1.0
    peak = math.sqrt(z)

    def f(t):
        return math.exp(-t - z / t)

    left, _ = quad(f, 0.0, peak, epsabs=_QUAD_TARGET, epsrel=_QUAD_TARGET)
    right, _ = quad(f, peak, math.inf, epsabs=_QUAD_TARGET, epsrel=_QUAD_TARGET)
    return left + right


def prodexp_cdf(z: float) -> float:
    """CDF of the product of two independent standard exponentials."""
    return 1.0 - prodexp_survival(z)


def product_exponential_law(scale: float = 1.0) -> ReferenceLaw:
    if scale <= 0:
        raise ValueError("scale must be positive")

    def cdf(z):
        z = np.asarray(z, dtype=float)
        flat = np.atleast_1d(z)
        out = np.array([0.0 if v < 0 else prodexp_cdf(v / scale) for v in flat])
        return out.reshape(z.shape) if z.shape else out[0]

    return ReferenceLaw(tag=f"product-exponential(scale={scale})", cdf=cdf)


def ks_statistic(s: Sample, law: ReferenceLaw) -> float:
    """Two-sided sup distance between the ECDF and the law's CDF."""
    n = s.n
    f = np.asarray(law.cdf(s.values), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = (i / n - f).max()
    d_minus = (f - (i - 1) / n).max()
    return float(max(d_plus, d_minus))


@dataclass(frozen=True)
class MomentSummary:
    n: int
    mean: float
    variance: float
    mean_stderr: float
    variance_stderr: float


def moment_summary(s: Sample) -> MomentSummary:
    """Mean and unbiased variance with CLT standard errors; the variance
    standard error uses the fourth central moment."""
    n = s.n
    if n < 2:
        raise ValueError("need at least 2 observations")
    v = s.values
    mean = float(v.mean())
    var = float(v.var(ddof=1))
    centered = v - mean
    m4 = float((centered**4).mean())
    var_of_var = max(m4 - (n - 3) / (n - 1) * var * var, 0.0) / n
    return MomentSummary(
        n=n,
        mean=mean,
        variance=var,
        mean_stderr=math.sqrt(var / n),
        variance_stderr=math.sqrt(var_of_var),
    )
