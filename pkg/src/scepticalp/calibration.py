"""Success levels and Type-I error rates of the sceptical success criterion.

Replication success at level ``gamma`` means both estimates are positive and

    (z_o^2 / z_gamma^2 - 1)_+ (z_r^2 / z_gamma^2 - 1)_+ >= c,

with ``z_gamma = Phi^{-1}(1 - gamma)``.  The controlled level ``gamma_c`` is
the ``gamma`` for which this criterion has overall size ``alpha**2``; comparing
the sceptical p-value to ``gamma_c`` is the same as comparing ``p_s_star`` to
``alpha``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .core import C_ONE, C_ZERO, PHI, null_quantile
from .exceptions import DomainError, InfeasibleError
from .numerics import std_normal_quantile, std_normal_sf

__all__ = [
    "NullSide",
    "CalibrationResult",
    "T1eQuery",
    "golden_level",
    "zr_min",
    "overall_t1e",
    "calibrate_gamma_c",
    "gamma_c",
    "partial_t1e",
    "conditional_t1e",
    "conditional_t1e_z",
    "success_region_boundary",
    "success_region_area",
]

_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-10, limit=200)


class NullSide(str, enum.Enum):
    BOTH = "BOTH"
    ORIGINAL_NULL = "ORIGINAL_NULL"
    REPLICATION_NULL = "REPLICATION_NULL"


@dataclass(frozen=True)
class CalibrationResult:
    alpha: float
    c: float
    gamma_c: float
    z_gamma_c: float
    achieved_overall_t1e: float


@dataclass(frozen=True)
class T1eQuery:
    """Partial/overall error query; ``drift`` is the standardised mean of the
    non-null study."""

    gamma: float
    c: float
    drift: float = 0.0
    null_side: NullSide = NullSide.BOTH

    def __post_init__(self):
        _check_level(self.gamma, "gamma")
        _check_c(self.c)
        object.__setattr__(self, "null_side", NullSide(self.null_side))
        if self.null_side is NullSide.BOTH and self.drift != 0:
            raise DomainError("drift must be 0 under the intersection null")


def _check_level(x, name="alpha"):
    if not (isinstance(x, (int, float, np.floating)) and 0 < x < 0.5):
        raise DomainError(f"{name} must lie in (0, 0.5), got {x!r}")


def _check_c(c):
    if not (math.isfinite(c) and c >= 0):
        raise DomainError(f"variance ratio c must be finite and non-negative, got {c!r}")


def golden_level(alpha):
    """Golden success level ``1 - Phi(z_alpha / sqrt(phi))``."""
    _check_level(alpha)
    return std_normal_sf(std_normal_quantile(1 - alpha) / math.sqrt(PHI))


def _zr_min(z_o, c, z_gamma):
    """Vectorised bound; ``inf`` where success is impossible."""
    z_o = np.asarray(z_o, dtype=float)
    ratio = z_o**2 / z_gamma**2 - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        out = z_gamma * np.sqrt(1 + c / ratio)
    if c == 0:
        out = np.where(z_o > z_gamma, z_gamma, np.inf)
    return np.where(z_o > z_gamma, out, np.inf)


def zr_min(z_o, c, gamma):
    """Smallest replication z-value giving success at level ``gamma``."""
    _check_c(c)
    if not 0 < gamma < 1:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma!r}")
    z_gamma = std_normal_quantile(1 - gamma)
    if not z_o > z_gamma:
        raise InfeasibleError(
            f"z_o = {z_o:.6g} does not exceed z_gamma = {z_gamma:.6g}; "
            "success is impossible for any replication result"
        )
    return float(_zr_min(z_o, c, z_gamma))


def _success_prob(gamma, c, mean_o=0.0, mean_r=0.0):
    """P(success at level gamma) for z_o ~ N(mean_o, 1), z_r ~ N(mean_r, 1).

    Integrates over ``s = log(z_o^2 / z_gamma^2 - 1)``: the replication bound
    blows up as ``z_o`` approaches ``z_gamma`` and on the ``z_o`` scale the
    success probability jumps within a sliver of width ``~c / mean_r^2``.
    """
    z_gamma = std_normal_quantile(1 - gamma)
    z_gamma2 = z_gamma * z_gamma

    def integrand(s):
        r = math.exp(s)
        z = z_gamma * math.sqrt(1 + r)
        bound = z_gamma * math.sqrt(1 + c / r)
        jac = z_gamma * r / (2 * math.sqrt(1 + r))
        return math.exp(-0.5 * (z - mean_o) ** 2) * special.ndtr(mean_r - bound) * jac

    z_hi = max(z_gamma, mean_o) + 40.0
    s_lo, s_hi = -80.0, math.log(z_hi * z_hi / z_gamma2 - 1)
    points = []
    if mean_o > z_gamma:
        points.append(math.log(mean_o * mean_o / z_gamma2 - 1))
    if c > 0 and mean_r > z_gamma:
        points.append(math.log(c * z_gamma2 / (mean_r * mean_r - z_gamma2)))
    points = sorted(p for p in points if s_lo < p < s_hi)
    edges = [s_lo, *points, s_hi]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += integrate.quad(integrand, lo, hi, **_QUAD_OPTS)[0]
    return total / math.sqrt(2 * math.pi)


def overall_t1e(gamma, c):
    """Overall Type-I error of success at level ``gamma`` (intersection null).

    Computed by integrating over the original z-value; equals ``gamma**2`` at
    ``c = 0``.
    """
    _check_level(gamma, "gamma")
    _check_c(c)
    if c < C_ZERO:
        return gamma * gamma
    return _success_prob(gamma, c)


@lru_cache(maxsize=4096)
def _gamma_c(alpha, c):
    if c < C_ZERO:
        return alpha
    if abs(c - 1) < C_ONE:
        return std_normal_sf(std_normal_quantile(1 - 2 * alpha**2) / 2)
    y = null_quantile(1 - 4 * alpha**2, c)
    return std_normal_sf(math.sqrt(y))


def gamma_c(alpha, c):
    """Controlled success level (quantile route, memoised)."""
    _check_level(alpha)
    _check_c(c)
    return _gamma_c(float(alpha), float(c))


def calibrate_gamma_c(alpha, c):
    """Controlled level ``gamma_c(alpha)`` with exact overall size ``alpha**2``.

    ``z_{gamma_c}^2`` is the ``1 - 4 alpha^2`` quantile of the null
    distribution of the sceptical statistic.  The returned
    ``achieved_overall_t1e`` is recomputed independently by integration.
    """
    g = gamma_c(alpha, c)
    return CalibrationResult(
        alpha=float(alpha), c=float(c), gamma_c=g,
        z_gamma_c=std_normal_quantile(1 - g),
        achieved_overall_t1e=overall_t1e(g, c),
    )


def partial_t1e(query):
    """Partial Type-I error under the union null.

    The null-side statistic is standard normal and the other one has mean
    ``query.drift``.  Bounded by ``query.gamma`` for every drift.
    """
    if query.null_side is NullSide.BOTH:
        raise DomainError("use overall_t1e for the intersection null")
    if query.drift < 0:
        raise DomainError(f"drift must be non-negative, got {query.drift}")
    if query.null_side is NullSide.ORIGINAL_NULL:
        return _success_prob(query.gamma, query.c, mean_r=query.drift)
    return _success_prob(query.gamma, query.c, mean_o=query.drift)


def conditional_t1e(p_o, c, alpha):
    """Probability of success given the original result when the replication
    effect is null.  0 when the original cannot reach success at ``gamma_c``.
    """
    if not 0 < p_o < 1:
        raise DomainError(f"p_o must lie in (0, 1), got {p_o!r}")
    return conditional_t1e_z(-std_normal_quantile(p_o), c, alpha)


def conditional_t1e_z(z_o, c, alpha):
    """:func:`conditional_t1e` for an original z-value (no underflow for
    very convincing originals)."""
    g = gamma_c(alpha, c)
    z_gamma = std_normal_quantile(1 - g)
    if not z_o > z_gamma:
        return 0.0
    return float(special.ndtr(-_zr_min(z_o, c, z_gamma)))


def success_region_boundary(p_o, alpha, c):
    """Largest replication p-value giving success for this ``p_o``
    (0 outside the region)."""
    return conditional_t1e(p_o, c, alpha)


def success_region_area(alpha, c):
    """Area of the one-sided success region in the ``(p_o, p_r)`` square."""
    g = gamma_c(alpha, c)
    if c < C_ZERO:
        return alpha * alpha
    # substitute p_o = g * s**2 to soften the boundary's behaviour at 0
    val, _ = integrate.quad(
        lambda s: 2 * g * s * success_region_boundary(g * s * s, alpha, c),
        0.0, 1.0, **_QUAD_OPTS,
    )
    return val
