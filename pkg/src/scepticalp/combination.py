"""Two-study p-value combination rules calibrated to overall level ``alpha**2``.

All rules take one-sided p-values.  Each verdict carries ``p_overall_scale``,
the quantity compared with ``alpha**2``: success at level ``alpha`` means
``p_overall_scale <= alpha**2`` and every rule has exact size ``alpha**2``
when both studies are null.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special, stats

from . import calibration
from .exceptions import DomainError
from .methods import Method

__all__ = [
    "COMBINATION_METHODS",
    "CombinedVerdict",
    "two_trials",
    "combine",
    "pearson_partial_bound",
    "partial_t1e_bound",
    "region_boundary",
    "region_area",
    "combination_partial_t1e",
]

COMBINATION_METHODS = (Method.TWO_TRIALS, Method.FISHER, Method.STOUFFER, Method.PEARSON)
_CHI2_4 = stats.chi2(4)
_QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-10, limit=200)


@dataclass(frozen=True)
class CombinedVerdict:
    method: Method
    statistic: float
    p_overall_scale: float
    direction_ok: bool = True

    def success_at(self, alpha=0.025):
        """Success at overall level ``alpha**2``."""
        _check_alpha(alpha)
        return bool(self.direction_ok and self.p_overall_scale <= alpha * alpha)


def _check_alpha(alpha):
    if not 0 < alpha < 0.5:
        raise DomainError(f"alpha must lie in (0, 0.5), got {alpha!r}")


def _check_p(p, name):
    if not (isinstance(p, (int, float, np.floating)) and 0 < p <= 1):
        raise DomainError(f"{name} must lie in (0, 1], got {p!r}")
    return float(p)


def _direction(p_o, p_r, require_direction):
    return not require_direction or (p_o < 0.5 and p_r < 0.5)


def two_trials(p_o, p_r, require_direction=False):
    """Two-trials rule: both p-values at most ``alpha``, i.e. ``p_max**2 <= alpha**2``."""
    p_o, p_r = _check_p(p_o, "p_o"), _check_p(p_r, "p_r")
    p_max = max(p_o, p_r)
    return CombinedVerdict(Method.TWO_TRIALS, p_max, p_max * p_max,
                           _direction(p_o, p_r, require_direction))


def combine(method, p_o, p_r, require_direction=False):
    """Combine two one-sided p-values with the given rule.

    Fisher uses ``-2 ln(p_o p_r)`` with the upper chi-squared(4) tail,
    Stouffer ``(z_o + z_r) / sqrt(2)`` with the normal upper tail and Pearson
    ``-2 ln((1 - p_o)(1 - p_r))`` with the lower chi-squared(4) tail.
    ``require_direction`` additionally demands both p-values below 1/2
    (both estimates positive); this breaks the exact ``alpha**2`` size.
    """
    method = Method.parse(method)
    if method is Method.TWO_TRIALS:
        return two_trials(p_o, p_r, require_direction)
    p_o, p_r = _check_p(p_o, "p_o"), _check_p(p_r, "p_r")
    ok = _direction(p_o, p_r, require_direction)
    if method is Method.FISHER:
        stat = -2 * (math.log(p_o) + math.log(p_r))
        scale = float(_CHI2_4.sf(stat))
    elif method is Method.STOUFFER:
        stat = float(-(special.ndtri(p_o) + special.ndtri(p_r)) / math.sqrt(2))
        scale = float(special.ndtr(-stat))
    elif method is Method.PEARSON:
        stat = -2 * (math.log1p(-p_o) + math.log1p(-p_r)) if max(p_o, p_r) < 1 else math.inf
        scale = float(_CHI2_4.cdf(stat))
    else:
        raise DomainError(f"{method.value} is not a combination method")
    return CombinedVerdict(method, float(stat), scale, ok)


def pearson_partial_bound(alpha):
    """Supremum of Pearson's partial Type-I error at overall level ``alpha**2``."""
    _check_alpha(alpha)
    return float(-math.expm1(-0.5 * _CHI2_4.ppf(alpha * alpha)))


def partial_t1e_bound(method, alpha, c=1.0):
    """Supremum of the partial Type-I error over the non-null study's effect."""
    method = Method.parse(method)
    _check_alpha(alpha)
    if method is Method.TWO_TRIALS:
        return alpha
    if method in (Method.FISHER, Method.STOUFFER):
        return 1.0
    if method is Method.PEARSON:
        return pearson_partial_bound(alpha)
    if method is Method.SCEPTICAL_CONTROLLED:
        return calibration.gamma_c(alpha, c)
    if method is Method.SCEPTICAL_GOLDEN:
        return calibration.golden_level(alpha)
    return alpha


def _replication_threshold(method, z_o, alpha):
    """Smallest replication z-value giving success (``inf`` if none)."""
    a2 = alpha * alpha
    if method is Method.TWO_TRIALS:
        z_a = float(special.ndtri(1 - alpha))
        return z_a if z_o >= z_a else math.inf
    if method is Method.STOUFFER:
        return math.sqrt(2) * float(special.ndtri(1 - a2)) - z_o
    p_o = float(special.ndtr(-z_o))
    if method is Method.FISHER:
        b = math.exp(-0.5 * _CHI2_4.isf(a2)) / p_o if p_o > 0 else math.inf
    elif method is Method.PEARSON:
        b = 1 - math.exp(-0.5 * _CHI2_4.ppf(a2)) / (1 - p_o) if p_o < 1 else 0.0
    else:
        raise DomainError(f"no success region defined for {method.value}")
    if b >= 1:
        return -math.inf
    if b <= 0:
        return math.inf
    return -float(special.ndtri(b))


def region_boundary(method, p_o, alpha=0.025, c=1.0):
    """Largest ``p_r`` giving success for this ``p_o`` (0 when none does)."""
    method = Method.parse(method)
    _check_alpha(alpha)
    p_o = _check_p(p_o, "p_o")
    a2 = alpha * alpha
    if method is Method.TWO_TRIALS:
        return alpha if p_o <= alpha else 0.0
    if method is Method.FISHER:
        return min(1.0, math.exp(-0.5 * _CHI2_4.isf(a2)) / p_o)
    if method is Method.STOUFFER:
        return float(special.ndtr(-special.ndtri(p_o) + math.sqrt(2) * special.ndtri(a2)))
    if method is Method.PEARSON:
        if p_o >= 1:
            return 0.0
        return max(0.0, 1 - math.exp(-0.5 * _CHI2_4.ppf(a2)) / (1 - p_o))
    if method is Method.SCEPTICAL_CONTROLLED:
        return calibration.success_region_boundary(p_o, alpha, c) if p_o < 1 else 0.0
    raise DomainError(f"no success region defined for {method.value}")


def _kinks(method, alpha):
    a2 = alpha * alpha
    if method is Method.TWO_TRIALS:
        return [alpha]
    if method is Method.FISHER:
        return [math.exp(-0.5 * _CHI2_4.isf(a2))]
    if method is Method.PEARSON:
        return [pearson_partial_bound(alpha)]
    return []


def region_area(method, alpha=0.025, c=1.0):
    """Area of the success region in the unit ``(p_o, p_r)`` square."""
    method = Method.parse(method)
    if method is Method.SCEPTICAL_CONTROLLED:
        return calibration.success_region_area(alpha, c)
    edges = [0.0, *_kinks(method, alpha), 1.0]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += integrate.quad(lambda p: region_boundary(method, p, alpha, c) if p > 0 else 0.0,
                                lo, hi, **_QUAD_OPTS)[0]
    return total


def combination_partial_t1e(method, alpha, drift, c=1.0):
    """Partial Type-I error: one study null, the other with standardised
    mean ``drift``.  Every rule here is symmetric in the two studies, so the
    null side does not matter."""
    method = Method.parse(method)
    _check_alpha(alpha)
    if method is Method.SCEPTICAL_CONTROLLED:
        return calibration.partial_t1e(calibration.T1eQuery(
            calibration.gamma_c(alpha, c), c, drift, calibration.NullSide.REPLICATION_NULL))

    # integrate over the non-null study's z-value w ~ N(drift, 1); given w the
    # null study succeeds with probability 1 - Phi(threshold(w))
    def integrand(w):
        bound = _replication_threshold(method, w, alpha)
        return math.exp(-0.5 * (w - drift) ** 2) * float(special.ndtr(-bound))

    lo, hi = drift - 12.0, drift + 12.0
    kinks = [float(special.ndtri(1 - k)) for k in _kinks(method, alpha)]
    edges = [lo, *sorted(k for k in kinks if lo < k < hi), hi]
    total = sum(integrate.quad(integrand, a, b, **_QUAD_OPTS)[0]
                for a, b in zip(edges[:-1], edges[1:]))
    return total / math.sqrt(2 * math.pi)
