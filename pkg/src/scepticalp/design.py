"""Power and sample-size planning for replication studies.

Given the original z-value, the replication z-value is ``N(sqrt(c) z_o, 1)``
when the original estimate is taken as the truth (conditional power) and
``N(sqrt(c) z_o, 1 + c)`` when its sampling uncertainty is propagated
(predictive power).  Success is the event that ``z_r`` exceeds the method's
bound: the significance threshold ``z_alpha`` for the two-trials rule and the
smallest replication z-value reaching the sceptical success level otherwise.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .calibration import _success_prob, _zr_min, conditional_t1e_z
from .exceptions import DomainError, InfeasibleError
from .methods import Method, success_level
from .numerics import Tolerance, find_root_bracketed, std_normal_quantile

__all__ = [
    "PowerKind",
    "DesignRequest",
    "DesignResult",
    "ProjectPowerQuery",
    "replication_bound",
    "conditional_power",
    "predictive_power",
    "power",
    "required_relative_sample_size",
    "project_power",
]

C_MIN, C_MAX = 1e-4, 1e4
_DESIGN_METHODS = (
    Method.SCEPTICAL_CONTROLLED, Method.SCEPTICAL_NOMINAL,
    Method.SCEPTICAL_GOLDEN, Method.TWO_TRIALS,
)


class PowerKind(str, enum.Enum):
    CONDITIONAL = "CONDITIONAL"
    PREDICTIVE = "PREDICTIVE"


@dataclass(frozen=True)
class DesignRequest:
    z_o: float
    alpha: float = 0.025
    target_power: float = 0.8
    power_kind: PowerKind = PowerKind.CONDITIONAL
    method: Method = Method.SCEPTICAL_CONTROLLED

    def __post_init__(self):
        object.__setattr__(self, "power_kind", PowerKind(self.power_kind))
        object.__setattr__(self, "method", _design_method(self.method))
        if not self.z_o > 0:
            raise DomainError(f"z_o must be positive, got {self.z_o}")
        if not 0 < self.alpha < 0.5:
            raise DomainError(f"alpha must lie in (0, 0.5), got {self.alpha}")
        if not self.alpha < self.target_power < 1:
            raise DomainError(
                f"target power must lie in (alpha, 1), got {self.target_power}"
            )


@dataclass(frozen=True)
class DesignResult:
    c_required: float
    achieved_power: float
    gamma_used: float
    conditional_t1e_at_design: float
    original_significant: bool


@dataclass(frozen=True)
class ProjectPowerQuery:
    alpha: float = 0.025
    original_power: float = 0.8
    c: float = 1.0
    method: Method = Method.SCEPTICAL_CONTROLLED

    def __post_init__(self):
        object.__setattr__(self, "method", _design_method(self.method))
        if not 0 < self.alpha < 0.5:
            raise DomainError(f"alpha must lie in (0, 0.5), got {self.alpha}")
        if not 0 < self.original_power < 1:
            raise DomainError(f"original power must lie in (0, 1), got {self.original_power}")
        if not (math.isfinite(self.c) and self.c >= 0):
            raise DomainError(f"c must be finite and non-negative, got {self.c}")

    @property
    def mu(self):
        """Mean of the original z-value: ``z_alpha + z_beta``."""
        return std_normal_quantile(1 - self.alpha) + std_normal_quantile(self.original_power)


def _design_method(method):
    method = Method.parse(method)
    if method not in _DESIGN_METHODS:
        raise DomainError(f"{method.value} is not supported for design")
    return method


def replication_bound(z_o, c, alpha, method=Method.SCEPTICAL_CONTROLLED):
    """Replication z-value needed for success (``inf`` if unreachable)."""
    method = _design_method(method)
    if method is Method.TWO_TRIALS:
        return std_normal_quantile(1 - alpha)
    gamma = success_level(method, alpha, c)
    return float(_zr_min(z_o, c, std_normal_quantile(1 - gamma)))


def _check(z_o, c):
    if not z_o > 0:
        raise DomainError(f"z_o must be positive, got {z_o}")
    if not (math.isfinite(c) and c > 0):
        raise DomainError(f"c must be finite and positive, got {c}")


def conditional_power(z_o, c, alpha=0.025, method=Method.SCEPTICAL_CONTROLLED):
    """Success probability when the original estimate is the true effect.

    For the two-trials rule this is the power for significance of the
    replication alone; whether the original was itself significant is
    reported separately by :func:`required_relative_sample_size`.
    """
    _check(z_o, c)
    bound = replication_bound(z_o, c, alpha, method)
    return float(special.ndtr(math.sqrt(c) * z_o - bound))


def predictive_power(z_o, c, alpha=0.025, method=Method.SCEPTICAL_CONTROLLED):
    """Success probability averaging over the original estimate's
    uncertainty.  Bounded away from 1 as ``c`` grows."""
    _check(z_o, c)
    bound = replication_bound(z_o, c, alpha, method)
    return float(special.ndtr((math.sqrt(c) * z_o - bound) / math.sqrt(1 + c)))


def power(z_o, c, alpha=0.025, method=Method.SCEPTICAL_CONTROLLED,
          kind=PowerKind.CONDITIONAL):
    if PowerKind(kind) is PowerKind.CONDITIONAL:
        return conditional_power(z_o, c, alpha, method)
    return predictive_power(z_o, c, alpha, method)


def required_relative_sample_size(req, c_range=(C_MIN, C_MAX), tol=None):
    """Smallest relative sample size ``c`` reaching ``req.target_power``.

    Scans ``log10 c`` for the first grid interval where the power crosses the
    target and solves on it with Brent's method.  The range is widened by
    two decades on each side once if the target is not reached.  Raises
    :class:`InfeasibleError` carrying the largest power found otherwise.
    ``tol`` is the :class:`Tolerance` on ``log10 c`` (default ``1e-12``).
    """
    def pw(log_c):
        return power(req.z_o, 10.0**log_c, req.alpha, req.method, req.power_kind)

    lo, hi = (math.log10(v) for v in c_range)
    for attempt in range(2):
        grid = np.linspace(lo, hi, int(round(4 * (hi - lo))) + 1)
        vals = np.array([pw(x) for x in grid])
        above = np.nonzero(vals >= req.target_power)[0]
        if above.size:
            break
        lo, hi = lo - 2, hi + 2
    else:
        raise InfeasibleError(
            f"target power {req.target_power} is not attainable; "
            f"largest power found is {vals.max():.6g}",
            supremum=float(vals.max()),
        )
    k = int(above[0])
    if k == 0:
        log_c = grid[0]
    else:
        log_c = find_root_bracketed(
            lambda x: pw(x) - req.target_power, grid[k - 1], grid[k],
            tol or Tolerance(abs_tol=1e-12),
        )
    c = 10.0**log_c
    gamma = success_level(req.method, req.alpha, c)
    significant = req.z_o >= std_normal_quantile(1 - req.alpha)
    if req.method is Method.SCEPTICAL_CONTROLLED:
        t1e = conditional_t1e_z(req.z_o, c, req.alpha)
    elif req.method is Method.TWO_TRIALS:
        t1e = req.alpha if significant else 0.0
    else:
        t1e = float(special.ndtr(-replication_bound(req.z_o, c, req.alpha, req.method)))
    return DesignResult(
        c_required=c,
        achieved_power=pw(log_c),
        gamma_used=gamma,
        conditional_t1e_at_design=t1e,
        original_significant=bool(significant),
    )


def project_power(q):
    """Probability of joint success before either study is run, both studies
    having the same standardised effect (original z-value ``N(mu, 1)``,
    replication z-value ``N(sqrt(c) mu, 1)``)."""
    mu = q.mu
    root_c = math.sqrt(q.c)
    if q.method is Method.TWO_TRIALS:
        z_a = std_normal_quantile(1 - q.alpha)
        return float(special.ndtr(mu - z_a) * special.ndtr(root_c * mu - z_a))
    gamma = success_level(q.method, q.alpha, q.c)
    return _success_prob(gamma, q.c, mean_o=mu, mean_r=root_c * mu)
