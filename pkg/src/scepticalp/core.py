"""The sceptical statistic, its null distribution and the derived p-values.

Notation: ``a = z_o**2`` and ``b = z_r**2``; ``z_s2`` is the smallest root of
``(a / x - 1) (b / x - 1) = c``.  Under the intersection null ``a`` and ``b``
are independent chi-squared(1) variables and ``z_s2`` has distribution
function

    F_c(y) = 1 - (1/pi) int_0^1 exp(-y (1 + sqrt(1 + (c-1) t)) / t) / sqrt(t (1-t)) dt

(the exponent is written without the removable ``(c - 1) / (c - 1)`` factor,
so the same integrand serves every ``c >= 0``).  ``1 - F_c(z_s2)`` is the
two-sided p-value; a quarter of it is the one-sided ``p`` and ``sqrt(p)`` the
controlled sceptical p-value.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import BracketError, DomainError
from .numerics import (
    Tolerance,
    arcsine_rule,
    find_root_bracketed,
    minimize_scalar,
    std_normal_quantile,
    std_normal_sf,
)

__all__ = [
    "PHI",
    "StudyPair",
    "ScepticalResult",
    "Regime",
    "InfimumResult",
    "solve_zs2",
    "null_cdf",
    "null_sf",
    "null_quantile",
    "sceptical_pvalues",
    "p_infinity",
    "p_derivative_wrt_c",
    "infimum_over_c",
    "expected_zs2",
    "two_sided_4p",
    "controlled_pvalue",
    "four_p_infinity",
]

PHI = (math.sqrt(5.0) + 1.0) / 2.0

# c below this is the two-trials limit; within this of 1 the gamma closed form
C_ZERO = 1e-12
C_ONE = 1e-6

_CHUNK = 4096


@dataclass(frozen=True)
class StudyPair:
    """Original and replication z-statistics with variance ratio ``c``.

    ``c = sigma_o**2 / sigma_r**2``, which equals the relative sample size
    ``n_r / n_o`` for a common unit variance.
    """

    z_o: float
    z_r: float
    c: float = 1.0

    def __post_init__(self):
        for name in ("z_o", "z_r", "c"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
        if self.c < 0:
            raise DomainError(f"variance ratio c must be non-negative, got {self.c}")

    @classmethod
    def from_pvalues(cls, p_o, p_r, c=1.0):
        """Build from one-sided p-values ``p_i = 1 - Phi(z_i)``."""
        return cls(
            -float(std_normal_quantile(p_o)), -float(std_normal_quantile(p_r)), c
        )

    @property
    def both_positive(self):
        return self.z_o > 0 and self.z_r > 0

    @property
    def p_o(self):
        return std_normal_sf(self.z_o)

    @property
    def p_r(self):
        return std_normal_sf(self.z_r)

    @property
    def p_max(self):
        return max(self.p_o, self.p_r)

    @property
    def z_a2(self):
        """Arithmetic mean of the squared statistics."""
        return (self.z_o**2 + self.z_r**2) / 2

    @property
    def z_h2(self):
        """Harmonic mean of the squared statistics (0 if either is 0)."""
        a, b = self.z_o**2, self.z_r**2
        if a == 0 or b == 0:
            return 0.0
        return 2 * a * b / (a + b)

    @property
    def z_g2(self):
        """Geometric mean of the squared statistics."""
        return abs(self.z_o * self.z_r)


@dataclass(frozen=True)
class ScepticalResult:
    z_s2: float
    two_sided_4p: float
    p_one_sided: float
    p_s_star: float
    p_s_nominal: float
    p_s_golden: float
    both_positive: bool


class Regime(str, enum.Enum):
    AT_ZERO = "AT_ZERO"
    AT_INFINITY = "AT_INFINITY"
    INTERIOR = "INTERIOR"


@dataclass(frozen=True)
class InfimumResult:
    c_inf: float
    p_inf: float
    regime: Regime


# --------------------------------------------------------------------------
# vectorised kernels
# --------------------------------------------------------------------------

def _zs2(a, b, c):
    """Smallest root for arrays of squared statistics ``a``, ``b``."""
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c)))
    out = np.array(np.minimum(a, b), dtype=float)
    live = (a > 0) & (b > 0) & (c >= C_ZERO)
    if live.any():
        al, bl, cl = a[live], b[live], c[live]
        disc = np.sqrt((al - bl) ** 2 + 4 * cl * al * bl)
        out[live] = 2 * al * bl / ((al + bl) + disc)
    out = np.where((a == 0) | (b == 0), 0.0, out)
    return out


def _quad_tail(y, c):
    """``1 - F_c(y)`` by quadrature for 1-D arrays ``y`` and ``c``."""
    t, omt, w = arcsine_rule()
    out = np.empty(y.shape)
    for lo in range(0, y.size, _CHUNK):
        ys = y[lo:lo + _CHUNK, None]
        cs = c[lo:lo + _CHUNK, None]
        s = np.sqrt(cs * t + omt)
        out[lo:lo + _CHUNK] = np.exp(-ys * (1 + s) / t) @ w
    return out / math.pi


def _tail(y, c):
    """``1 - F_c(y)`` (the two-sided p-value at ``z_s2 = y``), vectorised."""
    y, c = np.broadcast_arrays(np.asarray(y, dtype=float), np.asarray(c, dtype=float))
    shape = y.shape
    y, c = y.ravel(), c.ravel()
    out = np.ones(y.shape)
    pos = y > 0
    zero = pos & (c < C_ZERO)
    one = pos & (np.abs(c - 1) < C_ONE)
    gen = pos & ~zero & ~one
    if zero.any():
        out[zero] = 4 * std_normal_sf(np.sqrt(y[zero])) ** 2
    if one.any():
        out[one] = 2 * std_normal_sf(2 * np.sqrt(y[one]))
    if gen.any():
        out[gen] = _quad_tail(y[gen], c[gen])
    return np.clip(out, 0.0, 1.0).reshape(shape)


def _check_c(c, strict=False):
    if not math.isfinite(c) or c < 0 or (strict and c == 0):
        bound = "positive" if strict else "non-negative"
        raise DomainError(f"variance ratio c must be finite and {bound}, got {c!r}")


# --------------------------------------------------------------------------
# public operations
# --------------------------------------------------------------------------

def solve_zs2(pair):
    """Smallest positive root ``z_s2`` of ``(z_o^2/x - 1)(z_r^2/x - 1) = c``.

    Equals ``min(z_o^2, z_r^2)`` at ``c = 0`` and half the harmonic mean at
    ``c = 1``; 0 when either statistic is 0.  Evaluated in the
    cancellation-free form ``2ab / (a + b + sqrt((a-b)^2 + 4abc))``.
    """
    return float(_zs2(pair.z_o**2, pair.z_r**2, pair.c))


def null_sf(y, c):
    """``1 - F_c(y)``, evaluated directly so tiny tails keep relative accuracy."""
    _check_c(float(c))
    arr = np.asarray(y, dtype=float)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError(f"y must be finite and non-negative, got {y!r}")
    out = _tail(arr, c)
    return float(out) if np.ndim(y) == 0 else out


def null_cdf(y, c):
    """Null distribution function ``F_c(y)`` of the sceptical statistic.

    Closed forms at ``c = 0`` (``1 - 4 [1 - Phi(sqrt y)]^2``, the minimum of
    two chi-squared(1)) and ``c = 1`` (gamma with shape 1/2 and rate 2,
    i.e. ``2 Phi(2 sqrt y) - 1``), quadrature otherwise.  Accepts an array
    of ``y``.
    """
    tail = null_sf(y, c)
    return 1.0 - tail


def null_quantile(q, c, tol=Tolerance(abs_tol=1e-13, max_iter=200)):
    """``y`` with ``F_c(y) = q``, by Brent's method on ``[0, 100]``."""
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q!r}")
    _check_c(float(c))
    target = 1.0 - q
    try:
        # work on the log tail so quantiles near 1 stay well conditioned
        return find_root_bracketed(
            lambda y: math.log(max(_tail(y, c)[()], 1e-300)) - math.log(target),
            0.0, 100.0, tol,
        )
    except BracketError as exc:  # pragma: no cover - only for q within 1e-40 of 1
        raise BracketError(f"quantile {q} of F_{c} lies beyond 100") from exc


def sceptical_pvalues(pair):
    """All sceptical p-values of a study pair.

    The two-sided value ``1 - F_c(z_s2)`` has exact linear Type-I error
    control; its quarter ``p`` is the one-sided p-value and ``p_s_star =
    sqrt(p)`` (``1 - sqrt(p)`` if the estimates are not both positive) has
    exact squared control.  The nominal and golden p-values transform
    ``z_s = sqrt(z_s2)`` directly.
    """
    z_s2 = solve_zs2(pair)
    four_p = float(_tail(z_s2, pair.c))
    p = four_p / 4
    z_s = math.sqrt(z_s2)
    nominal = std_normal_sf(z_s)
    golden = std_normal_sf(math.sqrt(PHI) * z_s)
    direction = pair.both_positive
    if direction:
        star = math.sqrt(p)
    else:
        star = 1 - math.sqrt(p)
        nominal, golden = 1 - nominal, 1 - golden
    return ScepticalResult(
        z_s2=z_s2, two_sided_4p=four_p, p_one_sided=p, p_s_star=star,
        p_s_nominal=nominal, p_s_golden=golden, both_positive=direction,
    )


def _four_p_infinity(z_g2):
    t, _, w = arcsine_rule()
    z_g2 = np.atleast_1d(np.asarray(z_g2, dtype=float))
    out = np.empty(z_g2.shape)
    st = np.sqrt(t)
    for lo in range(0, z_g2.size, _CHUNK):
        out[lo:lo + _CHUNK] = np.exp(-z_g2[lo:lo + _CHUNK, None] / st) @ w
    return np.clip(out / math.pi, 0.0, 1.0)


def p_infinity(pair, controlled=False):
    """Limit of the one-sided p-value as ``c -> infinity`` (``c`` is ignored).

    Depends on the statistics only through ``|z_o z_r|``.  With
    ``controlled=True`` the square-root transform (and the direction
    complement) is applied, giving the limit of ``p_s_star``.
    """
    p = float(_four_p_infinity(pair.z_g2)[0]) / 4
    if not controlled:
        return p
    return math.sqrt(p) if pair.both_positive else 1 - math.sqrt(p)


def p_derivative_wrt_c(pair):
    """Derivative of the one-sided ``p`` with respect to ``c``.

    Differentiates under the integral in the parametrisation
    ``H(u, t) = B (sqrt(1 + u t) + 1) / (t (sqrt(1 + u B) + 1))`` with
    ``u = c - 1`` and ``B = z_H^2 / z_A^2``, so that
    ``p = (1 / 4 pi) int exp(-z_A^2 H) / sqrt(t (1-t)) dt``.  At ``c = 1``
    ``dH/du = B (t - B) / (4 t)``.  The controlled p-value follows by the
    chain rule, ``d p_s_star / dc = dp/dc / (2 p_s_star)``.
    """
    _check_c(pair.c, strict=True)
    if pair.z_o == 0 or pair.z_r == 0:
        raise DomainError("derivative requires non-zero test statistics")
    t, omt, w = arcsine_rule()
    a, b = pair.z_o**2, pair.z_r**2
    z_a2 = (a + b) / 2
    big_b = 4 * a * b / (a + b) ** 2
    u = pair.c - 1
    if abs(u) < C_ONE:
        h = big_b / t
        dh = big_b * (t - big_b) / (4 * t)
    else:
        s_t = np.sqrt(pair.c * t + omt)
        s_b = math.sqrt(1 + u * big_b)
        h = big_b * (s_t + 1) / (t * (s_b + 1))
        dh = (big_b / t) * (
            t * (s_b + 1) / (2 * s_t) - big_b * (s_t + 1) / (2 * s_b)
        ) / (s_b + 1) ** 2
    return float(-(z_a2 / (4 * math.pi)) * (np.exp(-z_a2 * h) * dh) @ w)


def _p_star_over_c(pair, c):
    c = np.asarray(c, dtype=float)
    four_p = _tail(_zs2(pair.z_o**2, pair.z_r**2, c), c)
    return np.sqrt(four_p / 4)


def infimum_over_c(z_o, z_r, lo=1e-8, hi=1e8):
    """Infimum of ``p_s_star`` over the variance ratio.

    Scans ``log10 c`` on ``[log10 lo, log10 hi]``, refines the best grid
    point with a bounded scalar search and compares with both limits:
    ``p_max`` as ``c -> 0`` and the controlled ``p_infinity`` as
    ``c -> infinity``.
    """
    pair = StudyPair(z_o, z_r, 1.0)
    if not pair.both_positive:
        raise DomainError("infimum over c requires both estimates to be positive")
    at_zero = pair.p_max
    at_inf = p_infinity(pair, controlled=True)

    x = np.linspace(math.log10(lo), math.log10(hi), 161)
    vals = _p_star_over_c(pair, 10.0**x)
    k = int(np.argmin(vals))
    left, right = x[max(k - 1, 0)], x[min(k + 1, x.size - 1)]
    x_min, v_min = minimize_scalar(
        lambda s: float(_p_star_over_c(pair, 10.0**s)), left, right,
        Tolerance(abs_tol=1e-8),
    )
    if at_zero <= v_min and at_zero <= at_inf:
        return InfimumResult(0.0, at_zero, Regime.AT_ZERO)
    if at_inf <= v_min:
        return InfimumResult(math.inf, at_inf, Regime.AT_INFINITY)
    return InfimumResult(10.0**x_min, v_min, Regime.INTERIOR)


def expected_zs2(c):
    """Null expectation of ``z_s2``.

    ``1 - 2/pi`` at ``c = 0``, ``1/4`` at ``c = 1`` and otherwise
    ``(1/pi) int t / (1 + sqrt(1 + (c-1) t)) / sqrt(t(1-t)) dt``.
    """
    _check_c(float(c))
    if c < C_ZERO:
        return 1 - 2 / math.pi
    if abs(c - 1) < C_ONE:
        return 0.25
    t, omt, w = arcsine_rule()
    return float((t / (1 + np.sqrt(c * t + omt))) @ w / math.pi)


# --------------------------------------------------------------------------
# vectorised forms for simulation and batch use
# --------------------------------------------------------------------------

def two_sided_4p(z_o, z_r, c):
    """``1 - F_c(z_s2)`` for arrays of statistics (broadcast together)."""
    z_o, z_r, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (z_o, z_r, c)))
    if np.any(c < 0) or not np.all(np.isfinite(c)):
        raise DomainError("variance ratio c must be finite and non-negative")
    return _tail(_zs2(z_o * z_o, z_r * z_r, c), c)


def controlled_pvalue(z_o, z_r, c):
    """Array version of ``p_s_star``."""
    z_o, z_r = np.asarray(z_o, dtype=float), np.asarray(z_r, dtype=float)
    root = np.sqrt(two_sided_4p(z_o, z_r, c) / 4)
    return np.where((z_o > 0) & (z_r > 0), root, 1 - root)


def four_p_infinity(z_o, z_r):
    """Array version of the two-sided limiting p-value ``4 p_inf``."""
    z_o, z_r = np.broadcast_arrays(np.asarray(z_o, dtype=float), np.asarray(z_r, dtype=float))
    return _four_p_infinity(np.abs(z_o * z_r).ravel()).reshape(z_o.shape)
