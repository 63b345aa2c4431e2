"""Brute-force Monte Carlo oracle for error rates, power and null laws.

Study pairs are drawn from seeded :class:`~scepticalp.numerics.RngStream`
objects in fixed-size chunks, so a result depends only on
``(seed, stream_id, n_rep)`` and never on how the work was split.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import special, stats

from .calibration import golden_level
from .core import _zs2
from .exceptions import DomainError
from .methods import Method, success_level
from .numerics import RngStream

__all__ = [
    "Truth",
    "SimConfig",
    "SimResult",
    "success_verdict",
    "simulate_rate",
    "simulate_pooled",
    "simulate_conditional_success",
    "draw_null_pairs",
    "null_statistic_samples",
    "ks_uniformity",
    "to_json_line",
]

CHUNK = 1 << 20
MIN_REP = 10_000
_CHI2_4 = stats.chi2(4)


class Truth(str, enum.Enum):
    INTERSECTION_NULL = "INTERSECTION_NULL"
    UNION_NULL_ORIGINAL = "UNION_NULL_ORIGINAL"
    UNION_NULL_REPLICATION = "UNION_NULL_REPLICATION"
    EQUAL_EFFECTS = "EQUAL_EFFECTS"

    def means(self, mu, c):
        """Means of ``(z_o, z_r)`` under this truth."""
        shifted = math.sqrt(c) * mu
        return {
            Truth.INTERSECTION_NULL: (0.0, 0.0),
            Truth.UNION_NULL_ORIGINAL: (0.0, shifted),
            Truth.UNION_NULL_REPLICATION: (mu, 0.0),
            Truth.EQUAL_EFFECTS: (mu, shifted),
        }[self]


@dataclass(frozen=True)
class SimConfig:
    truth: Truth = Truth.INTERSECTION_NULL
    mu: float = 0.0
    c: float = 1.0
    alpha: float = 0.025
    method: Method = Method.SCEPTICAL_CONTROLLED
    n_rep: int = 1_000_000
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "truth", Truth(self.truth))
        object.__setattr__(self, "method", Method.parse(self.method))
        if not (math.isfinite(self.mu) and self.mu >= 0):
            raise DomainError(f"mu must be finite and non-negative, got {self.mu}")
        if self.truth is Truth.INTERSECTION_NULL and self.mu != 0:
            raise DomainError("mu must be 0 under the intersection null")
        if not (math.isfinite(self.c) and self.c >= 0):
            raise DomainError(f"c must be finite and non-negative, got {self.c}")
        if not 0 < self.alpha < 0.5:
            raise DomainError(f"alpha must lie in (0, 0.5), got {self.alpha}")
        if int(self.n_rep) != self.n_rep or self.n_rep < MIN_REP:
            raise DomainError(f"n_rep must be an integer >= {MIN_REP}, got {self.n_rep}")

    def rng(self):
        return RngStream(self.seed, self.stream_id)


@dataclass(frozen=True)
class SimResult:
    estimate: float
    std_error: float
    ci95: tuple
    n_rep: int
    seed: int

    @classmethod
    def from_count(cls, hits, n_rep, seed):
        est = hits / n_rep
        se = math.sqrt(est * (1 - est) / n_rep)
        half = 1.959963984540054 * se
        return cls(est, se, (max(0.0, est - half), min(1.0, est + half)), int(n_rep), int(seed))

    def within(self, target, k=3.0):
        """``|estimate - target| <= k * std_error`` (an exact hit counts
        when the standard error is 0)."""
        return abs(self.estimate - target) <= k * self.std_error


def success_verdict(method, z_o, z_r, c, alpha):
    """Vectorised success indicator of ``method`` at level ``alpha``.

    Sceptical methods are evaluated through the success criterion at their
    level, which is equivalent to comparing the p-value with ``alpha``.
    """
    method = Method.parse(method)
    z_o = np.asarray(z_o, dtype=float)
    z_r = np.asarray(z_r, dtype=float)
    if method.is_sceptical or method is Method.TWO_TRIALS:
        if method is Method.SCEPTICAL_GOLDEN:
            gamma = golden_level(alpha)
        else:
            gamma = success_level(method, alpha, c)
        z_g = special.ndtri(1 - gamma)
        if method is Method.TWO_TRIALS or c == 0:
            return (z_o > z_g) & (z_r > z_g)
        g2 = z_g * z_g
        with np.errstate(invalid="ignore"):
            crit = (z_o * z_o / g2 - 1) * (z_r * z_r / g2 - 1)
        return (z_o > z_g) & (z_r > z_g) & (crit >= c)
    a2 = alpha * alpha
    if method is Method.FISHER:
        return -2 * (special.log_ndtr(-z_o) + special.log_ndtr(-z_r)) >= _CHI2_4.isf(a2)
    if method is Method.STOUFFER:
        return (z_o + z_r) / math.sqrt(2) >= special.ndtri(1 - a2)
    if method is Method.PEARSON:
        return -2 * (special.log_ndtr(z_o) + special.log_ndtr(z_r)) <= _CHI2_4.ppf(a2)
    raise DomainError(f"unsupported method {method.value}")  # pragma: no cover


def _count(config, rng, n):
    mean_o, mean_r = config.truth.means(config.mu, config.c)
    hits = 0
    for lo in range(0, n, CHUNK):
        m = min(CHUNK, n - lo)
        z_o = rng.standard_normal(m) + mean_o
        z_r = rng.standard_normal(m) + mean_r
        hits += int(np.count_nonzero(success_verdict(config.method, z_o, z_r, config.c, config.alpha)))
    return hits


def simulate_rate(config):
    """Success frequency of ``config.method`` under ``config.truth``."""
    hits = _count(config, config.rng(), config.n_rep)
    return SimResult.from_count(hits, config.n_rep, config.seed)


def simulate_pooled(config, n_streams):
    """Split ``config.n_rep`` over ``n_streams`` disjoint streams
    (ids ``stream_id, stream_id + 1, ...``) and pool the counts."""
    if int(n_streams) < 1:
        raise DomainError(f"n_streams must be positive, got {n_streams}")
    sizes = [config.n_rep // n_streams + (k < config.n_rep % n_streams) for k in range(n_streams)]
    hits = sum(_count(config, RngStream(config.seed, config.stream_id + k), size)
               for k, size in enumerate(sizes))
    return SimResult.from_count(hits, config.n_rep, config.seed)


def simulate_conditional_success(z_o, c, alpha=0.025, method=Method.SCEPTICAL_CONTROLLED,
                                 predictive=False, n_rep=1_000_000, seed=0, stream_id=0):
    """Success frequency for a fixed original ``z_o``.

    The replication is drawn with mean ``sqrt(c) * theta``, where ``theta``
    is ``z_o`` (conditional) or, with ``predictive=True``, a fresh draw from
    ``N(z_o, 1)`` for each replicate.
    """
    if n_rep < MIN_REP:
        raise DomainError(f"n_rep must be >= {MIN_REP}, got {n_rep}")
    rng = RngStream(seed, stream_id)
    root_c = math.sqrt(c)
    hits = 0
    for lo in range(0, n_rep, CHUNK):
        m = min(CHUNK, n_rep - lo)
        theta = z_o + rng.standard_normal(m) if predictive else z_o
        z_r = root_c * theta + rng.standard_normal(m)
        hits += int(np.count_nonzero(success_verdict(method, np.full(m, z_o), z_r, c, alpha)))
    return SimResult.from_count(hits, n_rep, seed)


def draw_null_pairs(n, seed=0, stream_id=0):
    """``n`` independent standard-normal pairs ``(z_o, z_r)``."""
    rng = RngStream(seed, stream_id)
    z_o = np.empty(n)
    z_r = np.empty(n)
    for lo in range(0, n, CHUNK):
        m = min(CHUNK, n - lo)
        z_o[lo:lo + m] = rng.standard_normal(m)
        z_r[lo:lo + m] = rng.standard_normal(m)
    return z_o, z_r


def null_statistic_samples(c, n, seed=0, stream_id=0):
    """Draws of ``z_s2`` under the intersection null."""
    z_o, z_r = draw_null_pairs(n, seed, stream_id)
    return _zs2(z_o * z_o, z_r * z_r, c)


def ks_uniformity(samples):
    """One-sample Kolmogorov-Smirnov test against the uniform law on [0, 1]."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 100:
        raise DomainError(f"need at least 100 samples, got {x.size}")
    if np.any((x < 0) | (x > 1)) or not np.all(np.isfinite(x)):
        raise DomainError("samples must lie in [0, 1]")
    res = stats.kstest(x, "uniform", method="asymp")
    return float(res.statistic), float(res.pvalue)


def to_json_line(result, config=None):
    """One JSON object per result, with the configuration when given."""
    row = asdict(result)
    row["ci95"] = list(result.ci95)
    if config is not None:
        cfg = asdict(config)
        cfg["truth"] = config.truth.value
        cfg["method"] = config.method.value
        row = {**cfg, **row}
    return json.dumps(row, sort_keys=True)
