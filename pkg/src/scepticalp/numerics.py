"""Numerical kernel: normal distribution, arcsine-weighted quadrature,
bracketed root finding, bounded scalar minimisation and seeded streams.

The distribution functions and the root finder are thin, validated wrappers
around :mod:`scipy.special` and :mod:`scipy.optimize`; the quadrature rule is
built here because its change of variables is what makes the null
distribution of the sceptical statistic cheap to evaluate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize, special

from .exceptions import BracketError, ConvergenceError, DomainError, EvaluationError

__all__ = [
    "Tolerance",
    "RngStream",
    "std_normal_cdf",
    "std_normal_sf",
    "std_normal_pdf",
    "std_normal_quantile",
    "arcsine_rule",
    "integrate_arcsine_weighted",
    "find_root_bracketed",
    "minimize_scalar",
]

GRADED_PANELS = 32
PANEL_ORDER = 10


@dataclass(frozen=True)
class Tolerance:
    """Stopping rule shared by the iterative solvers."""

    abs_tol: float = 1e-10
    rel_tol: float = 0.0
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.rel_tol >= 0:
            raise DomainError(f"rel_tol must be non-negative, got {self.rel_tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise DomainError(f"max_iter must be a positive integer, got {self.max_iter}")


DEFAULT_TOL = Tolerance()


# --------------------------------------------------------------------------
# Normal distribution
# --------------------------------------------------------------------------

def _check_finite(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return arr


def _scalar_or_array(out, like):
    return float(out) if np.ndim(like) == 0 else out


def std_normal_cdf(x):
    """Standard normal CDF, computed from the complementary error function."""
    arr = _check_finite(x)
    return _scalar_or_array(special.ndtr(arr), x)


def std_normal_sf(x):
    """Upper tail ``1 - Phi(x)`` without cancellation for large ``x``."""
    arr = _check_finite(x)
    return _scalar_or_array(special.ndtr(-arr), x)


def std_normal_pdf(x):
    arr = np.asarray(x, dtype=float)
    return _scalar_or_array(np.exp(-0.5 * arr * arr) / math.sqrt(2 * math.pi), x)


def std_normal_quantile(p):
    """Inverse of :func:`std_normal_cdf` on the open unit interval."""
    arr = np.asarray(p, dtype=float)
    if not np.all((arr > 0) & (arr < 1)):
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    return _scalar_or_array(special.ndtri(arr), p)


# --------------------------------------------------------------------------
# Quadrature for integrals against 1/sqrt(t(1-t))
# --------------------------------------------------------------------------

@lru_cache(maxsize=8)
def arcsine_rule(n_panels=GRADED_PANELS, order=PANEL_ORDER):
    """Nodes ``t`` and weights ``w`` with ``sum(w*f(t))`` approximating
    ``int_0^1 f(t) / sqrt(t(1-t)) dt``.

    Uses ``t = sin(u)**2`` which turns the integral into
    ``2 * int_0^{pi/2} f(sin(u)**2) du`` with no endpoint singularity.  Each
    half of the ``u`` range is split into ``n_panels`` panels that halve
    towards its outer end, with Gauss-Legendre of fixed order on each panel:
    the null-distribution integrands have a boundary layer of width ``~y``
    at ``t = 0`` and, for small variance ratios, a kink of width ``~sqrt(c)``
    at ``t = 1``.

    Returns ``(t, 1 - t, w)``; ``1 - t`` is computed as ``cos(u)**2`` so
    callers keep full precision near ``t = 1``.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    quarter = math.pi / 4
    left = [0.0] + [quarter * 2.0**-k for k in range(n_panels - 1, -1, -1)]
    edges = left + [math.pi / 2 - e for e in reversed(left[:-1])]
    us, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        half = (b - a) / 2
        us.append(a + (x + 1) * half)
        ws.append(2 * w * half)
    u = np.concatenate(us)
    weights = np.concatenate(ws)
    t = np.sin(u) ** 2
    one_minus_t = np.cos(u) ** 2
    for arr in (t, one_minus_t, weights):
        arr.setflags(write=False)
    return t, one_minus_t, weights


def integrate_arcsine_weighted(f):
    """Integrate ``f(t) / sqrt(t (1 - t))`` over ``(0, 1)``.

    ``f`` is called once with the full array of nodes and should return an
    array of the same length; scalar-only callables are evaluated node by
    node instead.
    """
    t, _, w = arcsine_rule()
    try:
        vals = np.asarray(f(t), dtype=float)
        if vals.shape != t.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([float(f(ti)) for ti in t])
    bad = ~np.isfinite(vals)
    if bad.any():
        node = float(t[np.argmax(bad)])
        raise EvaluationError(f"integrand is not finite at t={node!r}", node=node)
    return float(vals @ w)


# --------------------------------------------------------------------------
# Root finding and minimisation
# --------------------------------------------------------------------------

def find_root_bracketed(f, lo, hi, tol=DEFAULT_TOL):
    """Root of ``f`` on ``[lo, hi]`` by Brent's method.

    Raises :class:`BracketError` when ``f(lo)`` and ``f(hi)`` share a sign.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return float(lo)
    if fhi == 0:
        return float(hi)
    if not (np.isfinite(flo) and np.isfinite(fhi)):
        raise BracketError(f"non-finite function value on bracket [{lo}, {hi}]")
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(
            f"no sign change on [{lo}, {hi}]: f(lo)={flo:.6g}, f(hi)={fhi:.6g}"
        )
    rtol = max(tol.rel_tol, 4 * np.finfo(float).eps)
    try:
        root, info = optimize.brentq(
            f, lo, hi, xtol=tol.abs_tol, rtol=rtol, maxiter=tol.max_iter,
            full_output=True, disp=False,
        )
    except RuntimeError as exc:  # pragma: no cover - scipy raises only with disp
        raise ConvergenceError(str(exc)) from exc
    if not info.converged:
        raise ConvergenceError(
            f"root finder did not converge in {tol.max_iter} iterations "
            f"on [{lo}, {hi}]"
        )
    return float(root)


def minimize_scalar(f, lo, hi, tol=Tolerance(abs_tol=1e-8)):
    """Minimise ``f`` on ``[lo, hi]``; returns ``(x_min, f_min)``.

    Bounded Brent search (golden section with parabolic steps).  The bracket
    endpoints are also evaluated since the bounded search never visits them.
    """
    if not lo < hi:
        raise DomainError(f"empty bracket [{lo}, {hi}]")
    res = optimize.minimize_scalar(
        f, bounds=(lo, hi), method="bounded",
        options={"xatol": tol.abs_tol, "maxiter": tol.max_iter},
    )
    if res.status != 0:
        raise ConvergenceError(f"minimiser did not converge: {res.message}")
    candidates = [(float(res.fun), float(res.x)), (float(f(lo)), float(lo)),
                  (float(f(hi)), float(hi))]
    f_min, x_min = min(candidates)
    return x_min, f_min


# --------------------------------------------------------------------------
# Random streams
# --------------------------------------------------------------------------

class RngStream:
    """Reproducible random stream identified by ``(seed, stream_id)``.

    Backed by the counter-based Philox generator; distinct ``stream_id``
    values give independent streams of the same seed.  Normal variates are
    produced by inverting the normal CDF on open-interval uniforms.
    A stream is stateful and should have a single owner.
    """

    def __init__(self, seed=0, stream_id=0):
        if not 0 <= int(seed) < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if int(stream_id) < 0:
            raise DomainError(f"stream_id must be non-negative, got {stream_id}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self._gen = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def uniform(self, size):
        """Uniforms on the open interval ``(0, 1)``."""
        # random() yields multiples of 2**-53 in [0, 1); shift to the midpoint
        return self._gen.random(size) + 2.0**-54

    def standard_normal(self, size):
        return special.ndtri(self.uniform(size))

    def spawn(self, stream_id):
        """Fresh stream with the same seed and a different id."""
        return RngStream(self.seed, stream_id)
