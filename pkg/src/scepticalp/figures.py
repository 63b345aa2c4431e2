"""Plot-ready data tables for the standard figures of the method.

Each figure is emitted as rows ``(figure, series, x, y)`` on fixed grids, so
two runs with the same parameters give identical output.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import combination
from .core import StudyPair, expected_zs2, null_cdf, sceptical_pvalues
from .design import (
    DesignRequest,
    ProjectPowerQuery,
    conditional_power,
    project_power,
    required_relative_sample_size,
)
from .exceptions import DomainError, InfeasibleError
from .methods import Method
from .numerics import std_normal_quantile

__all__ = ["Figure", "FigureRow", "emit_figure_data", "DEFAULTS"]


class Figure(str, enum.Enum):
    F1_CDF = "F1_CDF"
    F2_PS_VS_C = "F2_PS_VS_C"
    F3_REGIONS = "F3_REGIONS"
    F4_POWER_RATIOS = "F4_POWER_RATIOS"
    F5_PROJECT_POWER = "F5_PROJECT_POWER"
    F6_COND_T1E = "F6_COND_T1E"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().upper()
        for member in cls:
            if key in (member.value, member.value.split("_")[0]):
                return member
        raise DomainError(f"unknown figure {value!r}")


@dataclass(frozen=True)
class FigureRow:
    figure: str
    series: str
    x: float
    y: float


DEFAULTS = {
    "alpha": 0.025,
    "c_values": (0.0, 0.5, 1.0, 2.0, 10.0),
    "y_max": 6.0,
    "n_grid": 61,
    "pairs": ((0.02, 0.02), (0.027, 0.0001), (0.027, 0.02), (0.027, 0.006), (0.015, 0.027)),
    "original_powers": (0.8, 0.9),
    "design_powers": (0.8, 0.9, 0.95),
}


def _grid(lo, hi, n, log=False):
    if log:
        return np.exp(np.linspace(np.log(lo), np.log(hi), n))
    return np.linspace(lo, hi, n)


def _fmt(x):
    return f"{x:g}"


def _f1(p):
    n = p["n_grid"]
    for c in p["c_values"]:
        for y in _grid(0.0, p["y_max"], n):
            yield f"cdf c={_fmt(c)}", y, null_cdf(float(y), c)
    for c in sorted({0.0, 1.0, *_grid(0.0, 10.0, 41)}):
        yield "expected", c, expected_zs2(float(c))


def _f2(p):
    cs = _grid(1e-2, 1e2, p["n_grid"], log=True)
    for p_o, p_r in p["pairs"]:
        tag = f"p_o={_fmt(p_o)} p_r={_fmt(p_r)}"
        for c in cs:
            yield tag, c, sceptical_pvalues(StudyPair.from_pvalues(p_o, p_r, float(c))).p_s_star
        yield f"p_max {tag}", 0.0, max(p_o, p_r)


def _f3(p):
    alpha = p["alpha"]
    grid = _grid(1e-5, 0.1, p["n_grid"] * 4, log=True)
    for method in (Method.SCEPTICAL_CONTROLLED, *combination.COMBINATION_METHODS):
        for c in ((1.0,) if method is not Method.SCEPTICAL_CONTROLLED else (0.5, 1.0, 2.0)):
            tag = method.value if method is not Method.SCEPTICAL_CONTROLLED else f"{method.value} c={_fmt(c)}"
            for p_o in grid:
                yield tag, p_o, combination.region_boundary(method, float(p_o), alpha, c)
            yield f"area {tag}", 0.0, combination.region_area(method, alpha, c)


def _f4(p):
    alpha = p["alpha"]
    grid = _grid(1e-4, alpha, p["n_grid"], log=True)
    for c in (0.5, 1.0, 2.0):
        for p_o in grid:
            z_o = std_normal_quantile(1 - p_o)
            num = conditional_power(z_o, c, alpha)
            den = conditional_power(z_o, c, alpha, Method.TWO_TRIALS)
            yield f"power ratio c={_fmt(c)}", p_o, num / den
    for power in p["design_powers"]:
        for p_o in grid:
            z_o = std_normal_quantile(1 - p_o)
            s = required_relative_sample_size(DesignRequest(z_o, alpha, power)).c_required
            t = required_relative_sample_size(
                DesignRequest(z_o, alpha, power, method=Method.TWO_TRIALS)).c_required
            yield f"sample size ratio power={_fmt(power)}", p_o, s / t


def _f5(p):
    alpha = p["alpha"]
    cs = sorted({2.0, *_grid(0.25, 32.0, p["n_grid"], log=True)})
    for power in p["original_powers"]:
        for method in (Method.SCEPTICAL_CONTROLLED, Method.TWO_TRIALS):
            for c in cs:
                yield (f"{method.value} power={_fmt(power)}", c,
                       project_power(ProjectPowerQuery(alpha, power, float(c), method)))


def _f6(p):
    alpha = p["alpha"]
    grid = _grid(1e-5, 0.06, p["n_grid"] * 2, log=True)
    for power in p["design_powers"]:
        for p_o in grid:
            z_o = std_normal_quantile(1 - p_o)
            try:
                res = required_relative_sample_size(DesignRequest(z_o, alpha, power))
            except InfeasibleError:
                continue
            yield f"conditional t1e power={_fmt(power)}", p_o, res.conditional_t1e_at_design
            yield f"c power={_fmt(power)}", p_o, res.c_required
    yield "two-trials", 0.0, alpha


_BUILDERS = {
    Figure.F1_CDF: _f1,
    Figure.F2_PS_VS_C: _f2,
    Figure.F3_REGIONS: _f3,
    Figure.F4_POWER_RATIOS: _f4,
    Figure.F5_PROJECT_POWER: _f5,
    Figure.F6_COND_T1E: _f6,
}


def emit_figure_data(figure, params=None):
    """Rows for ``figure``; ``params`` overrides entries of :data:`DEFAULTS`."""
    figure = Figure.parse(figure)
    p = dict(DEFAULTS)
    for key, value in (params or {}).items():
        if key not in DEFAULTS:
            raise DomainError(f"unknown figure parameter {key!r}")
        p[key] = value
    if not 0 < p["alpha"] < 0.5:
        raise DomainError(f"alpha must lie in (0, 0.5), got {p['alpha']}")
    if int(p["n_grid"]) < 2:
        raise DomainError("n_grid must be at least 2")
    return [FigureRow(figure.value, s, float(x), float(y)) for s, x, y in _BUILDERS[figure](p)]
