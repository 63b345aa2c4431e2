"""scikit-learn style wrappers for batch use in pipelines.

The rules here have no learnable parameters: ``fit`` only validates the
input shape and records ``n_features_in_``.  Rows of ``X`` are study pairs,
given as ``(z_o, z_r)`` or ``(z_o, z_r, c)`` (``input="z"``) or as one-sided
p-values (``input="p"``); the column holding ``c`` is omitted when the
estimator's ``c`` parameter is set.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .combination import COMBINATION_METHODS, combine
from .core import PHI, _zs2, controlled_pvalue, two_sided_4p
from .design import DesignRequest, PowerKind, required_relative_sample_size
from .exceptions import DomainError, InfeasibleError
from .methods import Method
from .simulation import success_verdict

__all__ = ["ScepticalPValues", "ReplicationSuccess", "ReplicationDesigner"]

OUTPUTS = ("p_s_star", "p_one_sided", "two_sided_4p", "p_s_nominal", "p_s_golden", "z_s2")


class _PairInput:
    """Shared conversion of ``X`` into ``(z_o, z_r, c)`` arrays."""

    def _n_columns(self):
        return 2 if self.c is not None else 3

    def _check_params(self):
        if self.input not in ("z", "p"):
            raise DomainError(f"input must be 'z' or 'p', got {self.input!r}")
        if self.c is not None and not (math.isfinite(self.c) and self.c >= 0):
            raise DomainError(f"c must be finite and non-negative, got {self.c!r}")

    def _validate(self, X, reset):
        self._check_params()
        X = check_array(X, dtype=float, ensure_min_samples=1)
        if X.shape[1] != self._n_columns():
            raise ValueError(f"expected {self._n_columns()} columns, got {X.shape[1]}")
        if reset:
            self.n_features_in_ = X.shape[1]
        if self.input == "p" and np.any((X[:, :2] <= 0) | (X[:, :2] >= 1)):
            raise ValueError("p-values must lie in (0, 1)")
        if self._n_columns() == 3 and np.any(X[:, 2] < 0):
            raise ValueError("c must be non-negative")
        return X

    def _pairs(self, X):
        if self.input == "p":
            z_o, z_r = -special.ndtri(X[:, 0]), -special.ndtri(X[:, 1])
        else:
            z_o, z_r = X[:, 0], X[:, 1]
        c = np.full(len(X), float(self.c)) if self.c is not None else X[:, 2]
        return z_o, z_r, c

    def fit(self, X, y=None):
        self._validate(X, reset=True)
        return self


class ScepticalPValues(_PairInput, TransformerMixin, BaseEstimator):
    """Transform study pairs into sceptical p-values.

    Parameters
    ----------
    output : str or sequence of str
        Columns to return, from ``p_s_star`` (default), ``p_one_sided``,
        ``two_sided_4p``, ``p_s_nominal``, ``p_s_golden`` and ``z_s2``.
    c : float or None
        Fixed variance ratio; ``None`` reads it from the third column.
    input : {"z", "p"}
    """

    def __init__(self, output="p_s_star", c=None, input="z"):
        self.output = output
        self.c = c
        self.input = input

    def _outputs(self):
        outs = (self.output,) if isinstance(self.output, str) else tuple(self.output)
        bad = [o for o in outs if o not in OUTPUTS]
        if bad or not outs:
            raise DomainError(f"unknown output {bad or outs!r}; choose from {OUTPUTS}")
        return outs

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = self._validate(X, reset=False)
        z_o, z_r, c = self._pairs(X)
        positive = (z_o > 0) & (z_r > 0)
        cols = {}
        for name in self._outputs():
            if name == "z_s2":
                cols[name] = _zs2(z_o * z_o, z_r * z_r, c)
            elif name == "two_sided_4p":
                cols[name] = two_sided_4p(z_o, z_r, c)
            elif name == "p_one_sided":
                cols[name] = two_sided_4p(z_o, z_r, c) / 4
            elif name == "p_s_star":
                cols[name] = controlled_pvalue(z_o, z_r, c)
            else:
                scale = math.sqrt(PHI) if name == "p_s_golden" else 1.0
                tail = special.ndtr(-scale * np.sqrt(_zs2(z_o * z_o, z_r * z_r, c)))
                cols[name] = np.where(positive, tail, 1 - tail)
        return np.column_stack([cols[name] for name in self._outputs()])

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self._outputs(), dtype=object)


class ReplicationSuccess(_PairInput, BaseEstimator):
    """Replication-success verdicts of any supported method at level ``alpha``.

    ``predict`` returns 1 for success and 0 otherwise.  For the sceptical
    methods ``decision_function`` returns the method's sceptical p-value
    (controlled, nominal or golden), which is compared with ``alpha``; for
    the combination rules it returns the value compared with ``alpha**2``.
    """

    def __init__(self, method="SCEPTICAL_CONTROLLED", alpha=0.025, c=None, input="z"):
        self.method = method
        self.alpha = alpha
        self.c = c
        self.input = input

    def _check_params(self):
        super()._check_params()
        Method.parse(self.method)
        if not 0 < self.alpha < 0.5:
            raise DomainError(f"alpha must lie in (0, 0.5), got {self.alpha!r}")

    def predict(self, X):
        check_is_fitted(self, "n_features_in_")
        X = self._validate(X, reset=False)
        z_o, z_r, c = self._pairs(X)
        method = Method.parse(self.method)
        out = np.empty(len(X), dtype=int)
        for value in np.unique(c):
            rows = c == value
            out[rows] = success_verdict(method, z_o[rows], z_r[rows], float(value), self.alpha)
        return out

    def decision_function(self, X):
        check_is_fitted(self, "n_features_in_")
        X = self._validate(X, reset=False)
        z_o, z_r, c = self._pairs(X)
        method = Method.parse(self.method)
        if method in COMBINATION_METHODS:
            p_o, p_r = special.ndtr(-z_o), special.ndtr(-z_r)
            return np.array([combine(method, max(a, 1e-300), max(b, 1e-300)).p_overall_scale
                             for a, b in zip(p_o, p_r)])
        name = {Method.SCEPTICAL_NOMINAL: "p_s_nominal",
                Method.SCEPTICAL_GOLDEN: "p_s_golden"}.get(method, "p_s_star")
        return ScepticalPValues(name, c=self.c, input=self.input).fit(X).transform(X)[:, 0]


class ReplicationDesigner(BaseEstimator):
    """Relative sample size ``c`` needed for a replication of each original
    study in ``X`` (one column: ``z_o``, or ``p_o`` with ``input="p"``).

    Unattainable targets give ``nan``.
    """

    def __init__(self, alpha=0.025, target_power=0.8, power_kind="CONDITIONAL",
                 method="SCEPTICAL_CONTROLLED", input="z"):
        self.alpha = alpha
        self.target_power = target_power
        self.power_kind = power_kind
        self.method = method
        self.input = input

    def _validate(self, X, reset):
        if self.input not in ("z", "p"):
            raise DomainError(f"input must be 'z' or 'p', got {self.input!r}")
        PowerKind(self.power_kind)
        X = check_array(X, dtype=float)
        if X.shape[1] != 1:
            raise ValueError(f"expected 1 column, got {X.shape[1]}")
        if reset:
            self.n_features_in_ = 1
        z = -special.ndtri(X[:, 0]) if self.input == "p" else X[:, 0]
        if np.any(~(z > 0)):
            raise ValueError("original studies must have z_o > 0 (p_o < 0.5)")
        return z

    def fit(self, X, y=None):
        self._validate(X, reset=True)
        return self

    def predict(self, X):
        check_is_fitted(self, "n_features_in_")
        out = []
        for z_o in self._validate(X, reset=False):
            req = DesignRequest(float(z_o), self.alpha, self.target_power,
                                PowerKind(self.power_kind), Method.parse(self.method))
            try:
                out.append(required_relative_sample_size(req).c_required)
            except InfeasibleError:
                out.append(np.nan)
        return np.asarray(out)
