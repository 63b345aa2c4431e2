import numpy as np
import pytest
from scipy import special
from sklearn.base import clone
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer
from sklearn.exceptions import NotFittedError

from scepticalp.core import StudyPair, sceptical_pvalues
from scepticalp.design import DesignRequest, required_relative_sample_size
from scepticalp.estimators import ReplicationDesigner, ReplicationSuccess, ScepticalPValues

X3 = np.array([[2.5, 2.0, 3.2], [1.0, -0.5, 1.0], [3.1, 2.9, 0.5]])


def test_transform_matches_scalar_api():
    est = ScepticalPValues(output=["p_s_star", "z_s2", "p_s_golden"]).fit(X3)
    out = est.transform(X3)
    for row, got in zip(X3, out):
        res = sceptical_pvalues(StudyPair(*row))
        np.testing.assert_allclose(got, [res.p_s_star, res.z_s2, res.p_s_golden], rtol=1e-12)
    assert list(est.get_feature_names_out()) == ["p_s_star", "z_s2", "p_s_golden"]


def test_fixed_c_and_p_input():
    P = np.array([[0.027, 0.006], [0.015, 0.027]])
    out = ScepticalPValues(c=2.0, input="p").fit_transform(P)[:, 0]
    ref = [sceptical_pvalues(StudyPair.from_pvalues(a, b, 2.0)).p_s_star for a, b in P]
    np.testing.assert_allclose(out, ref, rtol=1e-12)


def test_get_params_and_clone():
    est = ReplicationSuccess(method="golden", alpha=0.05, c=2.0)
    assert est.get_params() == {"method": "golden", "alpha": 0.05, "c": 2.0, "input": "z"}
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est


def test_not_fitted():
    with pytest.raises(NotFittedError):
        ScepticalPValues().transform(X3)


@pytest.mark.parametrize("est, X", [
    (ScepticalPValues(), X3[:, :2]),
    (ScepticalPValues(c=1.0), X3),
    (ScepticalPValues(output="nope"), X3),
    (ScepticalPValues(input="q"), X3),
    (ReplicationSuccess(alpha=0.7), X3),
    (ReplicationSuccess(method="bogus"), X3),
])
def test_invalid(est, X):
    with pytest.raises(ValueError):
        est.fit_transform(X) if hasattr(est, "transform") else est.fit(X).predict(X)


@pytest.mark.parametrize("method", ["controlled", "nominal", "golden", "2tr", "FISHER", "STOUFFER", "PEARSON"])
def test_predict_agrees_with_decision_function(method):
    rng = np.random.default_rng(4)
    X = np.column_stack([rng.normal(2.5, 1, 300), rng.normal(2.5, 1, 300), rng.uniform(0.2, 4, 300)])
    est = ReplicationSuccess(method=method).fit(X)
    score = est.decision_function(X)
    level = 0.025 if method in ("controlled", "nominal", "golden") else 0.025**2
    clear = np.abs(score - level) > 1e-9 * level
    np.testing.assert_array_equal(est.predict(X)[clear], (score <= level)[clear].astype(int))


def test_pipeline_from_effects():
    # (theta_o, se_o, theta_r, se_r) -> (z_o, z_r, c) -> verdict
    to_pairs = FunctionTransformer(
        lambda A: np.column_stack([A[:, 0] / A[:, 1], A[:, 2] / A[:, 3], (A[:, 1] / A[:, 3]) ** 2]))
    pipe = make_pipeline(to_pairs, ReplicationSuccess())
    A = np.array([[0.32, 0.1, 0.23, 0.0845], [0.1, 0.1, 0.05, 0.1]])
    assert pipe.fit(A).predict(A).tolist() == [1, 0]


def test_designer_matches_design_api():
    X = np.array([[3.0], [4.0]])
    got = ReplicationDesigner(target_power=0.9).fit(X).predict(X)
    ref = [required_relative_sample_size(DesignRequest(z, 0.025, 0.9)).c_required for z in (3.0, 4.0)]
    np.testing.assert_allclose(got, ref, rtol=1e-12)


def test_designer_nan_when_infeasible():
    X = np.array([[2.0], [5.0]])
    out = ReplicationDesigner(target_power=0.99, power_kind="PREDICTIVE").fit(X).predict(X)
    assert np.isnan(out[0]) and np.isfinite(out[1])


def test_designer_p_input_and_validation():
    X = np.array([[0.001]])
    got = ReplicationDesigner(input="p").fit(X).predict(X)[0]
    ref = ReplicationDesigner().fit([[3.0]]).predict([[-special.ndtri(0.001)]])[0]
    assert got == pytest.approx(ref)
    with pytest.raises(ValueError):
        ReplicationDesigner().fit([[-1.0]])
