import json

import numpy as np
import pytest

from mrc.data import Dataset
from mrc.errors import SchemaMismatch
from mrc.evaluation import BoundsCurve, CurveRow, CvReport
from mrc.learn import TrainConfig, train
from mrc.persist import load_model, read_curve, save_model, write_curve, write_cv_report
from mrc.predict import SAMPLED, predict_proba_batch, predict


@pytest.fixture(scope="module")
def model():
    rng = np.random.default_rng(7)
    y = rng.integers(0, 3, 100)
    data = Dataset(rng.normal(size=(100, 3)) + y[:, None], y, ("lo", "mid", "hi"))
    return train(data, TrainConfig(max_thresholds=9))


def test_roundtrip_exact(model, tmp_path):
    p = tmp_path / "m.json"
    save_model(model, p)
    back = load_model(p)
    assert np.array_equal(back.mu, model.mu)
    assert back.nu == model.nu and back.upper_bound == model.upper_bound
    assert back.lower_bound == model.lower_bound
    assert back.feature_map == model.feature_map
    assert back.label_names == model.label_names
    assert np.array_equal(back.estimates.a, model.estimates.a)
    X = np.random.default_rng(1).normal(size=(50, 3)) * 2
    assert np.array_equal(predict_proba_batch(back, X)[0], predict_proba_batch(model, X)[0])
    assert np.array_equal(predict(back, X, SAMPLED, 5), predict(model, X, SAMPLED, 5))


def test_tampered_version(model, tmp_path):
    p = tmp_path / "m.json"
    save_model(model, p)
    doc = json.loads(p.read_text())
    doc["schema_version"] = 99
    p.write_text(json.dumps(doc))
    with pytest.raises(SchemaMismatch):
        load_model(p)


def test_missing_lower_bound(model, tmp_path):
    p = tmp_path / "m.json"
    save_model(model, p)
    doc = json.loads(p.read_text())
    del doc["lower_bound"]
    p.write_text(json.dumps(doc))
    assert load_model(p).lower_bound is None


def test_malformed_files(model, tmp_path):
    p = tmp_path / "m.json"
    p.write_text("not json")
    with pytest.raises(SchemaMismatch):
        load_model(p)
    save_model(model, p)
    doc = json.loads(p.read_text())
    del doc["mu"]
    p.write_text(json.dumps(doc))
    with pytest.raises(SchemaMismatch):
        load_model(p)


def test_numbers_are_17_digit_strings(model, tmp_path):
    p = tmp_path / "m.json"
    save_model(model, p)
    doc = json.loads(p.read_text())
    assert all(isinstance(v, str) for v in doc["mu"])
    assert float(doc["upper_bound"]) == model.upper_bound


def test_report_writers(tmp_path):
    rep = CvReport((0.1, 0.3), 0.2, 0.1, 0.15, 0.25)
    write_cv_report(rep, tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "quantity,value" and lines[-1] == "upper_bound,0.25"
    curve = BoundsCurve((CurveRow(100, 0.3, 0.2, 0.25), CurveRow(500, 0.28, 0.22, 0.24)))
    write_curve(curve, tmp_path / "c.csv")
    assert (tmp_path / "c.csv").read_text().splitlines()[0] == "n,lower,upper,test_error"
    rows = read_curve(tmp_path / "c.csv")
    assert rows[1] == {"n": 500, "lower": 0.22, "upper": 0.28, "test_error": 0.24}
