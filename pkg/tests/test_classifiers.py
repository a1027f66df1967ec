import json

import numpy as np
import pytest

from shapeqc import (
    DEFAULTS,
    KINDS,
    InvalidSpecError,
    ParseError,
    SchemaMismatchError,
    TooFewRowsError,
    fit,
    load_model,
    model_from_json,
    model_to_json,
    predict,
    predict_batch,
    save_model,
    score_matrix,
)
from shapeqc.corpus import QualityLabel
from shapeqc.numeric import rng_from_seed

TREE_KINDS = ("decision_tree", "random_forest", "extra_trees", "adaboost", "gradient_boosting")


def pad14(cols: dict, n: int) -> np.ndarray:
    """Embed a few active columns into the 14-wide feature layout."""
    X = np.zeros((n, 14))
    for j, vals in cols.items():
        X[:, j] = vals
    return X


def blobs(n=80, gap=4.0, seed=0):
    rng = rng_from_seed(seed)
    X = rng.normal(size=(n, 14))
    y = (rng.random(n) < 0.5).astype(np.int64)
    X[:, 2] += gap * y
    return X, y


class TestFitContracts:
    def test_unknown_kind(self):
        X, y = blobs(10)
        with pytest.raises(InvalidSpecError):
            fit("perceptron", X, y)

    def test_unknown_hyper_key(self):
        X, y = blobs(10)
        with pytest.raises(InvalidSpecError):
            fit("knn", X, y, hyper={"kk": 3})

    def test_too_few_rows(self):
        with pytest.raises(TooFewRowsError):
            fit("knn", np.zeros((1, 14)), np.array([1]))

    def test_bad_labels(self):
        with pytest.raises(ValueError):
            fit("knn", np.zeros((4, 14)), np.array([0, 1, 2, 1]))

    def test_nonfinite_features(self):
        X, y = blobs(6)
        X[0, 0] = np.nan
        with pytest.raises(ValueError):
            fit("knn", X, y)

    @pytest.mark.parametrize("kind", KINDS)
    def test_deterministic_for_fixed_seed(self, kind):
        X, y = blobs(40, seed=3)
        a = model_to_json(fit(kind, X, y, seed=9))
        b = model_to_json(fit(kind, X, y, seed=9))
        assert a == b


class TestDegenerate:
    @pytest.mark.parametrize("kind", KINDS)
    def test_all_good_constant_model(self, kind):
        X = rng_from_seed(0).normal(size=(6, 14))
        y = np.ones(6, dtype=np.int64)
        m = fit(kind, X, y)
        assert m.degenerate
        scores = score_matrix(m, X)
        np.testing.assert_array_equal(scores, 1.0)
        assert all(p.label == QualityLabel.GOOD for p in predict_batch(m, X))

    @pytest.mark.parametrize("kind", KINDS)
    def test_all_bad_constant_model(self, kind):
        X = rng_from_seed(1).normal(size=(5, 14))
        y = np.zeros(5, dtype=np.int64)
        m = fit(kind, X, y)
        scores = score_matrix(m, X)
        np.testing.assert_array_equal(scores, 0.0)
        assert all(p.label == QualityLabel.BAD for p in predict_batch(m, X))


class TestDecisionTree:
    def test_xor_shattered(self):
        X = pad14({0: [0, 0, 1, 1], 1: [0, 1, 0, 1]}, 4)
        y = np.array([0, 1, 1, 0])
        m = fit("decision_tree", X, y)
        labels = [int(p.label) for p in predict_batch(m, X)]
        assert labels == y.tolist()

    def test_single_threshold_flip(self):
        X = pad14({3: [-2.0, -1.0, 1.0, 2.0]}, 4)
        y = np.array([0, 0, 1, 1])
        m = fit("decision_tree", X, y)
        lo = predict(m, pad14({3: [-5.0]}, 1)[0])
        hi = predict(m, pad14({3: [5.0]}, 1)[0])
        assert int(lo.label) == 0 and int(hi.label) == 1

    def test_depth_limit_respected(self):
        X, y = blobs(60, gap=1.0, seed=5)
        m = fit("decision_tree", X, y, hyper={"max_depth": 1})
        # a stump has at most 3 nodes
        assert len(m.params["tree"]["feature"]) <= 3


class TestEnsembles:
    def test_random_forest_separates_blobs(self):
        X, y = blobs(100, seed=7)
        m = fit("random_forest", X, y, seed=1)
        acc = np.mean([int(p.label) for p in predict_batch(m, X)] == y)
        assert acc >= 0.95

    def test_adaboost_beats_chance_on_stripes(self):
        rng = rng_from_seed(2)
        X = rng.normal(size=(120, 14))
        y = (X[:, 5] > 0.3).astype(np.int64)
        m = fit("adaboost", X, y)
        acc = np.mean([int(p.label) for p in predict_batch(m, X)] == y)
        assert acc >= 0.95

    def test_gradient_boosting_fits_train(self):
        X, y = blobs(80, gap=2.0, seed=8)
        m = fit("gradient_boosting", X, y, seed=0)
        acc = np.mean([int(p.label) for p in predict_batch(m, X)] == y)
        assert acc >= 0.95

    @pytest.mark.parametrize("kind", TREE_KINDS)
    def test_monotone_rescale_invariance(self, kind):
        """Labels survive x -> 3x + 7 applied to train and test alike."""
        X, y = blobs(90, gap=1.5, seed=11)
        rng = rng_from_seed(12)
        T = rng.normal(size=(40, 14)) + y.mean()
        base = fit(kind, X, y, seed=2)
        scaled = fit(kind, 3.0 * X + 7.0, y, seed=2)
        a = [int(p.label) for p in predict_batch(base, T)]
        b = [int(p.label) for p in predict_batch(scaled, 3.0 * T + 7.0)]
        assert a == b


class TestLinearAndNeighbors:
    def test_logistic_separable(self):
        X, y = blobs(100, gap=6.0, seed=4)
        m = fit("logistic_regression", X, y)
        acc = np.mean([int(p.label) for p in predict_batch(m, X)] == y)
        assert acc == 1.0

    def test_lda_separable(self):
        X, y = blobs(100, gap=6.0, seed=4)
        m = fit("lda", X, y)
        acc = np.mean([int(p.label) for p in predict_batch(m, X)] == y)
        assert acc == 1.0

    def test_knn_vote_fraction(self):
        # 4 Good points at the origin, 3 Bad far away: the 5 nearest
        # neighbors of the origin are 4 Good + 1 Bad
        X = pad14({0: [0.0, 0.1, -0.1, 0.05, 9.0, 9.1, 8.9]}, 7)
        y = np.array([1, 1, 1, 1, 0, 0, 0])
        m = fit("knn", X, y)
        p = predict(m, pad14({0: [0.0]}, 1)[0])
        assert int(p.label) == 1
        assert p.score == pytest.approx(0.8)

    def test_svm_separable(self):
        X, y = blobs(60, gap=6.0, seed=6)
        m = fit("svm", X, y, seed=3)
        acc = np.mean([int(p.label) for p in predict_batch(m, X)] == y)
        assert acc >= 0.95

    def test_mlp_separable(self):
        X, y = blobs(60, gap=6.0, seed=9)
        m = fit("mlp", X, y, seed=3)
        acc = np.mean([int(p.label) for p in predict_batch(m, X)] == y)
        assert acc >= 0.95


class TestPredictionSurface:
    @pytest.mark.parametrize("kind", KINDS)
    def test_scores_in_unit_interval(self, kind):
        X, y = blobs(50, gap=1.0, seed=10)
        m = fit(kind, X, y, seed=1)
        T = rng_from_seed(13).normal(scale=5.0, size=(64, 14))
        s = score_matrix(m, T)
        assert s.min() >= 0.0 and s.max() <= 1.0

    @pytest.mark.parametrize("kind", KINDS)
    def test_predict_matches_batch(self, kind):
        X, y = blobs(40, seed=14)
        m = fit(kind, X, y, seed=5)
        T = rng_from_seed(15).normal(size=(9, 14))
        batch = predict_batch(m, T)
        for i in range(len(T)):
            single = predict(m, T[i])
            assert single.label == batch[i].label
            assert single.score == batch[i].score

    def test_empty_batch(self):
        X, y = blobs(10)
        m = fit("knn", X, y)
        assert predict_batch(m, np.zeros((0, 14))) == []

    def test_tie_at_half_goes_bad(self):
        # knn with k=2 on one Good and one Bad neighbor scores exactly 0.5
        X = pad14({0: [0.0, 1.0]}, 2)
        y = np.array([1, 0])
        m = fit("knn", X, y, hyper={"k": 2})
        p = predict(m, pad14({0: [0.5]}, 1)[0])
        assert p.score == 0.5
        assert int(p.label) == 0


class TestSerialization:
    @pytest.mark.parametrize("kind", KINDS)
    def test_round_trip_1000_predictions(self, kind, tmp_path):
        X, y = blobs(60, gap=1.2, seed=20)
        m = fit(kind, X, y, seed=7)
        path = tmp_path / f"{kind}.json"
        save_model(m, path)
        back = load_model(path)
        T = rng_from_seed(21).normal(scale=3.0, size=(1000, 14))
        s0 = score_matrix(m, T)
        s1 = score_matrix(back, T)
        assert np.abs(s0 - s1).max() <= 1e-12
        l0 = [p.label for p in predict_batch(m, T)]
        l1 = [p.label for p in predict_batch(back, T)]
        assert l0 == l1

    def test_save_is_stable(self, tmp_path):
        X, y = blobs(30, seed=22)
        m = fit("random_forest", X, y, seed=1)
        a = model_to_json(m)
        b = model_to_json(model_from_json(a))
        assert a == b

    def test_wrong_version_rejected(self):
        X, y = blobs(10)
        payload = json.loads(model_to_json(fit("lda", X, y)))
        payload["version"] = "2"
        with pytest.raises(SchemaMismatchError):
            model_from_json(json.dumps(payload))

    def test_unknown_kind_rejected(self):
        X, y = blobs(10)
        payload = json.loads(model_to_json(fit("lda", X, y)))
        payload["kind"] = "perceptron"
        with pytest.raises(SchemaMismatchError):
            model_from_json(json.dumps(payload))

    def test_feature_names_checked(self):
        X, y = blobs(10)
        payload = json.loads(model_to_json(fit("lda", X, y)))
        payload["feature_names"][0] = "mystery"
        with pytest.raises(SchemaMismatchError):
            model_from_json(json.dumps(payload))

    def test_truncated_file_rejected(self, tmp_path):
        X, y = blobs(10)
        path = tmp_path / "m.json"
        save_model(fit("lda", X, y), path)
        text = path.read_text()
        path.write_text(text[: len(text) // 2])
        with pytest.raises(ParseError):
            load_model(path)

    def test_missing_parameters_rejected(self):
        X, y = blobs(10)
        payload = json.loads(model_to_json(fit("lda", X, y)))
        del payload["parameters"]["weights"]
        with pytest.raises(ParseError):
            model_from_json(json.dumps(payload))


def test_defaults_catalog_complete():
    assert set(DEFAULTS) == set(KINDS)
    assert DEFAULTS["random_forest"]["n_trees"] == 100
    assert DEFAULTS["adaboost"]["n_stumps"] == 50
    assert DEFAULTS["knn"]["k"] == 5
    assert DEFAULTS["gradient_boosting"]["learning_rate"] == 0.1
    assert DEFAULTS["mlp"]["hidden"] == 100
    assert DEFAULTS["svm"]["C"] == 1.0
