import numpy as np
import pytest

from logifold import model_io
from logifold.errors import (
    DimensionChainError,
    DuplicateInstance,
    RowSumError,
    SchemaError,
    UnknownActivation,
)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestPredictions:
    def test_well_formed(self, tmp_path):
        p = write(tmp_path, "p.csv",
                  "# model_id=m labels=a,b,c\ni0,0.5,0.3,0.2\ni1,0,0,1\n")
        m = model_io.load_predictions(p)
        assert m.model_id == "m"
        assert m.vocab == ["a", "b", "c"]
        assert m.rows.shape == (2, 3)

    def test_row_sum_error_names_instance(self, tmp_path):
        p = write(tmp_path, "p.csv",
                  "# model_id=m labels=a,b\ni0,0.5,0.4\n")
        with pytest.raises(RowSumError, match="i0"):
            model_io.load_predictions(p)

    def test_small_excess_renormalized(self, tmp_path):
        p = write(tmp_path, "p.csv",
                  "# model_id=m labels=a,b\ni0,0.500004,0.5\n")
        m = model_io.load_predictions(p)
        assert m.rows[0].sum() == pytest.approx(1.0, abs=1e-15)

    def test_duplicate_instance(self, tmp_path):
        p = write(tmp_path, "p.csv",
                  "# model_id=m labels=a,b\ni0,1,0\ni0,0,1\n")
        with pytest.raises(DuplicateInstance):
            model_io.load_predictions(p)

    def test_missing_header(self, tmp_path):
        p = write(tmp_path, "p.csv", "i0,1,0\n")
        with pytest.raises(SchemaError):
            model_io.load_predictions(p)

    def test_missing_model_id(self, tmp_path):
        p = write(tmp_path, "p.csv", "# labels=a,b\ni0,1,0\n")
        with pytest.raises(SchemaError):
            model_io.load_predictions(p)

    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        rows = rng.dirichlet(np.ones(4), size=20)
        m = model_io.PredictionMatrix(
            model_id="rt", vocab=["a", "b", "c", "d"],
            instance_ids=[f"i{k}" for k in range(20)], rows=rows)
        path = tmp_path / "rt.csv"
        model_io.save_predictions(m, path)
        back = model_io.load_predictions(path)
        assert back.model_id == m.model_id
        assert back.vocab == m.vocab
        assert back.instance_ids == m.instance_ids
        assert np.abs(back.rows - m.rows).max() < 1e-8

    def test_negative_entry_rejected(self):
        with pytest.raises(RowSumError):
            model_io.PredictionMatrix(model_id="m", vocab=["a", "b"],
                                      instance_ids=["i0"],
                                      rows=np.array([[1.2, -0.2]]))


class TestGroundTruth:
    def test_load(self, tmp_path):
        p = write(tmp_path, "t.csv", "i0,a\ni1,b\n")
        t = model_io.load_ground_truth(p)
        assert t.label_for("i1") == "b"

    def test_unknown_label(self, tmp_path):
        p = write(tmp_path, "t.csv", "i0,z\n")
        from logifold.errors import UnknownLabel
        with pytest.raises(UnknownLabel):
            model_io.load_ground_truth(p, global_labels=["a", "b"])


class TestUnionLabelSpace:
    def test_thirty_labels(self):
        vocabs = [[f"m{i}" for i in range(10)],
                  [f"f{i}" for i in range(10)],
                  [f"c{i}" for i in range(10)]]
        assert len(model_io.union_label_space(vocabs)) == 30

    def test_idempotent(self):
        v = ["a", "b"]
        assert model_io.union_label_space([v, v]) == v

    def test_overlap(self):
        assert model_io.union_label_space([["a", "b"], ["b", "c"]]) == ["a", "b", "c"]


class TestMlpFiles:
    def test_identity_two_layer(self, tmp_path):
        doc = {"input_dim": 2, "head": "index-max", "layers": [
            {"weights": [[1, 0], [0, 1]], "bias": [0, 0]},
            {"weights": [[1, 0], [0, 1]], "bias": [0, 0]}]}
        import json
        p = write(tmp_path, "m.json", json.dumps(doc))
        mlp = model_io.load_mlp(p)
        assert len(mlp.layers) == 2

    def test_dimension_chain_error(self, tmp_path):
        import json
        doc = {"input_dim": 2, "head": "index-max", "layers": [
            {"weights": [[1, 0], [0, 1], [1, 1]], "bias": [0, 0, 0]},
            {"weights": [[1, 0, 0, 0], [0, 1, 0, 0]], "bias": [0, 0]}]}
        p = write(tmp_path, "m.json", json.dumps(doc))
        with pytest.raises(DimensionChainError):
            model_io.load_mlp(p)

    def test_softmax_head(self, tmp_path):
        import json
        doc = {"input_dim": 1, "head": "softmax",
               "layers": [{"weights": [[1]], "bias": [0]}]}
        p = write(tmp_path, "m.json", json.dumps(doc))
        assert model_io.load_mlp(p).head == "softmax"

    def test_unknown_activation(self, tmp_path):
        import json
        doc = {"input_dim": 1, "head": "index-max",
               "layers": [{"weights": [[1]], "bias": [0], "activation": "gelu"}]}
        p = write(tmp_path, "m.json", json.dumps(doc))
        with pytest.raises(UnknownActivation):
            model_io.load_mlp(p)

    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        from conftest import random_mlp
        mlp = random_mlp(rng, [2, 4, 3])
        p = tmp_path / "m.json"
        model_io.save_mlp(mlp, p)
        back = model_io.load_mlp(p)
        for a, b in zip(mlp.layers, back.layers):
            assert np.array_equal(a.weights, b.weights)
            assert np.array_equal(a.bias, b.bias)


class TestRouting:
    def test_load(self, tmp_path):
        p = write(tmp_path, "r.txt", "filter=flt\ng0,e0\ng1,e1\n")
        filter_id, cmap = model_io.load_routing(p)
        assert filter_id == "flt"
        assert cmap == {"g0": "e0", "g1": "e1"}

    def test_missing_filter(self, tmp_path):
        p = write(tmp_path, "r.txt", "g0,e0\n")
        with pytest.raises(SchemaError):
            model_io.load_routing(p)
