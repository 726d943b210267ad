import math

import numpy as np
import pytest

from logifold.ensemble import (
    Admissibility,
    Chart,
    Logifold,
    ThresholdLadder,
    embed_to_global,
    evaluate_table,
    format_table,
    fuzzy_domain,
    majority_vote,
    refined_vote,
    sigma_threshold,
    simple_average,
    specialize_routing,
)
from logifold.errors import (
    IncompleteCoarseMap,
    MissingPrediction,
    NoChartCovers,
    UnknownChart,
    UnknownLabel,
)
from logifold.llg_core import FuzzyOutput
from logifold.model_io import GroundTruth, PredictionMatrix


def chart(cid, vocab, rows, **kw):
    """Chart backed by a prediction matrix given as {instance_id: probs}."""
    ids = list(rows)
    matrix = PredictionMatrix(model_id=cid, vocab=vocab, instance_ids=ids,
                              rows=np.array([rows[i] for i in ids], dtype=float))
    return Chart(id=cid, vocab=vocab, source=matrix, **kw)


class TestSigma:
    def test_matches_table_second_threshold(self):
        assert sigma_threshold(2) == pytest.approx(0.8808, abs=5e-5)

    def test_matches_table_third_threshold(self):
        assert sigma_threshold(3) == pytest.approx(0.9526, abs=5e-5)

    def test_symmetry_point(self):
        assert sigma_threshold(0) == 0.5


class TestLadder:
    def test_default_starts_at_zero(self):
        ladder = ThresholdLadder.default()
        assert ladder.thresholds[0] == 0.0
        assert ladder.thresholds[1] == 0.5
        assert all(b > a for a, b in zip(ladder.thresholds,
                                         ladder.thresholds[1:]))

    def test_rejects_descending(self):
        with pytest.raises(ValueError):
            ThresholdLadder([0.0, 0.9, 0.5])

    def test_rejects_missing_zero(self):
        with pytest.raises(ValueError):
            ThresholdLadder([0.1, 0.5])


class TestEmbed:
    def test_zero_padding(self):
        out = FuzzyOutput(vocab=["a", "b"], probs=[0.6, 0.4])
        emb = embed_to_global(out, ["a", "b", "c"])
        assert emb.probs == pytest.approx([0.6, 0.4, 0.0])

    def test_one_hot_stays_one_hot(self):
        out = FuzzyOutput(vocab=["b"], probs=[1.0])
        emb = embed_to_global(out, ["a", "b", "c"])
        assert emb.probs == pytest.approx([0.0, 1.0, 0.0])

    def test_sum_preserved(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            p = rng.dirichlet(np.ones(3))
            out = FuzzyOutput(vocab=["x", "y", "z"], probs=p)
            emb = embed_to_global(out, ["w", "x", "y", "z", "u"])
            assert float(emb.probs.sum()) == pytest.approx(float(p.sum()))
            assert (emb.probs >= 0).all()

    def test_unknown_label(self):
        out = FuzzyOutput(vocab=["q"], probs=[1.0])
        with pytest.raises(UnknownLabel):
            embed_to_global(out, ["a", "b"])


class TestFuzzyDomain:
    def make(self):
        return chart("c", ["a", "b"], {
            "i0": [0.95, 0.05], "i1": [0.6, 0.4], "i2": [0.99, 0.01]})

    def test_zero_threshold_keeps_all(self):
        c = self.make()
        assert fuzzy_domain(c, ["i0", "i1", "i2"], 0.0) == ["i0", "i1", "i2"]

    def test_certainty_cut(self):
        c = self.make()
        assert fuzzy_domain(c, ["i0", "i1", "i2"], 0.9) == ["i0", "i2"]

    def test_nesting(self):
        c = self.make()
        hi = set(fuzzy_domain(c, ["i0", "i1", "i2"], 0.99))
        lo = set(fuzzy_domain(c, ["i0", "i1", "i2"], 0.9))
        assert hi <= lo

    def test_missing_prediction(self):
        c = self.make()
        with pytest.raises(MissingPrediction):
            fuzzy_domain(c, ["i0", "nope"], 0.0)

    def test_admissibility_respected(self):
        c = chart("c", ["a", "b"], {"i0": [0.9, 0.1], "i1": [0.9, 0.1]},
                  admissibility=Admissibility(allowed_ids={"i0"}))
        assert fuzzy_domain(c, ["i0", "i1"], 0.0) == ["i0"]


def two_chart_logifold():
    a = chart("A", ["a", "b"], {"i0": [0.6, 0.4]})
    b = chart("B", ["b", "c"], {"i0": [0.5, 0.5]})
    return Logifold(charts=[a, b], global_labels=["a", "b", "c"])


class TestRefinedVote:
    def test_single_chart(self):
        lf = Logifold(charts=[chart("A", ["a", "b"], {"i0": [0.7, 0.3]})],
                      global_labels=["a", "b"])
        r = refined_vote(lf, "i0", 0.0)
        assert r.label == "a"

    def test_two_chart_average(self):
        r = refined_vote(two_chart_logifold(), "i0", 0.0)
        assert r.probs == pytest.approx([0.3, 0.45, 0.25])
        assert r.label == "b"

    def test_certainty_filter_selects_strong_chart(self):
        a = chart("A", ["a", "b"], {"i0": [0.95, 0.05]})
        b = chart("B", ["a", "b"], {"i0": [0.5, 0.5]})
        lf = Logifold(charts=[a, b], global_labels=["a", "b"])
        r = refined_vote(lf, "i0", 0.9)
        assert r.contributors == ["A"]
        assert r.probs == pytest.approx([0.95, 0.05])

    def test_fallback_when_nobody_certain(self):
        a = chart("A", ["a", "b"], {"i0": [0.6, 0.4]})
        b = chart("B", ["a", "b"], {"i0": [0.55, 0.45]})
        lf = Logifold(charts=[a, b], global_labels=["a", "b"])
        r = refined_vote(lf, "i0", 0.99)
        assert sorted(r.contributors) == ["A", "B"]

    def test_no_chart_covers(self):
        a = chart("A", ["a", "b"], {"i0": [0.6, 0.4]},
                  admissibility=Admissibility(allowed_ids=set()))
        lf = Logifold(charts=[a], global_labels=["a", "b"])
        with pytest.raises(NoChartCovers):
            refined_vote(lf, "i0", 0.0)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(4)
        ids = [f"i{k}" for k in range(50)]
        rows1 = {i: rng.dirichlet(np.ones(3)) for i in ids}
        rows2 = {i: rng.dirichlet(np.ones(3)) for i in ids}
        c1 = chart("A", ["a", "b", "c"], rows1)
        c2 = chart("B", ["a", "b", "c"], rows2)
        lf1 = Logifold(charts=[c1, c2], global_labels=["a", "b", "c"])
        lf2 = Logifold(charts=[c2, c1], global_labels=["a", "b", "c"])
        for i in ids:
            for t in (0.0, 0.5, 0.9):
                assert refined_vote(lf1, i, t).label == refined_vote(lf2, i, t).label


class TestBaselines:
    def test_single_chart_all_equal(self):
        lf = Logifold(charts=[chart("A", ["a", "b"], {"i0": [0.7, 0.3]})],
                      global_labels=["a", "b"])
        assert simple_average(lf, "i0") == "a"
        assert majority_vote(lf, "i0") == "a"
        assert refined_vote(lf, "i0", 0.0).label == "a"

    def test_majority_counting(self):
        cs = [chart(f"C{k}", ["a", "b"], {"i0": p}) for k, p in enumerate(
            [[0.9, 0.1], [0.8, 0.2], [0.1, 0.9]])]
        lf = Logifold(charts=cs, global_labels=["a", "b"])
        assert majority_vote(lf, "i0") == "a"

    def test_simple_average_two_charts(self):
        assert simple_average(two_chart_logifold(), "i0") == "b"

    def test_threshold_zero_matches_simple_average(self):
        rng = np.random.default_rng(8)
        ids = [f"i{k}" for k in range(200)]
        charts = [chart(f"C{k}", ["a", "b", "c"],
                        {i: rng.dirichlet(np.ones(3)) for i in ids})
                  for k in range(4)]
        lf = Logifold(charts=charts, global_labels=["a", "b", "c"])
        for i in ids:
            assert refined_vote(lf, i, 0.0).label == simple_average(lf, i)


class TestEvaluateTable:
    def perfect(self, n=20):
        ids = [f"i{k}" for k in range(n)]
        labels = [["a", "b"][k % 2] for k in range(n)]
        rows = {i: ([1.0, 0.0] if l == "a" else [0.0, 1.0])
                for i, l in zip(ids, labels)}
        lf = Logifold(charts=[chart("P", ["a", "b"], rows)],
                      global_labels=["a", "b"],
                      ladder=ThresholdLadder([0.0, 0.5, 0.9]))
        return lf, GroundTruth(instance_ids=ids, labels=labels)

    def test_zero_row_counts_everything(self):
        lf, truth = self.perfect()
        rows, _, _ = evaluate_table(lf, truth)
        assert rows[0].threshold == 0.0
        assert rows[0].n_certain == len(truth.instance_ids)

    def test_perfect_chart_all_ones(self):
        lf, truth = self.perfect()
        rows, simple_acc, majority_acc = evaluate_table(lf, truth)
        assert all(r.acc_refined == 1.0 and r.acc_certain == 1.0 and
                   r.n_certain == len(truth.instance_ids) for r in rows)
        assert simple_acc == 1.0 and majority_acc == 1.0

    def test_n_certain_nonincreasing_on_strong_weak(self):
        # not a theorem for arbitrary logifolds: dropping low-certainty
        # charts can raise the combined certainty.  It does hold when the
        # weak charts sit below the first nonzero rung.
        from conftest import strong_weak_logifold
        lf, truth = strong_weak_logifold(seed=7, n=1_000)
        rows, _, _ = evaluate_table(lf, truth)
        assert all(b.n_certain <= a.n_certain
                   for a, b in zip(rows, rows[1:]))

    def test_table_format(self):
        lf, truth = self.perfect(4)
        rows, s, m = evaluate_table(lf, truth)
        text = format_table(rows, s, m)
        lines = text.splitlines()
        assert lines[0] == "threshold\tacc_refined\tacc_certain\tn_certain"
        assert lines[-2].startswith("simple_average\t")
        assert lines[-1].startswith("majority_vote\t")
        assert lines[1] == "0\t1\t1\t4"


def routed_logifold():
    """One-hot filter over three coarse groups; expert k is perfect on group
    k and uniform elsewhere.  In the flat average the filter's coarse label
    ties the true fine label and wins the tie-break."""
    groups = {"g0": ["a0", "a1"], "g1": ["b0", "b1"], "g2": ["c0", "c1"]}
    fine = [l for ls in groups.values() for l in ls]
    ids, truth_labels = [], []
    for gi, (g, labels) in enumerate(groups.items()):
        for j, l in enumerate(labels):
            ids.append(f"{g}:{j}")
            truth_labels.append(l)
    filter_rows = {i: np.eye(3)[int(i[1])] for i in ids}
    charts = [chart("flt", list(groups), filter_rows, role="filter")]
    for gi, (g, labels) in enumerate(groups.items()):
        rows = {}
        for i, l in zip(ids, truth_labels):
            if i.startswith(g):
                rows[i] = [1.0 if x == l else 0.0 for x in labels]
            else:
                rows[i] = [0.5, 0.5]
        charts.append(chart(f"exp{gi}", labels, rows, role="expert"))
    lf = Logifold(charts=charts, global_labels=fine)
    lf = specialize_routing(lf, "flt", {g: f"exp{k}" for k, g in enumerate(groups)})
    truth = GroundTruth(instance_ids=ids, labels=truth_labels)
    return lf, truth


class TestRouting:
    def test_one_hot_filter_engages_single_expert(self):
        lf, truth = routed_logifold()
        r = refined_vote(lf, "g1:0", 0.0)
        assert r.contributors == ["exp1"]
        assert r.label == truth.label_for("g1:0")

    def test_one_coarse_label_is_identity(self):
        ids = ["x:0", "x:1"]
        f = chart("flt", ["g"], {i: [1.0] for i in ids}, role="filter")
        e = chart("exp", ["a", "b"], {"x:0": [0.9, 0.1], "x:1": [0.2, 0.8]},
                  role="expert")
        lf = Logifold(charts=[f, e], global_labels=["a", "b"])
        lf = specialize_routing(lf, "flt", {"g": "exp"})
        assert refined_vote(lf, "x:0", 0.0).label == "a"
        assert refined_vote(lf, "x:1", 0.0).label == "b"

    def test_filter_certainty_multiplies(self):
        f = chart("flt", ["g0", "g1"], {"i": [0.9, 0.1]}, role="filter")
        e0 = chart("e0", ["a", "b"], {"i": [0.8, 0.2]}, role="expert")
        e1 = chart("e1", ["c"], {"i": [1.0]}, role="expert")
        lf = Logifold(charts=[f, e0, e1], global_labels=["a", "b", "c"])
        lf = specialize_routing(lf, "flt", {"g0": "e0", "g1": "e1"})
        r = refined_vote(lf, "i", 0.0)
        assert r.probs[0] == pytest.approx(0.9 * 0.8)
        assert r.certainty == pytest.approx(0.72)

    def test_unknown_chart(self):
        lf, _ = routed_logifold()
        with pytest.raises(UnknownChart):
            specialize_routing(lf, "nope", {"g0": "exp0", "g1": "exp1",
                                            "g2": "exp2"})

    def test_incomplete_coarse_map(self):
        lf, _ = routed_logifold()
        with pytest.raises(IncompleteCoarseMap):
            specialize_routing(lf, "flt", {"g0": "exp0"})

    def test_routing_beats_flat_average(self):
        lf, truth = routed_logifold()
        ids = truth.instance_ids
        routed_acc = sum(refined_vote(lf, i, 0.0).label == truth.label_for(i)
                         for i in ids) / len(ids)
        flat_acc = sum(simple_average(lf, i) == truth.label_for(i)
                       for i in ids) / len(ids)
        assert routed_acc == 1.0
        assert flat_acc < 1.0
