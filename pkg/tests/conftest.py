import numpy as np
import pytest

from logifold.llg_core import AffineMap, MlpSpec


def forward_logits(mlp: MlpSpec, x):
    """Independent forward-pass oracle: plain numpy, no graph machinery."""
    h = np.asarray(x, dtype=float)
    for layer in mlp.layers[:-1]:
        h = np.maximum(h @ layer.weights.T + layer.bias, 0.0)
    last = mlp.layers[-1]
    return h @ last.weights.T + last.bias


def random_mlp(rng, widths, head="index-max"):
    layers = []
    for n_in, n_out in zip(widths, widths[1:]):
        layers.append(AffineMap(rng.normal(size=(n_out, n_in)),
                                rng.normal(size=n_out)))
    return MlpSpec(layers=layers, input_dim=widths[0], head=head)


def min_boundary_distance(graph, x):
    """Distance (in decider output space) from x to the nearest sign boundary."""
    return min(float(np.abs(d(x)).min()) for d in graph.deciders.values())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def strong_weak_logifold(seed=42, n=10_000):
    """Synthetic combiner scenario: one strong chart (90% agreement, high
    certainty when correct) and six weak charts (55% agreement, correlated
    errors, certainty below the first ladder rung).  Returns (logifold,
    ground truth)."""
    from logifold.ensemble import Chart, Logifold
    from logifold.model_io import GroundTruth, PredictionMatrix

    rng = np.random.default_rng(seed)
    labels = [f"l{k}" for k in range(10)]
    ids = [f"i{k}" for k in range(n)]
    truth_idx = rng.integers(0, 10, size=n)
    decoy_idx = (truth_idx + 1) % 10  # shared wrong answer of the weak charts
    strong_ok = rng.random(n) < 0.9
    weak_ok = rng.random(n) < 0.55

    def peaked(idx, cert):
        row = np.full(10, (1.0 - cert) / 9.0)
        row[idx] = cert
        return row

    strong_rows = np.array([
        peaked(t if ok else (t + 3) % 10, 0.99 if ok else 0.3)
        for t, ok in zip(truth_idx, strong_ok)])
    charts = [Chart(id="strong", vocab=labels, source=PredictionMatrix(
        model_id="strong", vocab=labels, instance_ids=ids, rows=strong_rows))]
    for w in range(6):
        cert = 0.42 + 0.005 * w  # below the 0.5 rung, so weak charts drop out
        rows = np.array([
            peaked(t if ok else d, cert)
            for t, d, ok in zip(truth_idx, decoy_idx, weak_ok)])
        charts.append(Chart(id=f"weak{w}", vocab=labels, source=PredictionMatrix(
            model_id=f"weak{w}", vocab=labels, instance_ids=ids, rows=rows)))
    lf = Logifold(charts=charts, global_labels=labels)
    truth = GroundTruth(instance_ids=ids,
                        labels=[labels[t] for t in truth_idx])
    return lf, truth
