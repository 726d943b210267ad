"""Charts with restricted domains, certainty-threshold stratification,
refined voting, baselines, and filter/expert routing.

A chart wraps one prediction source (an in-memory function or a loaded
prediction matrix) together with its target vocabulary and an optional
admissibility restriction.  The combiner averages globally-embedded
probability vectors over the charts that are certain at the current
threshold, falling back to all admissible charts when none is.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import (
    IncompleteCoarseMap,
    MissingPrediction,
    NoChartCovers,
    UnknownChart,
    UnknownLabel,
)
from .llg_core import FuzzyOutput, certainty
from .model_io import PredictionMatrix


def sigma_threshold(x: float) -> float:
    """Logistic squashing used to build the certainty-threshold ladder."""
    return 1.0 / (1.0 + math.exp(-x))


@dataclass
class ThresholdLadder:
    """Ascending certainty thresholds starting at 0, all below 1."""

    thresholds: list[float]

    def __post_init__(self):
        t = self.thresholds
        if not t or t[0] != 0.0:
            raise ValueError("ladder must start at 0")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError("ladder must be strictly ascending")
        if t[-1] >= 1.0:
            raise ValueError("thresholds must be below 1")

    @classmethod
    def default(cls) -> "ThresholdLadder":
        return cls([0.0] + [sigma_threshold(k / 2) for k in range(21)])


@dataclass
class Admissibility:
    """Domain restriction of a chart: an allowed instance-id set and/or
    per-feature value ranges checked against supplied feature vectors."""

    allowed_ids: set[str] | None = None
    ranges: dict[str, tuple[float, float]] | None = None

    def admits(self, instance_id: str, features: dict | None = None) -> bool:
        if self.allowed_ids is not None and instance_id not in self.allowed_ids:
            return False
        if self.ranges:
            if features is None:
                return False
            for name, (lo, hi) in self.ranges.items():
                v = features.get(name)
                if v is None or not (lo <= v <= hi):
                    return False
        return True


@dataclass
class Chart:
    """One prediction source over a subset of the global label space."""

    id: str
    vocab: list[str]
    source: object  # PredictionMatrix or callable instance_id -> FuzzyOutput
    admissibility: Admissibility | None = None
    role: str = "plain"  # plain | expert | filter

    def predict(self, instance_id: str) -> FuzzyOutput:
        if isinstance(self.source, PredictionMatrix):
            row = self.source.row_for(instance_id)
            if row is None:
                raise MissingPrediction(
                    f"chart {self.id} has no prediction for {instance_id}"
                )
            return FuzzyOutput(vocab=self.vocab, probs=row)
        out = self.source(instance_id)
        if out is None:
            raise MissingPrediction(
                f"chart {self.id} has no prediction for {instance_id}"
            )
        return out

    def admits(self, instance_id: str, features: dict | None = None) -> bool:
        if self.admissibility is None:
            return True
        return self.admissibility.admits(instance_id, features)


@dataclass
class Logifold:
    """A collection of charts over a global label space with a certainty
    ladder and an optional filter/expert routing policy."""

    charts: list[Chart]
    global_labels: list[str]
    ladder: ThresholdLadder = field(default_factory=ThresholdLadder.default)
    routing: tuple[str, dict[str, str]] | None = None  # (filter chart id, coarse -> expert id)

    def __post_init__(self):
        if not self.charts:
            raise ValueError("logifold needs at least one chart")
        if len(set(self.global_labels)) != len(self.global_labels):
            raise ValueError("global labels must be distinct")
        known = set(self.global_labels)
        for chart in self.charts:
            missing = set(chart.vocab) - known
            if missing and chart.role != "filter":
                raise UnknownLabel(
                    f"chart {chart.id} labels outside global space: {sorted(missing)}"
                )
        if self.routing is not None:
            self._check_routing(*self.routing)
        self._by_id = {c.id: c for c in self.charts}

    def _check_routing(self, filter_id, coarse_map):
        ids = {c.id for c in self.charts}
        if filter_id not in ids:
            raise UnknownChart(f"filter chart {filter_id!r} not in logifold")
        for expert in coarse_map.values():
            if expert not in ids:
                raise UnknownChart(f"expert chart {expert!r} not in logifold")
        filter_chart = next(c for c in self.charts if c.id == filter_id)
        uncovered = set(filter_chart.vocab) - set(coarse_map)
        if uncovered:
            raise IncompleteCoarseMap(
                f"coarse labels without experts: {sorted(uncovered)}"
            )

    def chart(self, chart_id: str) -> Chart:
        return self._by_id[chart_id]


@lru_cache(maxsize=1024)
def _embed_positions(vocab: tuple, global_labels: tuple) -> np.ndarray:
    pos = {label: i for i, label in enumerate(global_labels)}
    missing = [l for l in vocab if l not in pos]
    if missing:
        raise UnknownLabel(f"labels not in global space: {missing}")
    return np.array([pos[l] for l in vocab], dtype=int)


def embed_vector(probs: np.ndarray, vocab: list[str],
                 global_labels: list[str]) -> np.ndarray:
    """Copy coordinates into matching global positions, zeros elsewhere."""
    out = np.zeros(len(global_labels))
    out[_embed_positions(tuple(vocab), tuple(global_labels))] = probs
    return out


def embed_to_global(out: FuzzyOutput, global_labels: list[str]) -> FuzzyOutput:
    """Zero-pad a chart output into the global label space (sum preserved)."""
    return FuzzyOutput(vocab=list(global_labels),
                       probs=embed_vector(out.probs, out.vocab, global_labels))


def fuzzy_domain(chart: Chart, instance_ids, t: float,
                 features: dict | None = None) -> list[str]:
    """Instance ids where the chart is admissible and certain above t."""
    out = []
    for iid in instance_ids:
        if not chart.admits(iid, None if features is None else features.get(iid)):
            continue
        if certainty(chart.predict(iid)) > t:
            out.append(iid)
    return out


@dataclass
class VoteResult:
    label: str
    probs: np.ndarray  # averaged embedded vector over the global space
    certainty: float
    contributors: list[str]


def _argmax_label(probs: np.ndarray, global_labels: list[str]) -> str:
    return global_labels[int(np.argmax(probs))]


def refined_vote(lf: Logifold, instance_id: str, t: float,
                 features: dict | None = None) -> VoteResult:
    """Certainty-filtered equal-weight average of globally-embedded chart
    outputs.

    With routing installed, the filter chart is evaluated first and only the
    expert mapped from its most certain coarse label participates, its
    output scaled by the filter's certainty; plain charts always remain
    candidates.  An empty certainty selection falls back to all admissible
    candidates (threshold-0 behaviour).
    """
    candidates: list[tuple[Chart, float]] = []  # (chart, weight)
    if lf.routing is not None:
        filter_id, coarse_map = lf.routing
        filter_chart = lf.chart(filter_id)
        fout = filter_chart.predict(instance_id)
        coarse = fout.argmax_label()
        f_cert = certainty(fout)
        routed_id = coarse_map[coarse]
        for chart in lf.charts:
            if chart.id == filter_id:
                continue
            if chart.role == "expert" or chart.id in coarse_map.values():
                if chart.id == routed_id:
                    candidates.append((chart, f_cert))
            else:
                candidates.append((chart, 1.0))
    else:
        candidates = [(c, 1.0) for c in lf.charts]

    admissible = [(c, w, c.predict(instance_id)) for c, w in candidates
                  if c.admits(instance_id, features)]
    if not admissible:
        raise NoChartCovers(f"no chart covers instance {instance_id}")
    selected = [(c, w, out) for c, w, out in admissible if certainty(out) > t]
    if not selected:
        selected = admissible

    acc = np.zeros(len(lf.global_labels))
    for chart, weight, out in selected:
        acc += weight * embed_vector(out.probs, chart.vocab, lf.global_labels)
    avg = acc / len(selected)
    return VoteResult(
        label=_argmax_label(avg, lf.global_labels),
        probs=avg,
        certainty=float(avg.max()),
        contributors=[c.id for c, _, _ in selected],
    )


def simple_average(lf: Logifold, instance_id: str) -> str:
    """Argmax of the unweighted mean over ALL charts, with no domain
    restriction and no routing."""
    space = _full_space(lf)
    acc = np.zeros(len(space))
    for chart in lf.charts:
        out = chart.predict(instance_id)
        acc += embed_vector(out.probs, chart.vocab, space)
    return _argmax_label(acc / len(lf.charts), space)


def majority_vote(lf: Logifold, instance_id: str) -> str:
    """Most frequent per-chart argmax; ties broken by baseline space order."""
    space = _full_space(lf)
    counts = np.zeros(len(space))
    pos = {label: i for i, label in enumerate(space)}
    for chart in lf.charts:
        counts[pos[chart.predict(instance_id).argmax_label()]] += 1
    return space[int(np.argmax(counts))]


def _full_space(lf: Logifold) -> list[str]:
    """Union of chart vocabs in chart order plus remaining global labels, so
    baselines can count every chart's vote (including a filter's coarse
    labels).  Argmax ties resolve to the earliest label in this order."""
    seen = dict.fromkeys(l for c in lf.charts for l in c.vocab)
    seen.update(dict.fromkeys(lf.global_labels))
    return list(seen)


@dataclass
class EvaluationRow:
    threshold: float
    acc_refined: float
    acc_certain: float
    n_certain: int


def evaluate_table(lf: Logifold, truth, instance_ids=None,
                   features: dict | None = None):
    """Per-ladder-threshold accuracies plus the two baselines.

    Returns (rows, simple_average_accuracy, majority_vote_accuracy).
    ``acc_refined`` is over the whole dataset; ``acc_certain`` is restricted
    to instances where the combined certainty exceeds the threshold.
    """
    ids = list(instance_ids) if instance_ids is not None else list(truth.instance_ids)
    n = len(ids)
    threads = max(1, int(os.environ.get("LOGIFOLD_THREADS", "1")))

    def _map(fn):
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                return list(pool.map(fn, ids))
        return [fn(i) for i in ids]

    rows = []
    for t in lf.ladder.thresholds:
        results = _map(lambda iid, t=t: refined_vote(lf, iid, t, features))
        correct = [r.label == truth.label_for(iid) for r, iid in zip(results, ids)]
        certain = [r.certainty > t for r in results]
        n_certain = sum(certain)
        acc_certain = (
            sum(c for c, ok in zip(correct, certain) if ok) / n_certain
            if n_certain else 0.0
        )
        rows.append(EvaluationRow(
            threshold=t,
            acc_refined=sum(correct) / n,
            acc_certain=acc_certain,
            n_certain=n_certain,
        ))
    simple_acc = sum(simple_average(lf, iid) == truth.label_for(iid)
                     for iid in ids) / n
    majority_acc = sum(majority_vote(lf, iid) == truth.label_for(iid)
                       for iid in ids) / n
    return rows, simple_acc, majority_acc


def specialize_routing(lf: Logifold, filter_id: str,
                       coarse_map: dict[str, str]) -> Logifold:
    """Return a copy of the logifold with filter/expert routing installed."""
    return replace(lf, routing=(filter_id, dict(coarse_map)))


TABLE_HEADER = "threshold\tacc_refined\tacc_certain\tn_certain"


def _fmt(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return s or "0"


def format_table(rows: list[EvaluationRow], simple_acc: float,
                 majority_acc: float) -> str:
    lines = [TABLE_HEADER]
    for r in rows:
        lines.append(f"{_fmt(r.threshold)}\t{_fmt(r.acc_refined)}"
                     f"\t{_fmt(r.acc_certain)}\t{r.n_certain}")
    lines.append(f"simple_average\t{_fmt(simple_acc)}")
    lines.append(f"majority_vote\t{_fmt(majority_acc)}")
    return "\n".join(lines) + "\n"
