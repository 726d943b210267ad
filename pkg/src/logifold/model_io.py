"""File formats connecting external models to the combiner and compiler.

Prediction matrices travel as UTF-8 text with LF line endings:

    # model_id=<id> labels=<l1,l2,...>
    <instance_id>,<p1>,<p2>,...,<pk>

Probabilities are decimal literals with up to 9 fractional digits.  Rows
must sum to 1 within 1e-5 and are renormalized exactly on load.

Network weights travel as a self-describing JSON document with fields
``input_dim``, ``head`` and ``layers`` (row-major ``weights``, ``bias``,
``activation``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionChainError,
    DuplicateInstance,
    RowSumError,
    SchemaError,
    UnknownActivation,
    UnknownLabel,
)
from .llg_core import AffineMap, MlpSpec

ROW_SUM_TOL = 1e-5
PROB_DIGITS = 9


@dataclass
class PredictionMatrix:
    """Per-instance probability rows emitted by one model."""

    model_id: str
    vocab: list[str]
    instance_ids: list[str]
    rows: np.ndarray  # (n_instances, len(vocab))

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.vocab):
            raise SchemaError(
                f"rows shape {self.rows.shape} does not match {len(self.vocab)} labels"
            )
        if len(self.instance_ids) != self.rows.shape[0]:
            raise SchemaError("instance_ids / rows length mismatch")
        if len(set(self.instance_ids)) != len(self.instance_ids):
            raise DuplicateInstance("duplicate instance id")
        if (self.rows < -1e-9).any():
            raise RowSumError("negative probability entry")
        self.rows = np.clip(self.rows, 0.0, None)
        sums = self.rows.sum(axis=1)
        bad = np.abs(sums - 1.0) > ROW_SUM_TOL
        if bad.any():
            i = int(np.argmax(bad))
            raise RowSumError(
                f"row for {self.instance_ids[i]} sums to {sums[i]:.7f}"
            )
        self.rows = self.rows / sums[:, None]
        self._index = {iid: i for i, iid in enumerate(self.instance_ids)}

    def row_for(self, instance_id: str) -> np.ndarray | None:
        i = self._index.get(instance_id)
        return None if i is None else self.rows[i]


@dataclass
class GroundTruth:
    instance_ids: list[str]
    labels: list[str]

    def __post_init__(self):
        if len(self.instance_ids) != len(self.labels):
            raise SchemaError("instance_ids / labels length mismatch")
        if len(set(self.instance_ids)) != len(self.instance_ids):
            raise DuplicateInstance("duplicate instance id in ground truth")
        self._by_id = dict(zip(self.instance_ids, self.labels))

    def label_for(self, instance_id: str) -> str:
        return self._by_id[instance_id]


def load_predictions(path) -> PredictionMatrix:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    lines = [ln for ln in text.split("\n") if ln != ""]
    if not lines or not lines[0].startswith("# "):
        raise SchemaError("missing header line")
    header = lines[0][2:]
    fields = {}
    for tok in header.split():
        if "=" not in tok:
            raise SchemaError(f"malformed header token {tok!r}")
        k, v = tok.split("=", 1)
        fields[k] = v
    if "model_id" not in fields or "labels" not in fields:
        raise SchemaError("header must carry model_id and labels")
    vocab = fields["labels"].split(",")
    ids, rows = [], []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(vocab) + 1:
            raise SchemaError(f"row {parts[0]!r} has {len(parts) - 1} entries "
                              f"for {len(vocab)} labels")
        ids.append(parts[0])
        try:
            rows.append([float(p) for p in parts[1:]])
        except ValueError as exc:
            raise SchemaError(f"bad probability literal in row {parts[0]!r}") from exc
    return PredictionMatrix(model_id=fields["model_id"], vocab=vocab,
                            instance_ids=ids, rows=np.array(rows).reshape(len(ids), len(vocab)))


def save_predictions(matrix: PredictionMatrix, path):
    lines = [f"# model_id={matrix.model_id} labels={','.join(matrix.vocab)}"]
    for iid, row in zip(matrix.instance_ids, matrix.rows):
        probs = ",".join(f"{p:.{PROB_DIGITS}f}".rstrip("0").rstrip(".") or "0"
                         for p in row)
        lines.append(f"{iid},{probs}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_ground_truth(path, global_labels: list[str] | None = None) -> GroundTruth:
    ids, labels = [], []
    with open(path, encoding="utf-8") as fh:
        for ln in fh:
            ln = ln.rstrip("\n")
            if not ln or ln.startswith("#"):
                continue
            parts = ln.split(",")
            if len(parts) != 2:
                raise SchemaError(f"ground-truth line {ln!r} is not id,label")
            ids.append(parts[0])
            labels.append(parts[1])
    if global_labels is not None:
        unknown = set(labels) - set(global_labels)
        if unknown:
            raise UnknownLabel(f"labels outside global space: {sorted(unknown)}")
    return GroundTruth(instance_ids=ids, labels=labels)


def save_ground_truth(truth: GroundTruth, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for iid, label in zip(truth.instance_ids, truth.labels):
            fh.write(f"{iid},{label}\n")


def union_label_space(vocabs: list[list[str]]) -> list[str]:
    """Ordered union in first-occurrence order; sub-vocabs keep their own order."""
    seen = {}
    for vocab in vocabs:
        for label in vocab:
            seen.setdefault(label, None)
    return list(seen)


def load_mlp(path) -> MlpSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    return mlp_from_dict(doc)


def mlp_from_dict(doc: dict) -> MlpSpec:
    for key in ("input_dim", "head", "layers"):
        if key not in doc:
            raise SchemaError(f"missing field {key!r}")
    layers = []
    for i, layer in enumerate(doc["layers"]):
        if "weights" not in layer or "bias" not in layer:
            raise SchemaError(f"layer {i} missing weights or bias")
        act = layer.get("activation", "relu")
        if act not in ("relu", "linear"):
            raise UnknownActivation(act)
        layers.append(AffineMap(np.array(layer["weights"], dtype=float),
                                np.array(layer["bias"], dtype=float)))
    for k in range(1, len(layers)):
        if layers[k].in_dim != layers[k - 1].out_dim:
            raise DimensionChainError(
                f"layer {k} expects {layers[k].in_dim} inputs, "
                f"layer {k - 1} provides {layers[k - 1].out_dim}"
            )
    if layers and layers[0].in_dim != doc["input_dim"]:
        raise DimensionChainError(
            f"layer 0 expects {layers[0].in_dim} inputs, input_dim={doc['input_dim']}"
        )
    if doc["head"] not in ("index-max", "softmax"):
        raise SchemaError(f"unknown head {doc['head']!r}")
    return MlpSpec(layers=layers, input_dim=int(doc["input_dim"]), head=doc["head"])


def save_mlp(mlp: MlpSpec, path):
    doc = {
        "input_dim": mlp.input_dim,
        "head": mlp.head,
        "layers": [
            {"weights": l.weights.tolist(), "bias": l.bias.tolist(),
             "activation": "relu"}
            for l in mlp.layers
        ],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_routing(path) -> tuple[str, dict[str, str]]:
    """Routing spec: first non-comment line ``filter=<chart_id>``, then one
    ``coarse_label,expert_id`` line per coarse label."""
    filter_id = None
    coarse_map = {}
    with open(path, encoding="utf-8") as fh:
        for ln in fh:
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            if filter_id is None:
                if not ln.startswith("filter="):
                    raise SchemaError("routing spec must begin with filter=<id>")
                filter_id = ln.split("=", 1)[1]
                continue
            parts = ln.split(",")
            if len(parts) != 2:
                raise SchemaError(f"routing line {ln!r} is not coarse,expert")
            coarse_map[parts[0]] = parts[1]
    if filter_id is None:
        raise SchemaError("empty routing spec")
    return filter_id, coarse_map
