"""Linear logical graphs: representation, evaluation, and compilation of
small ReLU feed-forward classifiers into decision DAGs.

A linear logical graph is a finite DAG with one source, labeled sinks, and
an affine decider at every branching vertex.  The sign chamber of the
decider output (coordinatewise ``>= 0`` / ``< 0``) selects the outgoing
arrow.  A ReLU network with an index-max head computes such a function, and
``compile_mlp`` builds the graph constructively: vertices at depth ``l``
correspond to realized ReLU sign patterns of hidden layers ``1..l``, and the
final branching vertex splits on pairwise logit differences.

The fuzzy variant keeps the crisp skeleton but collapses the final decision
layers into a single sink whose incoming arrows apply softmax to the
chamber-restricted affine logit map, so the graph reproduces the network's
softmax output exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    MissingArrow,
    NonReLUActivation,
    RegionBudgetExceeded,
)

NONNEG = "+"
NEG = "-"


def sign_pattern(y) -> str:
    """Sign key of a decider output: '+' for >= 0, '-' for < 0 per coordinate."""
    return "".join(NONNEG if v >= 0.0 else NEG for v in np.asarray(y, dtype=float))


@dataclass
class AffineMap:
    """Dense affine map x -> weights @ x + bias."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        self.weights = np.atleast_2d(np.asarray(self.weights, dtype=float))
        self.bias = np.asarray(self.bias, dtype=float).reshape(-1)
        if self.weights.shape[0] != self.bias.shape[0]:
            raise DimensionMismatch(
                f"weights rows {self.weights.shape[0]} != bias length {self.bias.shape[0]}"
            )
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise ValueError("affine map entries must be finite")

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.in_dim:
            raise DimensionMismatch(
                f"input dim {x.shape[-1]} != affine in_dim {self.in_dim}"
            )
        return x @ self.weights.T + self.bias


@dataclass
class LinearLogicalGraph:
    """Finite decision DAG with affine deciders at branching vertices.

    ``out_arrows[v]`` maps a sign-pattern key to the child vertex.  A vertex
    with a single outgoing arrow may use the empty key ``""`` (followed
    unconditionally).
    """

    source: int
    out_arrows: dict[int, dict[str, int]]
    sinks: dict[int, object]
    deciders: dict[int, AffineMap]
    target_vocab: list

    def validate(self):
        verts = self._vertices()
        incoming = {v: 0 for v in verts}
        for v, arr in self.out_arrows.items():
            for child in arr.values():
                incoming[child] += 1
        roots = [v for v, c in incoming.items() if c == 0]
        if roots != [self.source] and set(roots) != {self.source}:
            raise ValueError(f"expected single source {self.source}, got roots {roots}")
        for v in verts:
            arr = self.out_arrows.get(v, {})
            if not arr and v not in self.sinks:
                raise ValueError(f"vertex {v} is a dead end but not a sink")
            if len(arr) > 1 and v not in self.deciders:
                raise ValueError(f"branching vertex {v} has no decider")
        self._toposort()  # raises on cycles
        return self

    def _vertices(self):
        verts = {self.source}
        verts.update(self.sinks)
        for v, arr in self.out_arrows.items():
            verts.add(v)
            verts.update(arr.values())
        return verts

    def _toposort(self):
        order, seen, onpath = [], set(), set()

        def visit(v):
            if v in onpath:
                raise ValueError("graph has a cycle")
            if v in seen:
                return
            onpath.add(v)
            for child in self.out_arrows.get(v, {}).values():
                visit(child)
            onpath.discard(v)
            seen.add(v)
            order.append(v)

        for v in sorted(self._vertices()):
            visit(v)
        return order[::-1]

    @property
    def num_vertices(self) -> int:
        return len(self._vertices())


def evaluate_llg(graph: LinearLogicalGraph, x) -> object:
    """Trace the unique path selected by the deciders at x; return the sink label."""
    x = np.asarray(x, dtype=float).reshape(-1)
    v = graph.source
    while v not in graph.sinks:
        arrows = graph.out_arrows.get(v, {})
        if v in graph.deciders:
            key = sign_pattern(graph.deciders[v](x))
        elif len(arrows) == 1:
            key = next(iter(arrows))
        else:
            raise MissingArrow(f"vertex {v} has no decider and {len(arrows)} arrows")
        if key not in arrows:
            raise MissingArrow(f"no arrow for pattern {key!r} at vertex {v}")
        v = arrows[key]
    return graph.sinks[v]


@dataclass
class MlpSpec:
    """Feed-forward net: affine layers with entrywise ReLU between them and
    an index-max or softmax head on the last layer's output."""

    layers: list[AffineMap]
    input_dim: int
    hidden_activation: str = "relu"
    head: str = "index-max"

    def __post_init__(self):
        if not self.layers:
            raise ValueError("MlpSpec needs at least one layer")
        if self.layers[0].in_dim != self.input_dim:
            raise DimensionMismatch(
                f"layer 0 expects {self.layers[0].in_dim} inputs, input_dim={self.input_dim}"
            )
        for k in range(1, len(self.layers)):
            if self.layers[k].in_dim != self.layers[k - 1].out_dim:
                raise DimensionMismatch(
                    f"layer {k} in_dim {self.layers[k].in_dim} != "
                    f"layer {k - 1} out_dim {self.layers[k - 1].out_dim}"
                )
        if self.hidden_activation != "relu":
            raise NonReLUActivation(self.hidden_activation)
        if self.head not in ("index-max", "softmax"):
            raise ValueError(f"unknown head {self.head!r}")

    @property
    def num_labels(self) -> int:
        return self.layers[-1].out_dim


@dataclass
class DiscoveryConfig:
    """Knobs for chamber discovery during compilation.

    Exhaustive enumeration is used when every branching width is at most
    ``enum_width_cap``; otherwise realized patterns are discovered from
    ``sample_count`` seeded random inputs.
    """

    enum_width_cap: int = 12
    sample_count: int = 100_000
    seed: int = 0
    sample_scale: float = 3.0
    max_regions: int = 100_000


def _restrict(pre: AffineMap, pattern: str, nxt: AffineMap) -> AffineMap:
    """Compose nxt . relu . pre on the chamber where relu acts as the mask
    given by pattern ('+' keeps the coordinate, '-' zeroes it)."""
    mask = np.array([1.0 if c == NONNEG else 0.0 for c in pattern])
    return AffineMap(nxt.weights @ (mask[:, None] * pre.weights),
                     nxt.weights @ (mask * pre.bias) + nxt.bias)


def _diff_map(out_layer: AffineMap) -> tuple[AffineMap, list[tuple[int, int]]]:
    """Pairwise logit differences (l_i - l_j : i < j) of the head layer."""
    k = out_layer.out_dim
    pairs = list(itertools.combinations(range(k), 2))
    w = np.array([out_layer.weights[i] - out_layer.weights[j] for i, j in pairs])
    b = np.array([out_layer.bias[i] - out_layer.bias[j] for i, j in pairs])
    return AffineMap(w, b), pairs


def _pattern_winner(key: str, k: int, pairs: list[tuple[int, int]]):
    """Lowest label index consistent with being the maximum under the given
    difference-sign pattern, or None if the pattern is contradictory (empty
    chamber).  '+' on pair (i, j) means l_i - l_j >= 0."""
    beats = {}
    for (i, j), c in zip(pairs, key):
        beats[(i, j)] = c == NONNEG
    for cand in range(k):
        ok = True
        for other in range(k):
            if other == cand:
                continue
            if cand < other:
                ok = beats[(cand, other)]
            else:
                # cand wins against a lower index only strictly
                ok = not beats[(other, cand)]
            if not ok:
                break
        if ok:
            return cand
    return None


def _hidden_routes(mlp: MlpSpec, cfg: DiscoveryConfig):
    """Realized (or exhaustively enumerated) sign-pattern routes through the
    hidden layers, as a mapping prefix -> set of next-level patterns, plus
    for each full hidden prefix the set of final diff patterns to attach
    (None means enumerate the diff patterns exhaustively)."""
    hidden = mlp.layers[:-1]
    widths = [l.out_dim for l in hidden]
    diff_width = mlp.num_labels * (mlp.num_labels - 1) // 2
    exhaustive = all(w <= cfg.enum_width_cap for w in widths) and (
        diff_width <= cfg.enum_width_cap
    )
    if exhaustive:
        return None, None  # caller enumerates everything
    rng = np.random.default_rng(cfg.seed)
    xs = rng.normal(scale=cfg.sample_scale, size=(cfg.sample_count, mlp.input_dim))
    routes = set()
    pats = []
    # plain forward pass tracking the sign pattern at every hidden layer
    act = xs
    for layer in hidden:
        z = act @ layer.weights.T + layer.bias
        pats.append(z >= 0.0)
        act = np.maximum(z, 0.0)
    logits = act @ mlp.layers[-1].weights.T + mlp.layers[-1].bias
    pairs = list(itertools.combinations(range(mlp.num_labels), 2))
    dpat = np.stack([logits[:, i] - logits[:, j] >= 0.0 for i, j in pairs], axis=1)
    for r in range(xs.shape[0]):
        hid = tuple(
            "".join(NONNEG if b else NEG for b in pats[l][r]) for l in range(len(hidden))
        )
        dk = "".join(NONNEG if b else NEG for b in dpat[r])
        routes.add((hid, dk))
    return routes, pairs


def compile_mlp(mlp: MlpSpec, discovery: DiscoveryConfig | None = None) -> LinearLogicalGraph:
    """Compile a ReLU net with index-max head into a linear logical graph.

    Vertices at level l carry the sign-pattern prefix of hidden layers 1..l;
    the deepest level branches on pairwise logit differences and routes to
    the sink of the maximizing label (lowest index on ties).
    """
    if mlp.head != "index-max":
        raise ValueError("compile_mlp requires an index-max head")
    cfg = discovery or DiscoveryConfig()
    hidden = mlp.layers[:-1]
    diff, pairs = _diff_map(mlp.layers[-1])
    k = mlp.num_labels
    winner_table = {}

    routes, _ = _hidden_routes(mlp, cfg)

    out_arrows: dict[int, dict[str, int]] = {}
    deciders: dict[int, AffineMap] = {}
    sinks: dict[int, object] = {}
    sink_of: dict[int, int] = {}
    next_id = [1]  # 0 is the source

    def new_vertex():
        v = next_id[0]
        next_id[0] += 1
        if next_id[0] > cfg.max_regions:
            raise RegionBudgetExceeded(f"more than {cfg.max_regions} vertices")
        return v

    def sink_for(label):
        if label not in sink_of:
            v = new_vertex()
            sink_of[label] = v
            sinks[v] = label
        return sink_of[label]

    # depth-first expansion over hidden-layer prefixes
    def expand(v, level, composed_pre, prefix):
        """composed_pre: affine map whose sign pattern decides layer level+1."""
        if level < len(hidden):
            deciders[v] = composed_pre
            out_arrows[v] = {}
            if routes is None:
                patterns = ("".join(p) for p in itertools.product(
                    (NONNEG, NEG), repeat=hidden[level].out_dim))
            else:
                patterns = sorted({r[0][level] for r in routes
                                   if r[0][:level] == prefix})
            for pat in patterns:
                child = new_vertex()
                out_arrows[v][pat] = child
                if level + 1 < len(hidden):
                    expand(child, level + 1,
                           _restrict(composed_pre, pat, mlp.layers[level + 1]),
                           prefix + (pat,))
                else:
                    restricted = _restrict(composed_pre, pat, mlp.layers[-1])
                    expand(child, len(hidden), restricted, prefix + (pat,))
        else:
            # composed_pre is now the chamber-restricted logit map; branch on diffs
            dw = np.array([composed_pre.weights[i] - composed_pre.weights[j]
                           for i, j in pairs])
            db = np.array([composed_pre.bias[i] - composed_pre.bias[j]
                           for i, j in pairs])
            deciders[v] = AffineMap(dw, db)
            out_arrows[v] = {}
            if routes is None:
                diff_keys = ("".join(p) for p in itertools.product(
                    (NONNEG, NEG), repeat=len(pairs)))
            else:
                diff_keys = sorted({r[1] for r in routes if r[0] == prefix})
            for key in diff_keys:
                if key not in winner_table:
                    winner_table[key] = _pattern_winner(key, k, pairs)
                win = winner_table[key]
                if win is None:
                    continue  # contradictory pattern: empty chamber, no arrow
                out_arrows[v][key] = sink_for(win)

    if not hidden:
        expand(0, 0, mlp.layers[-1], ())
    else:
        expand(0, 0, mlp.layers[0], ())
    graph = LinearLogicalGraph(
        source=0,
        out_arrows=out_arrows,
        sinks=sinks,
        deciders=deciders,
        target_vocab=list(range(k)),
    )
    return graph.validate()


# --------------------------------------------------------------------------
# fuzzy graphs


@dataclass
class ArrowMap:
    """Arrow map between internal state spaces: identity, or softmax of a
    chamber-restricted affine logit map."""

    kind: str  # "identity" | "softmax-affine"
    affine: AffineMap | None = None

    def __call__(self, state: np.ndarray) -> np.ndarray:
        if self.kind == "identity":
            return state
        return softmax(self.affine(state))


def softmax(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


@dataclass
class FuzzyOutput:
    """Probability vector over an ordered label vocabulary (simplex point)."""

    vocab: list
    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float).reshape(-1)
        if len(self.probs) != len(self.vocab):
            raise DimensionMismatch(
                f"{len(self.probs)} probs for {len(self.vocab)} labels"
            )
        if (self.probs < 0).any():
            raise ValueError("negative probability")
        if abs(float(self.probs.sum()) - 1.0) > 1e-9:
            raise ValueError(f"probs sum to {self.probs.sum()}, not 1")

    def argmax_label(self):
        return self.vocab[int(np.argmax(self.probs))]


def certainty(out: FuzzyOutput) -> float:
    """Maximum coordinate of the output probability vector."""
    return float(out.probs.max())


@dataclass
class FuzzyLinearLogicalGraph:
    """Crisp skeleton plus per-vertex simplex-product state spaces and
    per-arrow maps; the single sink carries the output simplex."""

    source: int
    out_arrows: dict[int, dict[str, int]]
    deciders: dict[int, AffineMap]
    arrow_maps: dict[tuple[int, str], ArrowMap]
    sink: int
    out_vocab: list
    state_spaces: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def validate(self):
        for (v, key), amap in self.arrow_maps.items():
            child = self.out_arrows[v][key]
            if amap.kind == "softmax-affine":
                if child != self.sink:
                    raise ValueError("softmax arrows must target the sink")
                if amap.affine.out_dim != len(self.out_vocab):
                    raise DimensionMismatch(
                        f"softmax arrow emits {amap.affine.out_dim} logits for "
                        f"{len(self.out_vocab)} labels"
                    )
        sink_space = self.state_spaces.get(self.sink)
        if sink_space != (len(self.out_vocab) - 1,):
            raise ValueError("sink state space must be one simplex S^(k-1)")
        return self


def compile_mlp_fuzzy(mlp: MlpSpec, discovery: DiscoveryConfig | None = None) -> FuzzyLinearLogicalGraph:
    """Compile a ReLU net with softmax head: crisp skeleton with the final
    decision layers collapsed into one sink; arrows into the sink apply
    softmax to the chamber-restricted logit map."""
    if mlp.head != "softmax":
        raise ValueError("compile_mlp_fuzzy requires a softmax head")
    crisp_spec = MlpSpec(layers=mlp.layers, input_dim=mlp.input_dim,
                         hidden_activation=mlp.hidden_activation, head="index-max")
    crisp = compile_mlp(crisp_spec, discovery)

    # the deepest crisp level (diff deciders) and the sinks collapse into a
    # single sink; arrows from the level above carry softmax of the
    # chamber-restricted logit map.
    hidden = mlp.layers[:-1]

    out_arrows: dict[int, dict[str, int]] = {}
    deciders: dict[int, AffineMap] = {}
    arrow_maps: dict[tuple[int, str], ArrowMap] = {}
    sink = -1

    def build(v, level, composed_pre):
        if level + 1 == len(hidden):
            # arrows of v go straight to the sink
            deciders[v] = composed_pre
            out_arrows[v] = {}
            for pat in crisp.out_arrows[v]:
                restricted = _restrict(composed_pre, pat, mlp.layers[-1])
                out_arrows[v][pat] = sink
                arrow_maps[(v, pat)] = ArrowMap("softmax-affine", restricted)
        else:
            deciders[v] = composed_pre
            out_arrows[v] = {}
            for pat, child in crisp.out_arrows[v].items():
                out_arrows[v][pat] = child
                arrow_maps[(v, pat)] = ArrowMap("identity")
                build(child, level + 1,
                      _restrict(composed_pre, pat, mlp.layers[level + 1]))

    if not hidden:
        # no hidden layers: single arrow from source to sink
        out_arrows[0] = {"": sink}
        arrow_maps[(0, "")] = ArrowMap("softmax-affine", mlp.layers[-1])
    else:
        build(crisp.source, 0, mlp.layers[0])

    state_spaces = {v: (1,) * mlp.input_dim for v in out_arrows}
    state_spaces[sink] = (mlp.num_labels - 1,)
    graph = FuzzyLinearLogicalGraph(
        source=crisp.source,
        out_arrows=out_arrows,
        deciders={v: d for v, d in deciders.items() if d is not None},
        arrow_maps=arrow_maps,
        sink=sink,
        out_vocab=list(range(mlp.num_labels)),
        state_spaces=state_spaces,
    )
    return graph.validate()


def evaluate_fuzzy(graph: FuzzyLinearLogicalGraph, x) -> FuzzyOutput:
    """Follow the crisp path and compose arrow maps along it."""
    x = np.asarray(x, dtype=float).reshape(-1)
    v = graph.source
    state = x
    while v != graph.sink:
        arrows = graph.out_arrows.get(v, {})
        if v in graph.deciders:
            key = sign_pattern(graph.deciders[v](state))
        elif len(arrows) == 1:
            key = next(iter(arrows))
        else:
            raise MissingArrow(f"vertex {v} has no decider and {len(arrows)} arrows")
        if key not in arrows:
            raise MissingArrow(f"no arrow for pattern {key!r} at vertex {v}")
        state = graph.arrow_maps[(v, key)](state)
        v = arrows[key]
    return FuzzyOutput(vocab=list(graph.out_vocab), probs=state)


def graph_to_jsonable(graph: LinearLogicalGraph) -> dict:
    """Deterministic JSON-friendly form of a compiled graph."""
    return {
        "source": graph.source,
        "target_vocab": list(graph.target_vocab),
        "sinks": {str(v): label for v, label in sorted(graph.sinks.items())},
        "deciders": {
            str(v): {"weights": graph.deciders[v].weights.tolist(),
                     "bias": graph.deciders[v].bias.tolist()}
            for v in sorted(graph.deciders)
        },
        "arrows": [
            {"from": v, "key": key, "to": child}
            for v in sorted(graph.out_arrows)
            for key, child in sorted(graph.out_arrows[v].items())
        ],
    }
