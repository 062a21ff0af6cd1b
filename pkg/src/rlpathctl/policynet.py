"""Dense softmax policy network, built from scratch on numpy.

Architecture is fixed at Dense(64, relu) -> Dense(64, relu) ->
Dense(out, softmax), trained one transition at a time with categorical
cross-entropy against a scaled one-hot target and Adam updates. All
math is float64; gradients are analytic and checked against central
finite differences in the test suite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-7
LOG_CLAMP = 1e-12

CHECKPOINT_FORMAT = "rlpathctl-checkpoint"
CHECKPOINT_VERSION = 1


class NumericError(Exception):
    """A non-finite value appeared where the math requires finite input."""


@dataclass(frozen=True)
class LayerSpec:
    in_dim: int
    out_dim: int
    activation: str  # "relu" | "softmax"

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise ValueError(f"non-positive layer dims {self.in_dim}x{self.out_dim}")
        if self.activation not in ("relu", "softmax"):
            raise ValueError(f"unknown activation {self.activation!r}")


class PolicyNet:
    """Weights/biases of the three dense layers plus Adam moment state.

    Weight matrices are (out_dim, in_dim); biases are (out_dim,). A net
    is single-writer: `train_step` needs exclusive access.
    """

    def __init__(self, layers, weights, biases, learning_rate=0.01, seed=None):
        layers = list(layers)
        for spec, w, b in zip(layers, weights, biases, strict=True):
            if w.shape != (spec.out_dim, spec.in_dim) or b.shape != (spec.out_dim,):
                raise ValueError(f"parameter shapes do not match layer spec {spec}")
        for prev, cur in zip(layers, layers[1:]):
            if prev.out_dim != cur.in_dim:
                raise ValueError("layer dims do not chain")
        if any(spec.activation == "softmax" for spec in layers[:-1]):
            raise ValueError("softmax is only allowed on the final layer")
        self.layers = layers
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        self.adam_m_w = [np.zeros_like(w) for w in self.weights]
        self.adam_v_w = [np.zeros_like(w) for w in self.weights]
        self.adam_m_b = [np.zeros_like(b) for b in self.biases]
        self.adam_v_b = [np.zeros_like(b) for b in self.biases]
        self.step_count = 0
        self.learning_rate = float(learning_rate)
        self.seed = seed

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim


def create_model(input_dim, output_dim, learning_rate=0.01, seed=None, *, rng=None) -> PolicyNet:
    """Build the 3-layer policy net with Glorot-uniform weights.

    Pass either `seed` (a fresh generator is created) or `rng` (draws
    come from the shared generator; init consumes draws layer by layer,
    weights only, biases start at zero).
    """
    if input_dim < 1:
        raise ValueError(f"input_dim must be >= 1, got {input_dim}")
    if output_dim < 2:
        raise ValueError(f"output_dim must be >= 2, got {output_dim}")
    if rng is None:
        rng = np.random.default_rng(seed)
    layers = [
        LayerSpec(input_dim, 64, "relu"),
        LayerSpec(64, 64, "relu"),
        LayerSpec(64, output_dim, "softmax"),
    ]
    weights = []
    biases = []
    for spec in layers:
        limit = np.sqrt(6.0 / (spec.in_dim + spec.out_dim))
        weights.append(rng.uniform(-limit, limit, size=(spec.out_dim, spec.in_dim)))
        biases.append(np.zeros(spec.out_dim))
    return PolicyNet(layers, weights, biases, learning_rate, seed)


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - np.max(z)
    e = np.exp(shifted)
    return e / np.sum(e)


def _forward_full(net: PolicyNet, state: np.ndarray):
    """Forward pass keeping pre-activations and activations for backprop."""
    x = np.asarray(state, dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise ValueError(f"state shape {x.shape} != ({net.input_dim},)")
    if not np.all(np.isfinite(x)):
        raise NumericError("non-finite state input")
    pre, act = [], [x]
    for spec, w, b in zip(net.layers, net.weights, net.biases):
        z = w @ act[-1] + b
        pre.append(z)
        act.append(np.maximum(z, 0.0) if spec.activation == "relu" else _softmax(z))
    return pre, act


def forward(net: PolicyNet, state) -> np.ndarray:
    """Softmax action probabilities for one state vector."""
    _, act = _forward_full(net, state)
    return act[-1]


def loss(probs: np.ndarray, target: np.ndarray) -> float:
    """Categorical cross-entropy; the target need not sum to 1."""
    p = np.maximum(np.asarray(probs, dtype=np.float64), LOG_CLAMP)
    return float(-np.sum(np.asarray(target, dtype=np.float64) * np.log(p)))


def make_target(num_nodes: int, node: int, reward: float) -> np.ndarray:
    target = np.zeros(num_nodes)
    target[node] = reward
    return target


def validate_target(target: np.ndarray, dim: int) -> np.ndarray:
    t = np.asarray(target, dtype=np.float64)
    if t.shape != (dim,):
        raise ValueError(f"target shape {t.shape} != ({dim},)")
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise ValueError("target entries must be finite and non-negative")
    if np.count_nonzero(t) > 1:
        raise ValueError("target may have at most one nonzero entry")
    return t


def adam_update(param, grad, m, v, step, lr):
    """One Adam step. Returns (new_param, new_m, new_v); inputs untouched.

    m <- b1*m + (1-b1)*g; v <- b2*v + (1-b2)*g^2; bias-corrected by
    1/(1-b^t); param <- param - lr * m_hat / (sqrt(v_hat) + eps).
    """
    if step < 1:
        raise ValueError("Adam step must be >= 1")
    g = np.asarray(grad, dtype=np.float64)
    new_m = ADAM_BETA1 * m + (1.0 - ADAM_BETA1) * g
    new_v = ADAM_BETA2 * v + (1.0 - ADAM_BETA2) * (g * g)
    m_hat = new_m / (1.0 - ADAM_BETA1**step)
    v_hat = new_v / (1.0 - ADAM_BETA2**step)
    new_param = param - lr * m_hat / (np.sqrt(v_hat) + ADAM_EPSILON)
    return new_param, new_m, new_v


def gradients(net: PolicyNet, state, target):
    """Analytic loss gradients; returns (grads_w, grads_b, loss).

    The gradient of -sum(t_i * log softmax(z)_i) at the logits is
    g = probs * sum(t) - t, then standard backprop through the relus.
    """
    t = validate_target(target, net.output_dim)
    pre, act = _forward_full(net, state)
    step_loss = loss(act[-1], t)

    delta = act[-1] * float(np.sum(t)) - t
    grads_w = [None] * len(net.layers)
    grads_b = [None] * len(net.layers)
    for k in range(len(net.layers) - 1, -1, -1):
        grads_w[k] = np.outer(delta, act[k])
        grads_b[k] = delta
        if k > 0:
            delta = (net.weights[k].T @ delta) * (pre[k - 1] > 0.0)
    for k, (gw, gb) in enumerate(zip(grads_w, grads_b)):
        if not (np.all(np.isfinite(gw)) and np.all(np.isfinite(gb))):
            raise NumericError(f"non-finite gradient in layer {k}")
    return grads_w, grads_b, step_loss


def train_step(net: PolicyNet, state, target) -> float:
    """One backprop + Adam update on every parameter; returns the
    pre-update loss."""
    grads_w, grads_b, step_loss = gradients(net, state, target)

    net.step_count += 1
    step = net.step_count
    lr = net.learning_rate
    for k in range(len(net.layers)):
        net.weights[k], net.adam_m_w[k], net.adam_v_w[k] = adam_update(
            net.weights[k], grads_w[k], net.adam_m_w[k], net.adam_v_w[k], step, lr
        )
        net.biases[k], net.adam_m_b[k], net.adam_v_b[k] = adam_update(
            net.biases[k], grads_b[k], net.adam_m_b[k], net.adam_v_b[k], step, lr
        )
    return step_loss


def save_checkpoint(net: PolicyNet, path) -> None:
    """Write a JSON checkpoint that round-trips bit-exactly."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "learning_rate": net.learning_rate,
        "seed": net.seed,
        "step_count": net.step_count,
        "layers": [
            {"in_dim": s.in_dim, "out_dim": s.out_dim, "activation": s.activation}
            for s in net.layers
        ],
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "adam_m_w": [m.tolist() for m in net.adam_m_w],
        "adam_v_w": [v.tolist() for v in net.adam_v_w],
        "adam_m_b": [m.tolist() for m in net.adam_m_b],
        "adam_v_b": [v.tolist() for v in net.adam_v_b],
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_checkpoint(path) -> PolicyNet:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"not a {CHECKPOINT_FORMAT} file: {path}")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc.get('version')}")
    layers = [LayerSpec(s["in_dim"], s["out_dim"], s["activation"]) for s in doc["layers"]]
    net = PolicyNet(
        layers,
        [np.array(w, dtype=np.float64) for w in doc["weights"]],
        [np.array(b, dtype=np.float64) for b in doc["biases"]],
        doc["learning_rate"],
        doc["seed"],
    )
    net.adam_m_w = [np.array(a, dtype=np.float64) for a in doc["adam_m_w"]]
    net.adam_v_w = [np.array(a, dtype=np.float64) for a in doc["adam_v_w"]]
    net.adam_m_b = [np.array(a, dtype=np.float64) for a in doc["adam_m_b"]]
    net.adam_v_b = [np.array(a, dtype=np.float64) for a in doc["adam_v_b"]]
    net.step_count = doc["step_count"]
    return net
