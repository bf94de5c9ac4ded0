"""MLP Q-network with exact analytic gradients, optimizer, soft updates."""

import json
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class MlpSpec:
    input_dim: int
    hidden_dims: Tuple[int, ...] = (128, 128)
    output_dim: int = 7
    init_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hidden_dims", tuple(self.hidden_dims))
        dims = (self.input_dim, *self.hidden_dims, self.output_dim)
        if any(d <= 0 for d in dims):
            raise ValueError(f"all layer dims must be positive, got {dims}")

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.input_dim, *self.hidden_dims, self.output_dim)


class MLP:
    """Fully-connected ReLU network, float64 throughout.

    Weights use uniform fan-in initialization from a seeded RNG so runs
    are reproducible from the spec alone.
    """

    def __init__(self, spec: MlpSpec, init: bool = True):
        self.spec = spec
        dims = [spec.input_dim, *spec.hidden_dims, spec.output_dim]
        self.weights: List[np.ndarray] = []
        self.biases: List[np.ndarray] = []
        rng = np.random.default_rng(spec.init_seed)
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            if init:
                w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
                b = rng.uniform(-bound, bound, size=fan_out)
            else:
                w = np.zeros((fan_in, fan_out))
                b = np.zeros(fan_out)
            self.weights.append(w)
            self.biases.append(b)

    def copy(self) -> "MLP":
        clone = MLP(self.spec, init=False)
        clone.weights = [w.copy() for w in self.weights]
        clone.biases = [b.copy() for b in self.biases]
        return clone

    # -- parameter vector helpers (used by the finite-difference checks) --

    def get_flat(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b.ravel())
        return np.concatenate(parts)

    def set_flat(self, flat: np.ndarray) -> None:
        pos = 0
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            self.weights[i] = flat[pos:pos + w.size].reshape(w.shape).copy()
            pos += w.size
            self.biases[i] = flat[pos:pos + b.size].copy()
            pos += b.size
        if pos != flat.size:
            raise ValueError("flat vector length does not match architecture")


def forward(net: MLP, x: np.ndarray) -> np.ndarray:
    """Q-values for a batch (N, input_dim) or a single feature vector."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    h = x[None, :] if single else x
    if h.shape[1] != net.spec.input_dim:
        raise ValueError(
            f"feature dim {h.shape[1]} != input_dim {net.spec.input_dim}")
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        h = h @ w + b
        if i < last:
            h = np.maximum(h, 0.0)
    return h[0] if single else h


def _forward_cached(net: MLP, x: np.ndarray):
    acts = [x]
    pre = []
    last = len(net.weights) - 1
    h = x
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = h @ w + b
        pre.append(z)
        h = np.maximum(z, 0.0) if i < last else z
        acts.append(h)
    return acts, pre


def loss_and_grads(net: MLP, states: np.ndarray, actions: np.ndarray,
                   targets: np.ndarray, weights: np.ndarray):
    """Weighted half-squared TD loss, its exact gradients, and |TD| errors.

    loss = mean_i w_i * 0.5 * (Q(s_i, a_i) - y_i)^2
    """
    states = np.asarray(states, dtype=np.float64)
    actions = np.asarray(actions, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    n = states.shape[0]
    acts, pre = _forward_cached(net, states)
    q = acts[-1]
    qsa = q[np.arange(n), actions]
    err = qsa - targets
    loss = float(np.mean(weights * 0.5 * err ** 2))
    dq = np.zeros_like(q)
    dq[np.arange(n), actions] = weights * err / n
    g_w = [None] * len(net.weights)
    g_b = [None] * len(net.biases)
    delta = dq
    for i in range(len(net.weights) - 1, -1, -1):
        g_w[i] = acts[i].T @ delta
        g_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ net.weights[i].T) * (pre[i - 1] > 0)
    return loss, (g_w, g_b), np.abs(err)


class Optimizer:
    """Adaptive-moment optimizer (default) with a plain-SGD option."""

    def __init__(self, net: MLP, lr: float = 1e-3, method: str = "adam",
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        if lr <= 0:
            raise ValueError("learning rate must be strictly positive")
        if method not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {method!r}")
        self.lr = lr
        self.method = method
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        if method == "adam":
            self.m_w = [np.zeros_like(w) for w in net.weights]
            self.v_w = [np.zeros_like(w) for w in net.weights]
            self.m_b = [np.zeros_like(b) for b in net.biases]
            self.v_b = [np.zeros_like(b) for b in net.biases]

    def apply(self, net: MLP, grads) -> None:
        g_w, g_b = grads
        self.t += 1
        if self.method == "sgd":
            for i in range(len(net.weights)):
                net.weights[i] -= self.lr * g_w[i]
                net.biases[i] -= self.lr * g_b[i]
            return
        b1t = 1.0 - self.beta1 ** self.t
        b2t = 1.0 - self.beta2 ** self.t
        for i in range(len(net.weights)):
            for p, g, m, v in ((net.weights[i], g_w[i], self.m_w[i], self.v_w[i]),
                               (net.biases[i], g_b[i], self.m_b[i], self.v_b[i])):
                m *= self.beta1
                m += (1 - self.beta1) * g
                v *= self.beta2
                v += (1 - self.beta2) * g ** 2
                p -= self.lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)


def ddqn_targets(net: MLP, target_net: MLP, rewards: np.ndarray,
                 next_states: np.ndarray, gamma: float) -> np.ndarray:
    """y_i = r_i + gamma * Q_target(s', argmax_a Q_online(s', a)).

    Continuing task: every transition bootstraps, there are no terminals.
    """
    q_next_online = forward(net, next_states)
    best = np.argmax(q_next_online, axis=1)
    q_next_target = forward(target_net, next_states)
    n = next_states.shape[0]
    return np.asarray(rewards, dtype=np.float64) + gamma * q_next_target[np.arange(n), best]


def train_step(net: MLP, target_net: MLP, batch, importance_weights,
               opt: Optimizer, gamma: float):
    """One gradient update of the online net; the target net is untouched.

    ``batch`` is a (states, actions, rewards, next_states) tuple.
    Returns (loss, per-sample |TD| errors) for priority updates.
    """
    states, actions, rewards, next_states = batch
    targets = ddqn_targets(net, target_net, rewards, next_states, gamma)
    loss, grads, td = loss_and_grads(net, states, actions, targets,
                                     importance_weights)
    if not np.isfinite(loss):
        raise FloatingPointError(f"non-finite loss {loss} at optimizer step {opt.t}")
    opt.apply(net, grads)
    return loss, td


def soft_update(target_net: MLP, net: MLP, kappa: float) -> None:
    """Blend online parameters into the target: (1-kappa)*target + kappa*online."""
    if target_net.spec.shape != net.spec.shape:
        raise ValueError("architecture mismatch between target and online nets")
    for i in range(len(net.weights)):
        target_net.weights[i] *= (1.0 - kappa)
        target_net.weights[i] += kappa * net.weights[i]
        target_net.biases[i] *= (1.0 - kappa)
        target_net.biases[i] += kappa * net.biases[i]


# ---------------------------------------------------------------------------
# checkpoints: JSON with base-10 floats; repr round-trips float64 exactly
# ---------------------------------------------------------------------------

CHECKPOINT_VERSION = 1


def save_checkpoint(path, net: MLP, target_net: MLP, meta: dict = None) -> None:
    doc = {
        "format": "fhcomp.checkpoint",
        "version": CHECKPOINT_VERSION,
        "spec": {
            "input_dim": net.spec.input_dim,
            "hidden_dims": list(net.spec.hidden_dims),
            "output_dim": net.spec.output_dim,
            "init_seed": net.spec.init_seed,
        },
        "meta": meta or {},
        "theta": _params_to_lists(net),
        "theta_bar": _params_to_lists(target_net),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_checkpoint(path) -> Tuple[MLP, MLP, dict]:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != "fhcomp.checkpoint":
        raise ValueError(f"{path} is not a checkpoint file")
    spec = MlpSpec(doc["spec"]["input_dim"], tuple(doc["spec"]["hidden_dims"]),
                   doc["spec"]["output_dim"], doc["spec"]["init_seed"])
    net = MLP(spec, init=False)
    target = MLP(spec, init=False)
    _lists_to_params(net, doc["theta"])
    _lists_to_params(target, doc["theta_bar"])
    return net, target, doc.get("meta", {})


def _params_to_lists(net: MLP):
    return [{"w": w.tolist(), "b": b.tolist()}
            for w, b in zip(net.weights, net.biases)]


def _lists_to_params(net: MLP, layers) -> None:
    if len(layers) != len(net.weights):
        raise ValueError("checkpoint layer count does not match architecture")
    for i, layer in enumerate(layers):
        w = np.asarray(layer["w"], dtype=np.float64)
        b = np.asarray(layer["b"], dtype=np.float64)
        if w.shape != net.weights[i].shape or b.shape != net.biases[i].shape:
            raise ValueError("checkpoint parameter shapes do not match architecture")
        net.weights[i] = w
        net.biases[i] = b
