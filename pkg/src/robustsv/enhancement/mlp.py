"""Fully connected regression network for spectral enhancement.

Hidden layers use tanh (or logistic), the output layer is linear. Inputs
and targets are normalized per dimension to zero mean / unit variance with
the statistics baked into the saved model, so callers always work in raw
log-magnitude space. Training is plain seeded minibatch SGD with momentum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..container import load_container, save_container

STD_FLOOR = 1e-6
ACTIVATIONS = ("tanh", "logistic")


class TrainingDivergedError(Exception):
    """Raised when the training loss stops being finite."""


@dataclass
class Normalizer:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray, chunk: int = 4096) -> "Normalizer":
        # accumulate in float64 chunks so a float32 training set never
        # spawns a full-size float64 temporary
        n, d = x.shape
        total = np.zeros(d)
        total_sq = np.zeros(d)
        for i in range(0, n, chunk):
            block = np.asarray(x[i:i + chunk], dtype=np.float64)
            total += block.sum(axis=0)
            total_sq += (block * block).sum(axis=0)
        mean = total / n
        var = np.maximum(total_sq / n - mean * mean, 0.0)
        return cls(mean, np.maximum(np.sqrt(var), STD_FLOOR))

    def apply(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) / self.std

    def apply_same_dtype(self, x: np.ndarray) -> np.ndarray:
        """Normalized copy in x's own dtype; avoids float64 blow-up."""
        out = x - self.mean.astype(x.dtype, copy=False)
        out /= self.std.astype(x.dtype, copy=False)
        return out

    def invert(self, x: np.ndarray) -> np.ndarray:
        return x * self.std + self.mean


@dataclass
class MlpModel:
    """Weights plus the normalization that makes them meaningful."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str
    in_norm: Normalizer
    out_norm: Normalizer
    loss_trace: list[float] = field(default_factory=list)

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]


def _act(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "tanh":
        return np.tanh(z)
    return 1.0 / (1.0 + np.exp(-z))


def _act_deriv(a: np.ndarray, activation: str) -> np.ndarray:
    if activation == "tanh":
        return 1.0 - a * a
    return a * (1.0 - a)


def init_params(layer_sizes: list[int], rng: np.random.Generator
                ) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Uniform init scaled by sqrt(6 / (fan_in + fan_out)); zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def forward_normalized(weights, biases, activation: str, xn: np.ndarray
                       ) -> list[np.ndarray]:
    """Layer activations for normalized input; last entry is the linear output."""
    acts = [xn]
    h = xn
    for i, (w, b) in enumerate(zip(weights, biases)):
        z = h @ w + b
        h = z if i == len(weights) - 1 else _act(z, activation)
        acts.append(h)
    return acts


def loss_and_grads(weights, biases, activation: str, xn: np.ndarray,
                   yn: np.ndarray):
    """Half-MSE loss (summed over dims, averaged over samples) and gradients."""
    acts = forward_normalized(weights, biases, activation, xn)
    err = acts[-1] - yn
    n = xn.shape[0]
    loss = 0.5 * float(np.sum(err * err)) / n
    grads_w = [None] * len(weights)
    grads_b = [None] * len(weights)
    delta = err / n
    for i in range(len(weights) - 1, -1, -1):
        grads_w[i] = acts[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ weights[i].T) * _act_deriv(acts[i], activation)
    return loss, grads_w, grads_b


def predict(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Map raw inputs to raw outputs through the stored normalizers."""
    xn = model.in_norm.apply(np.asarray(x, dtype=np.float64))
    out = forward_normalized(model.weights, model.biases, model.activation, xn)[-1]
    return model.out_norm.invert(out)


def train_mlp(x: np.ndarray, y: np.ndarray, hidden: tuple[int, ...],
              activation: str = "tanh", learning_rate: float = 0.01,
              momentum: float = 0.9, batch_size: int = 128, epochs: int = 10,
              seed: int = 0) -> MlpModel:
    """Train from scratch on (x, y); returns the model with its loss trace.

    The per-epoch loss is the average minibatch loss in normalized space.
    A non-finite loss aborts with TrainingDivergedError naming the epoch.
    """
    if activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}")
    # float32 sets train in float32 to halve the resident footprint;
    # anything else is promoted to float64
    x = np.asarray(x)
    y = np.asarray(y)
    if x.dtype != np.float32:
        x = np.asarray(x, dtype=np.float64)
    if y.dtype != np.float32:
        y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError("x and y must be 2-D with matching sample counts")
    if x.shape[0] == 0:
        raise ValueError("empty training set")
    in_norm = Normalizer.fit(x)
    out_norm = Normalizer.fit(y)
    xn_all = in_norm.apply_same_dtype(x)
    yn_all = out_norm.apply_same_dtype(y)
    del x, y

    rng = np.random.default_rng(seed)
    layer_sizes = [xn_all.shape[1], *hidden, yn_all.shape[1]]
    weights, biases = init_params(layer_sizes, rng)
    vel_w = [np.zeros_like(w) for w in weights]
    vel_b = [np.zeros_like(b) for b in biases]

    n = xn_all.shape[0]
    trace = []
    for epoch in range(epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, batch_size):
            sel = order[start:start + batch_size]
            loss, gw, gb = loss_and_grads(weights, biases, activation,
                                          xn_all[sel], yn_all[sel])
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}")
            epoch_loss += loss
            n_batches += 1
            for i in range(len(weights)):
                vel_w[i] = momentum * vel_w[i] - learning_rate * gw[i]
                vel_b[i] = momentum * vel_b[i] - learning_rate * gb[i]
                weights[i] = weights[i] + vel_w[i]
                biases[i] = biases[i] + vel_b[i]
        trace.append(epoch_loss / n_batches)
    return MlpModel(weights, biases, activation, in_norm, out_norm, trace)


def save_mlp(path, model: MlpModel) -> None:
    arrays = {
        "in_mean": model.in_norm.mean, "in_std": model.in_norm.std,
        "out_mean": model.out_norm.mean, "out_std": model.out_norm.std,
        "loss_trace": np.asarray(model.loss_trace, dtype=np.float64),
    }
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        arrays[f"w{i}"] = w
        arrays[f"b{i}"] = b
    meta = {"activation": model.activation, "n_layers": len(model.weights)}
    save_container(path, "mlp", arrays, meta)


def load_mlp(path) -> MlpModel:
    arrays, meta = load_container(path, "mlp")
    n_layers = int(meta["n_layers"])
    weights = [arrays[f"w{i}"] for i in range(n_layers)]
    biases = [arrays[f"b{i}"] for i in range(n_layers)]
    return MlpModel(
        weights, biases, meta["activation"],
        Normalizer(arrays["in_mean"], arrays["in_std"]),
        Normalizer(arrays["out_mean"], arrays["out_std"]),
        list(arrays["loss_trace"]),
    )
