"""Feedforward and 1-D convolutional networks with exact backpropagation

Layers keep what their backward pass needs from the last forward call. The
network ends in a single logit; the probability is its logistic and the
loss is per-sample weighted binary cross-entropy averaged over the batch.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from pylandmark.common import ConfigError, NumericError


@dataclass(frozen=True)
class ConvBlock:
    n_filters: int
    kernel_len: int
    pool_len: int


@dataclass(frozen=True)
class CnnConfig:
    """Network topology; no conv blocks gives the plain feedforward net"""

    input_dim: int
    conv_blocks: tuple[ConvBlock, ...] = ()
    fc_sizes: tuple[int, ...] = (64, 32)

    def __post_init__(self):
        if self.flat_size <= 0:
            raise ConfigError(f"conv/pool stages leave nothing to flatten for input_dim={self.input_dim}: {self.conv_blocks}")

    @property
    def flat_size(self) -> int:
        length, channels = self.input_dim, 1
        for block in self.conv_blocks:
            length = (length - block.kernel_len + 1) // block.pool_len
            channels = block.n_filters
            if length <= 0:
                return 0
        return length * channels

    def to_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "conv_blocks": [[b.n_filters, b.kernel_len, b.pool_len] for b in self.conv_blocks],
            "fc_sizes": list(self.fc_sizes),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CnnConfig":
        return cls(int(data["input_dim"]), tuple(ConvBlock(*map(int, b)) for b in data["conv_blocks"]), tuple(int(s) for s in data["fc_sizes"]))


def default_cnn_config(input_dim: int) -> CnnConfig:
    """Two conv-pool blocks sized for 40 filterbank or 513 FFT inputs, then fc 64 -> fc 32 -> 1"""
    if input_dim == 40:
        return CnnConfig(40, (ConvBlock(16, 5, 2), ConvBlock(32, 3, 2)), (64, 32))
    if input_dim == 513:
        return CnnConfig(513, (ConvBlock(16, 9, 4), ConvBlock(32, 5, 4)), (64, 32))
    raise ConfigError(f"no default CNN topology for {input_dim}-dim input (expected 40 or 513)")


def default_mlp_config(input_dim: int) -> CnnConfig:
    return CnnConfig(input_dim, (), (128, 64))


class Layer:
    params: dict[str, np.ndarray]
    grads: dict[str, np.ndarray]

    def __init__(self):
        self.params = {}
        self.grads = {}

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dy: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class Conv1D(Layer):
    """Valid convolution, stride 1; x is (batch, in_channels, length)"""

    def __init__(self, in_channels: int, out_channels: int, kernel_len: int, rng: np.random.Generator):
        super().__init__()
        limit = np.sqrt(6.0 / (in_channels * kernel_len))
        self.params = {"W": rng.uniform(-limit, limit, (out_channels, in_channels, kernel_len)), "b": np.zeros(out_channels)}
        self._windows: np.ndarray | None = None
        self._in_len = 0

    def forward(self, x):
        self._in_len = x.shape[2]
        self._windows = sliding_window_view(x, self.params["W"].shape[2], axis=2)
        return np.einsum("bilk,oik->bol", self._windows, self.params["W"]) + self.params["b"][None, :, None]

    def backward(self, dy):
        w = self.params["W"]
        self.grads = {"W": np.einsum("bilk,bol->oik", self._windows, dy), "b": dy.sum(axis=(0, 2))}
        out_len = dy.shape[2]
        dx = np.zeros((dy.shape[0], w.shape[1], self._in_len))
        for k in range(w.shape[2]):
            dx[:, :, k : k + out_len] += np.einsum("bol,oi->bil", dy, w[:, :, k])
        return dx


class MaxPool1D(Layer):
    """Non-overlapping max pooling; a trailing remainder shorter than the pool is dropped"""

    def __init__(self, pool_len: int):
        super().__init__()
        self.pool_len = pool_len
        self._argmax: np.ndarray | None = None
        self._in_shape: tuple = ()

    def forward(self, x):
        b, c, length = x.shape
        out_len = length // self.pool_len
        self._in_shape = x.shape
        blocks = x[:, :, : out_len * self.pool_len].reshape(b, c, out_len, self.pool_len)
        self._argmax = blocks.argmax(axis=3)
        return np.take_along_axis(blocks, self._argmax[..., None], axis=3)[..., 0]

    def backward(self, dy):
        b, c, length = self._in_shape
        out_len = dy.shape[2]
        blocks = np.zeros((b, c, out_len, self.pool_len))
        np.put_along_axis(blocks, self._argmax[..., None], dy[..., None], axis=3)
        dx = np.zeros(self._in_shape)
        dx[:, :, : out_len * self.pool_len] = blocks.reshape(b, c, out_len * self.pool_len)
        return dx


class ReLU(Layer):
    def __init__(self):
        super().__init__()
        self._mask: np.ndarray | None = None

    def forward(self, x):
        self._mask = x > 0
        return x * self._mask

    def backward(self, dy):
        return dy * self._mask


class Flatten(Layer):
    def __init__(self):
        super().__init__()
        self._shape: tuple = ()

    def forward(self, x):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dy):
        return dy.reshape(self._shape)


class Dense(Layer):
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        super().__init__()
        limit = np.sqrt(6.0 / in_dim)
        self.params = {"W": rng.uniform(-limit, limit, (out_dim, in_dim)), "b": np.zeros(out_dim)}
        self._x: np.ndarray | None = None

    def forward(self, x):
        self._x = x
        return x @ self.params["W"].T + self.params["b"]

    def backward(self, dy):
        self.grads = {"W": dy.T @ self._x, "b": dy.sum(axis=0)}
        return dy @ self.params["W"]


def sigmoid(z: np.ndarray) -> np.ndarray:
    return np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))), np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))


def bce_loss(logits: np.ndarray, labels: np.ndarray, weights: np.ndarray | None = None) -> float:
    """Mean of -w [y log p + (1 - y) log(1 - p)] with p = sigmoid(logit)"""
    per_sample = np.logaddexp(0.0, logits) - labels * logits
    if weights is not None:
        per_sample = weights * per_sample
    return float(np.mean(per_sample))


def bce_grad(logits: np.ndarray, labels: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
    grad = sigmoid(logits) - labels
    if weights is not None:
        grad = weights * grad
    return grad / len(logits)


@dataclass
class Network:
    config: CnnConfig
    layers: list[Layer] = field(default_factory=list)

    @classmethod
    def build(cls, config: CnnConfig, rng: np.random.Generator) -> "Network":
        layers: list[Layer] = []
        channels = 1
        for block in config.conv_blocks:
            layers += [Conv1D(channels, block.n_filters, block.kernel_len, rng), ReLU(), MaxPool1D(block.pool_len)]
            channels = block.n_filters
        layers.append(Flatten())
        width = config.flat_size
        for size in config.fc_sizes:
            layers += [Dense(width, size, rng), ReLU()]
            width = size
        layers.append(Dense(width, 1, rng))
        return cls(config, layers)

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Logits (batch,) for inputs (batch, input_dim)"""
        out = np.asarray(x, dtype=np.float64)[:, None, :]
        for index, layer in enumerate(self.layers):
            out = layer.forward(out)
            if not np.all(np.isfinite(out)):
                raise NumericError(f"non-finite activations in layer {index} ({type(layer).__name__})", layer_index=index)
        return out[:, 0]

    def backward(self, dlogits: np.ndarray) -> None:
        grad = dlogits[:, None]
        for layer in reversed(self.layers):
            grad = layer.backward(grad)

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(self.forward(x))

    def parameters(self) -> list[tuple[str, np.ndarray]]:
        """(name, array) pairs in a fixed order; arrays are live references"""
        return [(f"layer{i}.{name}", layer.params[name]) for i, layer in enumerate(self.layers) for name in sorted(layer.params)]

    def gradients(self) -> list[np.ndarray]:
        return [layer.grads[name] for layer in self.layers for name in sorted(layer.params)]

    def get_state(self) -> dict[str, np.ndarray]:
        return {name: array.copy() for name, array in self.parameters()}

    def set_state(self, state: dict[str, np.ndarray]) -> None:
        for i, layer in enumerate(self.layers):
            for name in layer.params:
                layer.params[name] = np.array(state[f"layer{i}.{name}"], dtype=np.float64)


def nn_forward(network: Network, x: np.ndarray) -> np.ndarray:
    """Output probabilities"""
    return network.predict_proba(np.atleast_2d(x))


def nn_backward(network: Network, x: np.ndarray, labels: np.ndarray, weights: np.ndarray | None = None) -> list[np.ndarray]:
    """Gradients of the weighted BCE loss with respect to every parameter, in parameters() order"""
    x = np.atleast_2d(x)
    labels = np.atleast_1d(np.asarray(labels, dtype=np.float64))
    logits = network.forward(x)
    network.backward(bce_grad(logits, labels, weights))
    return network.gradients()
