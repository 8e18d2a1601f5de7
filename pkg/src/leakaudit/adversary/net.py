"""Two-layer networks ``h(x) = c0 + sum_i c_i * sigma(a_i . x + b_i)``.

``sigma(t) = (1 - e^{-t}) / (1 + e^{-t}) = tanh(t / 2)``.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .kernels import LOG, SQUARED

__all__ = [
    "TwoLayerNet",
    "NetGradient",
    "sigma",
    "loss_code",
    "forward",
    "predict",
    "empirical_loss",
    "gradient",
    "save_net",
    "load_net",
    "net_to_dict",
    "net_from_dict",
]

_LOSS_CODES = {"squared": SQUARED, "log": LOG}


def loss_code(loss):
    try:
        return _LOSS_CODES[loss]
    except KeyError:
        raise ValueError(f"loss must be 'squared' or 'log', got {loss!r}") from None


def sigma(t):
    """The network activation, ``tanh(t / 2)``."""
    return np.tanh(0.5 * np.asarray(t, dtype=float))


@dataclass(eq=False)
class TwoLayerNet:
    """Parameters of a k-neuron network on ``R^q``.

    ``a`` has shape ``(k, q)``; ``b`` and ``c`` have shape ``(k,)``.
    """

    a: np.ndarray
    b: np.ndarray
    c0: float
    c: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float, ndmin=2)
        b = np.array(self.b, dtype=float).ravel()
        c = np.array(self.c, dtype=float).ravel()
        if a.shape[0] != b.size or b.size != c.size or b.size < 1:
            raise ValueError("a, b and c must describe the same k >= 1 neurons")
        self.a, self.b, self.c = a, b, c
        self.c0 = float(self.c0)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))
                and math.isfinite(self.c0)):
            raise ValueError("network parameters must be finite")

    @classmethod
    def zeros(cls, k, q=1):
        return cls(a=np.zeros((k, q)), b=np.zeros(k), c0=0.0, c=np.zeros(k))

    @property
    def k(self):
        return self.b.size

    @property
    def q(self):
        return self.a.shape[1]

    def copy(self):
        return TwoLayerNet(a=self.a.copy(), b=self.b.copy(), c0=self.c0, c=self.c.copy())

    def flat(self):
        """All parameters as one vector ``[a.ravel(), b, c0, c]``."""
        return np.concatenate([self.a.ravel(), self.b, [self.c0], self.c])

    @classmethod
    def from_flat(cls, vec, k, q):
        vec = np.asarray(vec, dtype=float)
        na = k * q
        return cls(a=vec[:na].reshape(k, q), b=vec[na:na + k], c0=vec[na + k],
                   c=vec[na + k + 1:na + 2 * k + 1])

    def __call__(self, x):
        return forward(self, x)


@dataclass
class NetGradient:
    """Gradient with the same layout as :class:`TwoLayerNet`."""

    a: np.ndarray
    b: np.ndarray
    c0: float
    c: np.ndarray

    def flat(self):
        return np.concatenate([self.a.ravel(), self.b, [self.c0], self.c])


def _as_inputs(net, X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if net.q == 1 else X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != net.q:
        raise ValueError(f"input dimension {X.shape[-1]} does not match network q={net.q}")
    return np.ascontiguousarray(X)


def _raw(net):
    return (np.ascontiguousarray(net.a.T), net.b, net.c, np.array([net.c0]))


def forward(net, x):
    """Evaluate the network at a single input (scalar or length-q vector)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1 or x.size != net.q:
        raise ValueError(f"input dimension {x.size} does not match network q={net.q}")
    # exact reference evaluation; the kernels are checked against this
    return float(net.c0 + np.dot(net.c, sigma(net.a @ x + net.b)))


def predict(net, X, backend=None):
    """Network outputs for each row of ``X`` (``(n,)`` accepted when q == 1)."""
    X = _as_inputs(net, X)
    return kernels.get_kernels(backend)["predict"](X, *_raw(net))


def _fsum_mean(values):
    # correctly rounded sum, hence independent of summation order
    return math.fsum(values.tolist()) / values.size


def empirical_loss(net, ds, loss="squared", backend=None):
    """Mean loss of ``net`` over a representation-setting dataset."""
    kind = loss_code(loss)
    table = kernels.get_kernels(backend)
    h = table["predict"](_as_inputs(net, ds.inputs), *_raw(net))
    return _fsum_mean(table["losses"](h, ds.s.astype(float), kind))


def _batch_arrays(batch):
    if hasattr(batch, "inputs"):
        return batch.inputs, batch.s
    X, s = batch
    return X, np.asarray(s)


def gradient(net, batch, loss="squared", backend=None):
    """Exact gradient of the batch-mean loss with respect to every parameter.

    ``batch`` is a :class:`~leakaudit.synthdata.Dataset` or an ``(X, s)`` pair.
    """
    kind = loss_code(loss)
    X, s = _batch_arrays(batch)
    X = _as_inputs(net, X)
    s = np.asarray(s, dtype=float).ravel()
    if s.size == 0 or s.size != X.shape[0]:
        raise ValueError("batch must be non-empty with one label per input")
    AT, b, c, c0 = _raw(net)
    gAT = np.empty_like(AT)
    gb = np.empty(net.k)
    gc = np.empty(net.k)
    order = np.arange(s.size, dtype=np.int64)
    g0 = kernels.get_kernels(backend)["batch_grad"](
        X, s, order, 0, s.size, AT, b, c, c0, kind, gAT, gb, gc, np.empty(net.k), np.empty(net.k)
    )
    return NetGradient(a=gAT.T.copy(), b=gb, c0=float(g0), c=gc)


def net_to_dict(net):
    return {
        "k": net.k,
        "q": net.q,
        "a": net.a.tolist(),
        "b": net.b.tolist(),
        "c0": net.c0,
        "c": net.c.tolist(),
    }


def net_from_dict(doc):
    k, q = int(doc["k"]), int(doc["q"])
    net = TwoLayerNet(a=np.array(doc["a"], dtype=float).reshape(k, q), b=doc["b"],
                      c0=doc["c0"], c=doc["c"])
    if net.k != k:
        raise ValueError("network document has inconsistent k")
    return net


def save_net(net, path):
    """Write ``net`` as JSON; floats use shortest round-trip decimals."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(net_to_dict(net), fh)
        fh.write("\n")


def load_net(path):
    with open(path, encoding="utf-8") as fh:
        return net_from_dict(json.load(fh))
