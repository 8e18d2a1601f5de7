"""Multi-restart empirical risk minimisation over k-neuron networks.

Each restart draws its own initialisation and shuffles from the stream
``(seed, restart_index)``, trains for a fixed number of epochs, and keeps the
parameter snapshot with the lowest full-dataset loss seen after any epoch.
The overall result is the best snapshot across restarts (lowest index wins
ties), so it does not depend on how restarts are scheduled across threads.
"""

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .._rng import make_rng
from ..synthdata import REPRESENTATION
from . import kernels
from .kernels import ADAM, SGD
from .net import TwoLayerNet, _as_inputs, _fsum_mean, loss_code

__all__ = [
    "TrainConfig",
    "ErmResult",
    "VacuousCertificateWarning",
    "AllRestartsDivergedError",
    "init_net",
    "train_erm",
]

_TRAIN_STREAM = 7


class VacuousCertificateWarning(UserWarning):
    """k >= 2n: the network can interpolate the sample, so the certificate is vacuous."""


class AllRestartsDivergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    restarts: int = 10
    epochs: int = 30
    batch_size: int = 256
    optimizer: str = "adam"
    # None means min(1e-2, 0.1 / k): with Adam the output jitter grows like lr * k
    learn_rate: float | None = None
    adam_betas: tuple = (0.9, 0.999)
    # None means 0.5 / sqrt(k)
    init_scale: float | None = None
    seed: int = 0
    loss: str = "squared"

    def __post_init__(self):
        if self.restarts < 1 or self.epochs < 1 or self.batch_size < 1:
            raise ValueError("restarts, epochs and batch_size must be positive")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError("optimizer must be 'sgd' or 'adam'")
        if self.learn_rate is not None and not self.learn_rate > 0:
            raise ValueError("learn_rate must be positive")
        b1, b2 = self.adam_betas
        if not (0 < b1 < 1 and 0 < b2 < 1):
            raise ValueError("adam betas must lie in (0, 1)")
        object.__setattr__(self, "adam_betas", (float(b1), float(b2)))
        if self.init_scale is not None and not self.init_scale > 0:
            raise ValueError("init_scale must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        loss_code(self.loss)

    def lr_for(self, k):
        return self.learn_rate if self.learn_rate is not None else min(1e-2, 0.1 / k)

    def scale_for(self, k):
        return self.init_scale if self.init_scale is not None else 0.5 / math.sqrt(k)

    def to_dict(self):
        return {
            "restarts": self.restarts,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "optimizer": self.optimizer,
            "learn_rate": self.learn_rate,
            "adam_betas": list(self.adam_betas),
            "init_scale": self.init_scale,
            "seed": int(self.seed),
            "loss": self.loss,
        }


@dataclass
class ErmResult:
    best_net: TwoLayerNet
    best_empirical_loss: float
    per_restart_losses: list
    best_restart_index: int
    diverged: list = field(default_factory=list)
    epoch_losses: list = field(default_factory=list)
    wall_seconds: float = 0.0


def init_net(k, q, scale, rng):
    """Random starting point: a, b ~ N(0, 1), c ~ N(0, scale^2), c0 = 0."""
    a = rng.standard_normal((k, q))
    b = rng.standard_normal(k)
    c = scale * rng.standard_normal(k)
    return TwoLayerNet(a=a, b=b, c0=0.0, c=c)


def _run_restart(X, s, k, cfg, index, table):
    rng = make_rng(cfg.seed, _TRAIN_STREAM, index)
    net = init_net(k, X.shape[1], cfg.scale_for(k), rng)
    AT = np.ascontiguousarray(net.a.T)
    b, c, c0 = net.b.copy(), net.c.copy(), np.array([net.c0])
    state = [np.zeros_like(AT), np.zeros_like(AT), np.zeros(k), np.zeros(k),
             np.zeros(k), np.zeros(k), np.zeros(1), np.zeros(1)]
    opt = ADAM if cfg.optimizer == "adam" else SGD
    kind = loss_code(cfg.loss)
    b1, b2 = cfg.adam_betas
    n = s.size
    step = 0
    best_loss = math.inf
    best = None
    history = []
    for _ in range(cfg.epochs):
        order = rng.permutation(n).astype(np.int64)
        step = table["train_epoch"](X, s, order, AT, b, c, c0, *state, step,
                                    cfg.batch_size, cfg.lr_for(k), b1, b2, opt, kind)
        h = table["predict"](X, AT, b, c, c0)
        loss = _fsum_mean(table["losses"](h, s, kind))
        history.append(loss)
        if not math.isfinite(loss):
            return math.inf, None, history, True
        if loss < best_loss:
            best_loss = loss
            best = (AT.T.copy(), b.copy(), float(c0[0]), c.copy())
    net = TwoLayerNet(a=best[0], b=best[1], c0=best[2], c=best[3])
    return best_loss, net, history, False


def train_erm(ds, k, cfg=TrainConfig(), workers=1, backend=None):
    """Approximate the minimal empirical loss over k-neuron networks.

    Parameters
    ----------
    ds : Dataset
        Representation-setting sample.
    k : int
        Hidden-layer width.
    cfg : TrainConfig
    workers : int
        Threads used to run restarts concurrently.  Results are identical for
        any value.
    backend : {'numba', 'numpy'}, optional
        Kernel implementation; defaults to the ``LEAKAUDIT_BACKEND`` setting.

    Returns
    -------
    ErmResult
    """
    if ds.setting != REPRESENTATION:
        raise ValueError("train_erm needs a representation-setting dataset")
    if k < 1:
        raise ValueError("k must be positive")
    if k >= 2 * ds.n:
        warnings.warn(
            f"k={k} >= 2n={2 * ds.n}: the network can memorise the sample and the "
            "resulting lower bound is vacuous",
            VacuousCertificateWarning,
            stacklevel=2,
        )
    table = kernels.get_kernels(backend)
    X = _as_inputs(TwoLayerNet.zeros(1, ds.inputs.shape[1]), ds.inputs)
    s = ds.s.astype(float)
    start = time.perf_counter()

    def job(index):
        return _run_restart(X, s, k, cfg, index, table)

    if workers > 1 and cfg.restarts > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(job, range(cfg.restarts)))
    else:
        runs = [job(i) for i in range(cfg.restarts)]

    losses = [r[0] for r in runs]
    diverged = [i for i, r in enumerate(runs) if r[3]]
    if len(diverged) == cfg.restarts:
        raise AllRestartsDivergedError("every restart produced a non-finite loss")
    best_index = min(range(cfg.restarts), key=lambda i: (losses[i], i))
    return ErmResult(
        best_net=runs[best_index][1],
        best_empirical_loss=losses[best_index],
        per_restart_losses=losses,
        best_restart_index=best_index,
        diverged=diverged,
        epoch_losses=[r[2] for r in runs],
        wall_seconds=time.perf_counter() - start,
    )
