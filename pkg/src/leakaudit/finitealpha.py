"""Finite-alphabet setting: ``T`` takes values in ``{1, ..., d}``.

Here every predictor ``h: [d] -> [-1, 1]`` is just a vector, so the minimal
empirical losses have closed forms: the empirical conditional mean for the
squared loss, and the plug-in conditional entropy for the log loss.

Count and probability tables have shape ``(2, d)``; row 0 is ``s = -1`` and
row 1 is ``s = +1``.  Column ``j`` holds symbol ``j + 1``.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .synthdata import CLASSIFICATION

__all__ = [
    "JointHistogram",
    "JointPMF",
    "histogram",
    "plugin_conditional_entropy",
    "tv_distance",
    "min_empirical_loss_classification",
    "empirical_loss_vector",
    "save_histogram",
    "load_histogram",
]


@dataclass(frozen=True, eq=False)
class JointHistogram:
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] != 2 or counts.shape[1] < 1:
            raise ValueError("counts must have shape (2, d)")
        if counts.dtype.kind == "f" and not np.all(counts == np.round(counts)):
            raise ValueError("counts must be integers")
        counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        if counts.sum() < 1:
            raise ValueError("histogram is empty")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n(self):
        return int(self.counts.sum())

    @property
    def d(self):
        return self.counts.shape[1]

    def pmf(self):
        return JointPMF(self.counts / self.n)

    def __eq__(self, other):
        if not isinstance(other, JointHistogram):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)


@dataclass(frozen=True, eq=False)
class JointPMF:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim == 1 and p.size % 2 == 0:
            p = p.reshape(2, -1)
        if p.ndim != 2 or p.shape[0] != 2:
            raise ValueError("probs must have shape (2, d)")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probs must be non-negative and sum to 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def d(self):
        return self.probs.shape[1]


def histogram(ds):
    """Joint counts of ``(s, t)`` for a classification dataset."""
    if ds.setting != CLASSIFICATION:
        raise ValueError("histogram needs a classification-setting dataset")
    t = np.asarray(ds.t, dtype=np.int64)
    if t.size == 0:
        raise ValueError("empty dataset")
    if t.min() < 1 or t.max() > ds.d:
        raise ValueError(f"symbol outside 1..{ds.d}")
    row = (np.asarray(ds.s) > 0).astype(np.int64)
    counts = np.zeros((2, ds.d), dtype=np.int64)
    np.add.at(counts, (row, t - 1), 1)
    return JointHistogram(counts)


def _probs(h):
    if isinstance(h, JointHistogram):
        return h.counts / h.n
    if isinstance(h, JointPMF):
        return h.probs
    raise TypeError("expected a JointHistogram or JointPMF")


def _xlogy_ratio(p, marg):
    # p * log(p / marg) with 0 log 0 = 0
    out = np.zeros_like(p)
    mask = p > 0
    out[mask] = p[mask] * np.log(p[mask] / np.broadcast_to(marg, p.shape)[mask])
    return out


def plugin_conditional_entropy(h):
    """``H(S | T)`` in nats of the given (empirical) joint distribution."""
    p = _probs(h)
    marg = p.sum(axis=0, keepdims=True)
    value = -math.fsum(_xlogy_ratio(p, marg).ravel().tolist())
    return min(max(value, 0.0), math.log(2.0))


def tv_distance(p, q):
    """Total variation ``(1/2) sum |p - q|``."""
    a, b = _probs(p), _probs(q)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return 0.5 * math.fsum(np.abs(a - b).ravel().tolist())


def empirical_loss_vector(h, vec, loss="squared"):
    """Empirical loss of the predictor ``t -> vec[t - 1]`` over histogram ``h``."""
    counts = h.counts.astype(float)
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (h.d,):
        raise ValueError(f"predictor must have length d={h.d}")
    if loss == "squared":
        per = counts[0] * (vec + 1.0) ** 2 + counts[1] * (vec - 1.0) ** 2
    elif loss == "log":
        # a zero count kills its term even where the log is infinite
        with np.errstate(divide="ignore", invalid="ignore"):
            pos = np.where(counts[1] > 0, counts[1] * np.log(vec), 0.0)
            neg = np.where(counts[0] > 0, counts[0] * np.log1p(-vec), 0.0)
        per = -(pos + neg)
    else:
        raise ValueError(f"loss must be 'squared' or 'log', got {loss!r}")
    return math.fsum(per.tolist()) / h.n


def min_empirical_loss_classification(h, loss="squared"):
    """Minimal empirical loss over all predictors on ``[d]`` and a minimiser.

    Returns ``(value, argmin)``.  For squared loss the minimiser is the
    empirical ``E[S | T = t]``; for log loss it is ``(1 + E[S | T = t]) / 2``
    and the value is the plug-in conditional entropy.  Unseen symbols get the
    neutral prediction (0, resp. 1/2) and contribute nothing.
    """
    counts = h.counts.astype(float)
    col = counts.sum(axis=0)
    seen = col > 0
    cond_mean = np.zeros(h.d)
    cond_mean[seen] = (counts[1, seen] - counts[0, seen]) / col[seen]
    if loss == "squared":
        # per-symbol residual: n_t (1 - m_t^2)
        value = math.fsum((col[seen] * (1.0 - cond_mean[seen] ** 2)).tolist()) / h.n
        return min(max(value, 0.0), 1.0), cond_mean
    if loss == "log":
        argmin = np.full(h.d, 0.5)
        argmin[seen] = 0.5 * (1.0 + cond_mean[seen])
        return plugin_conditional_entropy(h), argmin
    raise ValueError(f"loss must be 'squared' or 'log', got {loss!r}")


def save_histogram(h, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"d": h.d, "counts": h.counts.tolist()}, fh)
        fh.write("\n")


def load_histogram(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    h = JointHistogram(np.array(doc["counts"]))
    if h.d != int(doc["d"]):
        raise ValueError("histogram document has inconsistent d")
    return h
