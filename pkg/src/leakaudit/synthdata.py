"""Data generation for audits, plus the dataset CSV format.

A :class:`Dataset` holds labelled pairs ``(s, t)`` with ``s`` in {-1, +1}.  In
the representation setting ``t`` is real (shape ``(n,)`` or ``(n, q)``); in the
classification setting ``t`` is a symbol in ``1..d``.

The synthetic scenario draws ``S`` uniformly from {-1, +1}, ``U | S`` from
``N(S v0, I_p)`` and releases ``T``, the projection ``<U, v>`` truncated to
``[-r, r]``.  Only the projection is drawn, since ``<U, v> | S ~ N(S mu, 1)``
with ``mu = <v, v0>``.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import make_rng

__all__ = [
    "REPRESENTATION",
    "CLASSIFICATION",
    "Scenario",
    "Dataset",
    "Population",
    "DatasetFormatError",
    "sample_truncated_normal",
    "sample_dataset",
    "smooth_and_truncate",
    "make_population",
    "train_logistic_target",
    "build_membership_scenario",
    "build_feature_leakage_scenario",
    "read_dataset",
    "write_dataset",
]

REPRESENTATION = "representation"
CLASSIFICATION = "classification"

MAX_REJECTIONS = 1_000_000


class DatasetFormatError(ValueError):
    """Raised for unreadable dataset files; carries the 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Scenario:
    """Gaussian mixture observed through a linear classifier."""

    v0: np.ndarray
    v: np.ndarray
    r: float = 3.0
    seed: int = 0

    def __post_init__(self):
        v0 = np.asarray(self.v0, dtype=float).ravel()
        v = np.asarray(self.v, dtype=float).ravel()
        if v0.shape != v.shape or v0.size == 0:
            raise ValueError("v0 and v must be non-empty vectors of equal length")
        for name, vec in (("v0", v0), ("v", v)):
            if abs(np.linalg.norm(vec) - 1.0) > 1e-9:
                raise ValueError(f"{name} must be a unit vector")
        if not self.r > 0:
            raise ValueError("r must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "v", v)

    @classmethod
    def from_mu(cls, mu, p=2, r=3.0, seed=0):
        """Scenario with ``<v, v0> = mu``, using the first two coordinate axes."""
        if not -1.0 <= mu <= 1.0:
            raise ValueError("mu must lie in [-1, 1]")
        if p < 2:
            raise ValueError("p must be at least 2")
        v0 = np.zeros(p)
        v0[0] = 1.0
        v = np.zeros(p)
        v[0] = mu
        v[1] = math.sqrt(max(0.0, 1.0 - mu * mu))
        return cls(v0=v0, v=v, r=r, seed=seed)

    @property
    def p(self):
        return self.v0.size

    @property
    def mu(self):
        return float(np.dot(self.v, self.v0))

    def describe(self):
        return {"p": self.p, "mu": self.mu, "r": self.r, "seed": int(self.seed)}


@dataclass(frozen=True, eq=False)
class Dataset:
    s: np.ndarray
    t: np.ndarray
    setting: str = REPRESENTATION
    d: int | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.s)
        if s.ndim != 1 or s.size == 0:
            raise ValueError("empty dataset")
        if not np.all((s == 1) | (s == -1)):
            raise ValueError("s values must be -1 or +1")
        s = s.astype(np.int8)
        if self.setting == REPRESENTATION:
            t = np.asarray(self.t, dtype=float)
            if t.ndim not in (1, 2) or t.shape[0] != s.size:
                raise ValueError("t must have one row per sample")
            if not np.all(np.isfinite(t)):
                raise ValueError("t values must be finite")
        elif self.setting == CLASSIFICATION:
            t = np.asarray(self.t)
            if t.ndim != 1 or t.size != s.size:
                raise ValueError("t must have one symbol per sample")
            if t.dtype.kind == "f":
                if not np.all(t == np.round(t)):
                    raise ValueError("classification symbols must be integers")
            t = t.astype(np.int64)
            if self.d is None or self.d < 1:
                raise ValueError("classification datasets need a positive alphabet size d")
            if t.min() < 1 or t.max() > self.d:
                raise ValueError(f"symbols must lie in 1..{self.d}")
        else:
            raise ValueError(f"unknown setting {self.setting!r}")
        s.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)

    def __len__(self):
        return self.s.size

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.setting == other.setting
            and self.d == other.d
            and np.array_equal(self.s, other.s)
            and self.t.shape == other.t.shape
            and np.array_equal(self.t, other.t)
        )

    @property
    def n(self):
        return self.s.size

    @property
    def inputs(self):
        """Inputs as an ``(n, q)`` float array (representation setting)."""
        return self.t.reshape(self.n, -1).astype(float, copy=False)

    def pairs(self):
        return list(zip(self.s.tolist(), self.t.tolist()))


@dataclass(frozen=True, eq=False)
class Population:
    """Population records ``(x_i, y_i)`` with membership flags ``s_i``."""

    x: np.ndarray
    y: np.ndarray
    membership: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        y = np.asarray(self.y).ravel()
        m = np.asarray(self.membership).ravel()
        if x.shape[0] != y.size or m.size != y.size:
            raise ValueError("x, y and membership must have one row per record")
        for name, arr in (("y", y), ("membership", m)):
            if not np.all((arr == 1) | (arr == -1)):
                raise ValueError(f"{name} entries must be -1 or +1")
        if not (np.any(m == 1) and np.any(m == -1)):
            raise ValueError("membership needs at least one member and one non-member")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y.astype(np.int8))
        object.__setattr__(self, "membership", m.astype(np.int8))

    @property
    def size(self):
        return self.y.size


def sample_truncated_normal(rng, mean, r, max_rejections=MAX_REJECTIONS):
    """Draw ``N(mean, 1)`` truncated to ``[-r, r]`` elementwise, by rejection.

    ``mean`` is an array; one draw per entry.  Raises ``RuntimeError`` if any
    entry sees ``max_rejections`` consecutive rejections.
    """
    mean = np.asarray(mean, dtype=float)
    out = mean + rng.standard_normal(mean.shape)
    bad = np.flatnonzero(np.abs(out) > r)
    tries = 0
    while bad.size:
        tries += 1
        if tries >= max_rejections:
            raise RuntimeError(
                f"truncated sampler rejected {max_rejections} consecutive draws; "
                "the truncation window has negligible mass"
            )
        redraw = mean.flat[bad] + rng.standard_normal(bad.size)
        out.flat[bad] = redraw
        bad = bad[np.abs(redraw) > r]
    return out


def sample_dataset(scn, n, stream=0):
    """Draw ``n`` i.i.d. pairs ``(S, T)`` from the scenario.

    Deterministic in ``(scn.seed, stream)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = make_rng(scn.seed, 0, stream)
    s = np.where(rng.random(n) < 0.5, -1, 1).astype(np.int8)
    t = sample_truncated_normal(rng, s * scn.mu, scn.r)
    meta = {
        "source": "synthetic-mixture",
        "scenario": "gaussian-mixture",
        "scenario_params": scn.describe(),
        "stream": stream,
    }
    return Dataset(s=s, t=t, setting=REPRESENTATION, metadata=meta)


def smooth_and_truncate(values, gamma, r, seed, stream=0):
    """Add ``N(0, gamma^2)`` noise to each value and truncate to ``[-r, r]``.

    Each output is redrawn until it lands in the window, so it follows the
    noisy value's law conditioned on ``[-r, r]``.  The result has smooth,
    strictly positive densities on a common compact support.
    """
    if not gamma > 0 or not r > 0:
        raise ValueError("gamma and r must be positive")
    x = np.asarray(values, dtype=float)
    rng = make_rng(seed, 1, stream)
    out = x.copy()
    pending = np.arange(x.size)
    tries = 0
    while pending.size:
        if tries >= MAX_REJECTIONS:
            raise RuntimeError("smooth_and_truncate: value too far outside [-r, r] for this gamma")
        tries += 1
        draw = x.flat[pending] + gamma * rng.standard_normal(pending.size)
        ok = np.abs(draw) <= r
        out.flat[pending[ok]] = draw[ok]
        pending = pending[~ok]
    return out


def make_population(size, p, n_members, seed, label_noise=0.0):
    """Synthetic population for membership experiments.

    Features are standard Gaussian, labels come from a random linear rule
    (flipped with probability ``label_noise``), and ``n_members`` records
    chosen at random are flagged as training members.
    """
    if not 0 < n_members < size:
        raise ValueError("need 0 < n_members < size")
    rng = make_rng(seed, 2)
    x = rng.standard_normal((size, p))
    w = rng.standard_normal(p)
    y = np.where(x @ w >= 0, 1, -1)
    flip = rng.random(size) < label_noise
    y = np.where(flip, -y, y)
    membership = -np.ones(size, dtype=np.int8)
    membership[rng.permutation(size)[:n_members]] = 1
    return Population(x=x, y=y, membership=membership)


def _sigma(z):
    return np.tanh(0.5 * z)


def logistic_loss(w, x, y):
    """Per-record loss ``log(1 + exp(-y w.x))`` of the target ``g(x) = sigma(w.x)``."""
    return np.logaddexp(0.0, -y * (x @ w))


def train_logistic_target(x, y, train_steps, learn_rate, seed):
    """Fit ``w`` by full-batch gradient descent on the mean logistic loss."""
    y = np.asarray(y, dtype=float)
    if np.all(y == y[0]):
        raise ValueError("degenerate training set: all members share one label")
    rng = make_rng(seed, 3)
    w = 0.01 * rng.standard_normal(x.shape[1])
    for _ in range(int(train_steps)):
        margin = y * (x @ w)
        # d/dw log(1 + e^{-m}) = -y x / (1 + e^{m})
        coef = -y * np.exp(-np.logaddexp(0.0, margin))
        w -= learn_rate * (x.T @ coef) / y.size
    return w


def build_membership_scenario(pop, train_steps=2000, learn_rate=0.5, seed=0):
    """Black-box membership attack sample from a freshly trained target.

    The target ``g(x) = sigma(w.x)`` is trained on member rows only; the attack
    sample pairs each record's membership flag with its confidence ``g(x_i)``.
    """
    members = pop.membership == 1
    w = train_logistic_target(pop.x[members], pop.y[members], train_steps, learn_rate, seed)
    conf = _sigma(pop.x @ w)
    member_loss = float(np.mean(logistic_loss(w, pop.x[members], pop.y[members])))
    other_loss = float(np.mean(logistic_loss(w, pop.x[~members], pop.y[~members])))
    meta = {
        "scenario": "membership-inference",
        "identification": "S=s_i, U=(x_i, y_i), T=g(x_i)",
        "target": "logistic regression, full-batch gradient descent",
        "target_weights": w.tolist(),
        "member_loss": member_loss,
        "nonmember_loss": other_loss,
        "seed": int(seed),
    }
    return Dataset(s=pop.membership, t=conf, setting=REPRESENTATION, metadata=meta)


def build_feature_leakage_scenario(scn, n, stream=0):
    """Protected attribute ``Z`` versus the released score ``g(X)``.

    Same draws as :func:`sample_dataset`; only the metadata differs.
    """
    ds = sample_dataset(scn, n, stream)
    meta = dict(ds.metadata)
    meta.update(
        scenario="feature-leakage",
        identification="S=Z, U=X, T=g(X)",
        demographic_parity=scn.mu == 0.0,
    )
    return Dataset(s=ds.s, t=ds.t, setting=ds.setting, d=ds.d, metadata=meta)


def _format_t(value, setting):
    if setting == CLASSIFICATION:
        return str(int(value))
    # repr of a float is the shortest string that round-trips exactly
    return repr(float(value))


def write_dataset(ds, path):
    """Write ``ds`` as CSV: header ``s,t`` (``s,t1,..,tq`` for vector inputs)."""
    t = ds.t
    vector = t.ndim == 2
    header = ["s"] + ([f"t{j + 1}" for j in range(t.shape[1])] if vector else ["t"])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(ds.n):
            row = t[i] if vector else (t[i],)
            writer.writerow([int(ds.s[i])] + [_format_t(v, ds.setting) for v in row])


def _looks_real(token):
    return any(ch in token for ch in ".eEnN")


def read_dataset(path, setting=None, d=None):
    """Read a dataset CSV.

    ``setting`` is inferred when omitted: integer-only ``t`` columns mean
    classification, with ``d`` defaulting to the largest symbol seen.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or all(not r for r in rows):
        raise DatasetFormatError("empty dataset")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "s" or len(header) < 2:
        raise DatasetFormatError("expected header 's,t'", line=1)
    width = len(header)
    s_vals, t_rows = [], []
    real_seen = False
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != width:
            raise DatasetFormatError(f"expected {width} fields, got {len(row)}", line=lineno)
        try:
            s = int(row[0])
        except ValueError:
            raise DatasetFormatError(f"s value {row[0]!r} is not an integer", line=lineno) from None
        if s not in (-1, 1):
            raise DatasetFormatError(f"s value {s} is not -1 or +1", line=lineno)
        try:
            vals = [float(tok) for tok in row[1:]]
        except ValueError:
            raise DatasetFormatError(f"t value in {row[1:]!r} is not numeric", line=lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise DatasetFormatError("t values must be finite", line=lineno)
        real_seen = real_seen or any(_looks_real(tok) for tok in row[1:])
        s_vals.append(s)
        t_rows.append(vals)
    if not s_vals:
        raise DatasetFormatError("empty dataset")
    t = np.asarray(t_rows, dtype=float)
    if width == 2:
        t = t[:, 0]
    if setting is None:
        setting = REPRESENTATION if (real_seen or width > 2) else CLASSIFICATION
    if setting == CLASSIFICATION:
        if width != 2:
            raise DatasetFormatError("classification datasets have a single t column")
        if d is None:
            d = int(t.max())
        try:
            return Dataset(s=np.array(s_vals), t=t, setting=setting, d=d)
        except ValueError as exc:
            raise DatasetFormatError(str(exc)) from None
    return Dataset(s=np.array(s_vals), t=t, setting=REPRESENTATION)
