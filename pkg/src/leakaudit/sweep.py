"""Loss-versus-separation sweep over the synthetic mixture.

For each ``mu`` on the grid: draw ``n`` samples, train the finite adversary,
and record the minimal true loss, the adversary's minimal empirical loss and
the certified lower bound.  Results go to CSV, JSON and an SVG chart.
"""

import csv
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .adversary import TrainConfig
from .audit import certify_representation
from .svgplot import line_chart
from .synthdata import Scenario, sample_dataset

__all__ = ["SweepConfig", "SweepRow", "CSV_FIELDS", "run_sweep", "write_sweep", "load_config"]

log = logging.getLogger(__name__)

DEFAULT_MU_GRID = (0.01, 0.02, 0.04, 0.06, 0.08, 0.1)
CSV_FIELDS = ("mu", "n", "k", "delta", "empirical_loss", "true_loss", "lower_bound", "ratio",
              "wall_seconds")


@dataclass(frozen=True)
class SweepConfig:
    mu_grid: tuple = DEFAULT_MU_GRID
    n: int = 100_000
    k: int = 1000
    delta: float = 0.01
    r: float = 3.0
    seed: int = 0
    train: TrainConfig = field(default_factory=TrainConfig)
    output_dir: str = "sweep-out"
    workers: int = 1
    # wall-clock columns break byte-identical output, so they are opt-in
    timing: bool = False

    def __post_init__(self):
        grid = tuple(float(m) for m in self.mu_grid)
        if not grid or any(not 0.0 <= m <= 1.0 for m in grid):
            raise ValueError("mu_grid must be a non-empty list of values in [0, 1]")
        object.__setattr__(self, "mu_grid", grid)
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    def to_dict(self):
        doc = {f.name: getattr(self, f.name) for f in fields(self)}
        doc["mu_grid"] = list(self.mu_grid)
        doc["train"] = self.train.to_dict()
        return doc


@dataclass
class SweepRow:
    mu: float
    n: int
    k: int
    delta: float
    empirical_loss: float
    true_loss: float
    lower_bound: float
    ratio: float
    wall_seconds: float


def _point_seed(master, index):
    ss = np.random.SeedSequence(int(master), spawn_key=(11, index))
    return int(ss.generate_state(1, np.uint64)[0])


def load_config(path, **overrides):
    """Read a JSON sweep config; keyword overrides win over file values."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    train = doc.pop("train", {}) or {}
    if "adam_betas" in train:
        train["adam_betas"] = tuple(train["adam_betas"])
    train_overrides = overrides.pop("train", {}) or {}
    train.update(train_overrides)
    doc.update({k: v for k, v in overrides.items() if v is not None})
    if "mu_grid" in doc:
        doc["mu_grid"] = tuple(doc["mu_grid"])
    return SweepConfig(train=TrainConfig(**train), **doc)


def run_point(cfg, index, mu):
    scn = Scenario.from_mu(mu, r=cfg.r, seed=cfg.seed)
    ds = sample_dataset(scn, cfg.n, stream=index)
    train = replace(cfg.train, seed=_point_seed(cfg.seed, index))
    start = time.perf_counter()
    report = certify_representation(ds, cfg.k, train, delta=cfg.delta, scenario=scn)
    wall = time.perf_counter() - start
    emp = report.empirical_loss
    row = SweepRow(
        mu=mu,
        n=cfg.n,
        k=cfg.k,
        delta=cfg.delta,
        empirical_loss=emp,
        true_loss=report.reference_true_loss,
        lower_bound=report.certified_lower_bound,
        ratio=report.certified_lower_bound / emp if emp > 0 else 0.0,
        wall_seconds=wall if cfg.timing else 0.0,
    )
    log.info("mu=%g empirical=%.6f true=%.6f lower=%.6f (%.1fs)", mu, emp, row.true_loss,
             row.lower_bound, wall)
    return row


def run_sweep(cfg):
    """One :class:`SweepRow` per grid value, in grid order.

    Grid points run on ``cfg.workers`` threads (the training kernels release
    the GIL).  Each point seeds itself from ``(cfg.seed, index)``, so the rows
    do not depend on the schedule.
    """
    jobs = list(enumerate(cfg.mu_grid))
    if cfg.workers <= 1 or len(jobs) == 1:
        return [run_point(cfg, i, mu) for i, mu in jobs]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(lambda job: run_point(cfg, *job), jobs))


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_sweep(cfg, rows, output_dir=None):
    """Write ``sweep.csv``, ``sweep.json`` and ``sweep.svg``; returns their paths."""
    out = output_dir or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    paths = {ext: os.path.join(out, f"sweep.{ext}") for ext in ("csv", "json", "svg")}
    with open(paths["csv"], "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for row in rows:
            writer.writerow([_fmt(getattr(row, name)) for name in CSV_FIELDS])
    doc = {"config": cfg.to_dict(), "rows": [asdict(r) for r in rows]}
    # neither affects the numbers; leaving them out keeps outputs comparable
    doc["config"].pop("output_dir", None)
    doc["config"].pop("workers", None)
    with open(paths["json"], "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    mus = [r.mu for r in rows]
    svg = line_chart(
        mus,
        [
            ("minimal true loss", [r.true_loss for r in rows]),
            ("minimal empirical loss", [r.empirical_loss for r in rows]),
            ("certified lower bound", [r.lower_bound for r in rows]),
        ],
        title=f"delta={cfg.delta:g}, k={cfg.k}, n={cfg.n}",
        xlabel="mu = <v, v0>",
        ylabel="squared loss",
    )
    with open(paths["svg"], "w", encoding="utf-8") as fh:
        fh.write(svg)
    return paths
