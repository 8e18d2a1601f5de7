"""Turn an adversary's minimal empirical loss into a certified lower bound.

The certificate is ``empirical_loss - epsilon``, floored at zero, where
``epsilon`` comes from the bound matching the setting and loss.  With
probability at least ``1 - delta`` over the sample, no predictor whatsoever
achieves a true loss below it.

Verdicts compare the certificate with a user threshold; that threshold is
policy, not part of the guarantee.
"""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import analytic
from .adversary import TrainConfig, train_erm
from .finitealpha import JointHistogram, histogram, min_empirical_loss_classification
from .synthdata import CLASSIFICATION, REPRESENTATION, Scenario

__all__ = [
    "LEAKAGE_BOUNDED",
    "LEAKAGE_POSSIBLE",
    "EXIT_BOUNDED",
    "EXIT_ERROR",
    "EXIT_POSSIBLE",
    "AuditReport",
    "VerdictPolicy",
    "UnsupportedCombinationError",
    "default_policy",
    "certify_representation",
    "certify_classification",
    "reference_truth",
    "report_to_dict",
    "report_to_json",
    "write_report",
]

LEAKAGE_BOUNDED = "leakage-bounded"
LEAKAGE_POSSIBLE = "leakage-possible"

EXIT_BOUNDED = 0
EXIT_ERROR = 1
EXIT_POSSIBLE = 2

_SMOOTHNESS_CAVEAT = (
    "certificate assumes the class-conditional densities of T share a compact "
    "support and have a smooth ratio; this is not checked for ingested data"
)


class UnsupportedCombinationError(ValueError):
    pass


@dataclass(frozen=True)
class VerdictPolicy:
    threshold: float
    loss: str = "squared"

    def __post_init__(self):
        top = 1.0 if self.loss == "squared" else math.log(2.0)
        if not 0.0 <= self.threshold <= top:
            raise ValueError(f"threshold must lie in [0, {top}] for {self.loss} loss")

    def verdict(self, lower_bound):
        return LEAKAGE_BOUNDED if lower_bound >= self.threshold else LEAKAGE_POSSIBLE


def default_policy(loss="squared"):
    return VerdictPolicy(0.95 if loss == "squared" else 0.95 * math.log(2.0), loss)


@dataclass
class AuditReport:
    setting: str
    loss: str
    delta: float
    n: int
    empirical_loss: float
    epsilon_terms: dict
    certified_lower_bound: float
    verdict: str
    policy_threshold: float
    k: int | None = None
    c_eta: float | None = None
    diam: float | None = None
    d: int | None = None
    reference_true_loss: float | None = None
    metadata: dict = field(default_factory=dict)
    caveats: list = field(default_factory=list)

    @property
    def epsilon(self):
        return math.fsum(self.epsilon_terms.values())

    @property
    def exit_code(self):
        return EXIT_BOUNDED if self.verdict == LEAKAGE_BOUNDED else EXIT_POSSIBLE


def _finish(empirical, terms, policy):
    eps = math.fsum(terms.values())
    lower = max(0.0, empirical - eps)
    return lower, policy.verdict(lower)


def reference_truth(scn, spec=analytic.QuadratureSpec()):
    """Minimal true squared loss of a synthetic mixture scenario."""
    return analytic.minimal_true_loss(analytic.MixtureParams(scn.mu, scn.r), spec)


def _scenario_from(ds):
    params = ds.metadata.get("scenario_params")
    if not params:
        return None
    return Scenario.from_mu(params["mu"], p=max(2, params.get("p", 2)), r=params["r"],
                            seed=params.get("seed", 0))


def certify_representation(ds, k, cfg=TrainConfig(), c_eta=None, diam=None, delta=0.01,
                           policy=None, scenario=None, workers=1, backend=None):
    """Certify a lower bound on the minimal true squared loss from a real-valued sample.

    ``c_eta`` (Barron constant of the conditional mean) and ``diam`` (diameter
    of the support of ``T``) default to their exact values when the dataset
    comes from the synthetic mixture; otherwise they must be supplied and the
    report marks them as user-asserted.
    """
    if ds.setting != REPRESENTATION:
        raise ValueError("certify_representation needs a representation-setting dataset")
    if cfg.loss != "squared":
        raise UnsupportedCombinationError(
            "the representation-setting bound covers squared loss only"
        )
    policy = policy or default_policy("squared")
    scenario = scenario or _scenario_from(ds)
    provenance = {}
    if c_eta is None or diam is None:
        if scenario is None:
            raise ValueError("c_eta and diam are required for datasets without a known scenario")
        if c_eta is None:
            c_eta = analytic.barron_constant_tanh(scenario.mu)
            provenance["c_eta"] = "derived: |<v, v0>| for the mixture"
        if diam is None:
            diam = 2.0 * scenario.r
            provenance["diam"] = "derived: 2r"
    provenance.setdefault("c_eta", "user-asserted")
    provenance.setdefault("diam", "user-asserted")

    erm = train_erm(ds, k, cfg, workers=workers, backend=backend)
    b = analytic.BoundIngredients(delta=delta, n=ds.n, k=k, c_eta=c_eta, diam=diam)
    gen, inv_k, inv_sqrt_k = analytic.representation_bound_terms(b)
    terms = {"generalization": gen, "inverse_k": inv_k, "inverse_sqrt_k": inv_sqrt_k}
    lower, verdict = _finish(erm.best_empirical_loss, terms, policy)

    reference = reference_truth(scenario) if scenario is not None else None
    caveats = [] if scenario is not None else [_SMOOTHNESS_CAVEAT]
    metadata = {
        "source": ds.metadata.get("source", "ingested"),
        "scenario": ds.metadata.get("scenario"),
        "scenario_params": scenario.describe() if scenario is not None else None,
        "input_provenance": provenance,
        "train": cfg.to_dict(),
        "best_restart_index": erm.best_restart_index,
        "per_restart_losses": erm.per_restart_losses,
        "diverged_restarts": erm.diverged,
        "policy_note": "verdict threshold is policy, not theorem",
    }
    return AuditReport(
        setting=REPRESENTATION,
        loss="squared",
        delta=delta,
        n=ds.n,
        k=k,
        c_eta=float(c_eta),
        diam=float(diam),
        empirical_loss=erm.best_empirical_loss,
        epsilon_terms=terms,
        certified_lower_bound=lower,
        verdict=verdict,
        policy_threshold=policy.threshold,
        reference_true_loss=reference,
        metadata=metadata,
        caveats=caveats,
    )


def certify_classification(ds, d=None, delta=0.01, loss="squared", policy=None):
    """Certify a lower bound on the minimal true loss for a finite-alphabet sample."""
    if ds.setting != CLASSIFICATION:
        raise ValueError("certify_classification needs a classification-setting dataset")
    d = d or ds.d
    if d < ds.d:
        raise ValueError(f"d={d} is smaller than the dataset alphabet {ds.d}")
    policy = policy or default_policy(loss)
    hist = histogram(ds)
    if d > hist.d:
        # symbols that never occur still count toward the alphabet size
        counts = np.zeros((2, d), dtype=np.int64)
        counts[:, : hist.d] = hist.counts
        hist = JointHistogram(counts)
    empirical, _ = min_empirical_loss_classification(hist, loss)
    if loss == "squared":
        terms = {"classification": analytic.classification_sq_bound(delta, ds.n)}
    elif loss == "log":
        terms = {"classification": analytic.classification_log_bound(delta, ds.n, d)}
    else:
        raise ValueError(f"loss must be 'squared' or 'log', got {loss!r}")
    lower, verdict = _finish(empirical, terms, policy)
    return AuditReport(
        setting=CLASSIFICATION,
        loss=loss,
        delta=delta,
        n=ds.n,
        d=d,
        empirical_loss=empirical,
        epsilon_terms=terms,
        certified_lower_bound=lower,
        verdict=verdict,
        policy_threshold=policy.threshold,
        metadata={"source": ds.metadata.get("source", "ingested"),
                  "policy_note": "verdict threshold is policy, not theorem"},
    )


def report_to_dict(report):
    doc = asdict(report)
    doc["epsilon"] = report.epsilon
    return doc


def report_to_json(report):
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def write_report(report, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report_to_json(report))
