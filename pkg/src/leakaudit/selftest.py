"""Built-in property suites: gradient check, quadrature oracles, coverage.

Each suite returns a :class:`SuiteResult`; :func:`run_selftest` runs them all
and is what ``leakaudit selftest`` calls.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from . import analytic
from ._rng import make_rng
from .adversary import TrainConfig, TwoLayerNet, empirical_loss, gradient
from .audit import certify_representation
from .synthdata import Dataset, Scenario, sample_dataset

__all__ = [
    "SuiteResult",
    "finite_difference_gradient",
    "gradient_check",
    "quadrature_oracles",
    "coverage_study",
    "run_selftest",
]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def finite_difference_gradient(net, X, s, loss="squared", step=1e-5):
    """Central differences of the batch-mean loss, one parameter at a time."""
    ds = Dataset(s=s, t=X)
    theta = net.flat()
    out = np.empty_like(theta)
    for i in range(theta.size):
        up, dn = theta.copy(), theta.copy()
        up[i] += step
        dn[i] -= step
        f_up = empirical_loss(TwoLayerNet.from_flat(up, net.k, net.q), ds, loss, backend="numpy")
        f_dn = empirical_loss(TwoLayerNet.from_flat(dn, net.k, net.q), ds, loss, backend="numpy")
        out[i] = (f_up - f_dn) / (2.0 * step)
    return out


def _random_problem(rng, loss):
    k = int(rng.integers(1, 9))
    q = int(rng.integers(1, 4))
    m = int(rng.integers(1, 17))
    net = TwoLayerNet(a=rng.standard_normal((k, q)), b=rng.standard_normal(k),
                      c0=0.1 * rng.standard_normal(), c=0.3 * rng.standard_normal(k) / k)
    X = rng.uniform(-3.0, 3.0, size=(m, q))
    s = np.where(rng.random(m) < 0.5, -1, 1)
    return net, X, s


def gradient_check(trials=100, seed=0, tol=1e-5, backend=None, loss="squared"):
    """Backprop versus central differences on random small networks.

    The error of a trial is ``max|g - g_fd| / max(max|g_fd|, 1e-8)``.
    """
    rng = make_rng(seed, 101)
    worst = 0.0
    for _ in range(trials):
        net, X, s = _random_problem(rng, loss)
        g = gradient(net, (X, s), loss, backend=backend).flat()
        fd = finite_difference_gradient(net, X, s, loss)
        err = np.max(np.abs(g - fd)) / max(np.max(np.abs(fd)), 1e-8)
        worst = max(worst, float(err))
    return SuiteResult("gradient-check", worst < tol,
                       f"{trials} networks, max relative error {worst:.2e} (tol {tol:g})")


def quadrature_oracles(spec=analytic.QuadratureSpec()):
    """Closed-form identities the quadrature routines must reproduce."""
    checks = []
    ind = analytic.minimal_true_loss(analytic.MixtureParams(0.0), spec)
    checks.append(("true loss at mu=0", abs(ind - 1.0), 1e-8))
    # frozen 40-digit reference values
    checks.append(("Phi(3)", abs(analytic.std_normal_cdf(3.0) - 0.9986501019683699), 1e-15))
    true_01 = analytic.minimal_true_loss(analytic.MixtureParams(0.1), spec)
    checks.append(("true loss at mu=0.1", abs(true_01 - 0.9903573854487046), 1e-9))
    for mu in (0.01, 0.1, 1.0):
        rel = abs(analytic.barron_constant_numeric(mu, spec) - mu) / mu
        checks.append((f"Barron constant mu={mu:g}", rel, 1e-6))
    failed = [name for name, err, tol in checks if not err <= tol]
    worst = max(err / tol for _, err, tol in checks)
    detail = f"{len(checks)} identities, worst error/tolerance {worst:.2e}"
    if failed:
        detail += "; failed: " + ", ".join(failed)
    return SuiteResult("quadrature-oracles", not failed, detail)


def coverage_study(audits=500, n=5000, k=64, delta=0.05, mu_grid=(0.0, 0.1, 0.3, 0.6, 0.9),
                   cfg=None, seed=0, workers=1):
    """Count audits whose certificate exceeds the true minimal loss.

    Returns ``(violations, audits, records)`` where ``records`` holds
    ``(mu, lower_bound, true_loss)`` per audit.
    """
    cfg = cfg or TrainConfig(restarts=2, epochs=15)
    truth = {mu: analytic.minimal_true_loss(analytic.MixtureParams(mu)) for mu in mu_grid}
    records = []
    for i in range(audits):
        mu = mu_grid[i % len(mu_grid)]
        scn = Scenario.from_mu(mu, seed=seed)
        ds = sample_dataset(scn, n, stream=1000 + i)
        rep = certify_representation(ds, k, replace(cfg, seed=(int(seed) * 7919 + i) % 2**64),
                                     delta=delta, scenario=scn, workers=workers)
        records.append((mu, rep.certified_lower_bound, truth[mu]))
    violations = sum(1 for _, lb, tl in records if lb > tl)
    return violations, audits, records


def coverage_limit(audits, delta):
    """Allowed violation count: ``delta`` plus three binomial standard errors."""
    return audits * (delta + 3.0 * math.sqrt(delta * (1.0 - delta) / audits))


def run_selftest(quick=True, seed=0):
    """Run every suite; ``quick`` shrinks the coverage study to a smoke run."""
    results = [gradient_check(trials=100, seed=seed), quadrature_oracles()]
    audits = 25 if quick else 500
    v, total, _ = coverage_study(audits=audits, n=2000 if quick else 5000, k=16 if quick else 64,
                                 seed=seed)
    limit = coverage_limit(total, 0.05)
    results.append(SuiteResult("coverage", v <= limit,
                               f"{v}/{total} certificates above the true loss (limit {limit:.1f})"))
    return results
