import math
import warnings

import numpy as np
import pytest

from leakaudit.adversary import (
    AllRestartsDivergedError,
    TrainConfig,
    TwoLayerNet,
    VacuousCertificateWarning,
    empirical_loss,
    forward,
    gradient,
    load_net,
    predict,
    save_net,
    train_erm,
)
from leakaudit.adversary.kernels import get_kernels
from leakaudit.selftest import finite_difference_gradient, gradient_check
from leakaudit.synthdata import Dataset, Scenario, sample_dataset

BACKENDS = ["numba", "numpy"]


def _unit_net():
    return TwoLayerNet(a=[[2.0]], b=[0.0], c0=0.0, c=[1.0])


def test_forward_examples():
    net = _unit_net()
    assert forward(net, 0.0) == 0.0
    assert forward(net, 1.0) == pytest.approx(0.7615941559557649, rel=1e-15)
    assert forward(TwoLayerNet.zeros(5, 3), [1.0, -2.0, 0.5]) == 0.0
    with pytest.raises(ValueError):
        forward(TwoLayerNet.zeros(2, 3), [1.0, 2.0])


def test_net_rejects_non_finite():
    with pytest.raises(ValueError):
        TwoLayerNet(a=[[1.0]], b=[np.inf], c0=0.0, c=[1.0])
    with pytest.raises(ValueError):
        TwoLayerNet(a=[[1.0]], b=[0.0, 1.0], c0=0.0, c=[1.0])


@pytest.mark.parametrize("backend", BACKENDS)
def test_predict_matches_exact_forward(backend):
    rng = np.random.default_rng(1)
    net = TwoLayerNet(a=rng.normal(size=(7, 2)), b=rng.normal(size=7), c0=0.3,
                      c=rng.normal(size=7))
    X = rng.uniform(-4, 4, size=(50, 2))
    exact = np.array([forward(net, x) for x in X])
    assert np.max(np.abs(predict(net, X, backend) - exact)) < 1e-13


@pytest.mark.parametrize("backend", BACKENDS)
def test_sigma_kernel_accuracy(backend):
    z = np.linspace(-60, 60, 100_001)
    out = get_kernels(backend)["sigma"](z)
    assert np.max(np.abs(out - np.tanh(0.5 * z))) < 1e-14


@pytest.mark.parametrize("backend", BACKENDS)
def test_zero_net_squared_loss_is_one(backend):
    ds = sample_dataset(Scenario.from_mu(0.3), 777)
    assert empirical_loss(TwoLayerNet.zeros(4), ds, backend=backend) == 1.0


def test_hand_computed_loss():
    net = _unit_net()
    ds = Dataset(s=[1, -1, 1], t=[1.0, 0.0, -1.0])
    th = math.tanh(1.0)
    hand = ((1 - th) ** 2 + (-1 - 0.0) ** 2 + (1 + th) ** 2) / 3
    assert empirical_loss(net, ds) == pytest.approx(hand, rel=1e-15)


def test_log_loss_squashing():
    ds = Dataset(s=[1, -1], t=[0.0, 0.0])
    # zero output maps to p = 1/2 for both labels
    assert empirical_loss(TwoLayerNet.zeros(1), ds, "log") == pytest.approx(math.log(2.0))
    big = TwoLayerNet(a=[[0.0]], b=[0.0], c0=5.0, c=[0.0])
    value = empirical_loss(big, Dataset(s=[1], t=[0.0]), "log")
    assert 0.0 <= value < 1e-5


def test_memorizer_has_zero_loss():
    net = TwoLayerNet(a=[[0.0]], b=[0.0], c0=1.0, c=[0.0])
    assert empirical_loss(net, Dataset(s=[1, 1], t=[0.3, -2.0])) == 0.0


@pytest.mark.parametrize("backend", BACKENDS)
def test_gradient_zero_net(backend):
    g = gradient(TwoLayerNet.zeros(1), ([[0.0]], [1]), backend=backend)
    assert g.c0 == pytest.approx(-2.0)
    net = TwoLayerNet(a=[[1.0], [2.0]], b=[0.5, -0.5], c0=0.2, c=[0.0, 0.0])
    g = gradient(net, ([[0.3], [1.2]], [1, -1]), backend=backend)
    assert np.all(g.a == 0) and np.all(g.b == 0)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("loss", ["squared", "log"])
def test_gradient_against_finite_differences(backend, loss):
    result = gradient_check(trials=100, seed=3, backend=backend, loss=loss)
    assert result.passed, result.detail


def test_random_k4_gradient():
    rng = np.random.default_rng(4)
    net = TwoLayerNet(a=rng.normal(size=(4, 1)), b=rng.normal(size=4), c0=0.1,
                      c=rng.normal(size=4) * 0.3)
    X, s = rng.uniform(-3, 3, size=(9, 1)), np.where(rng.random(9) < 0.5, -1, 1)
    g = gradient(net, (X, s)).flat()
    fd = finite_difference_gradient(net, X, s, step=1e-6)
    assert np.max(np.abs(g - fd)) / np.max(np.abs(fd)) < 1e-5


def test_backends_agree_on_gradient():
    rng = np.random.default_rng(5)
    net = TwoLayerNet(a=rng.normal(size=(16, 2)), b=rng.normal(size=16), c0=0.0,
                      c=rng.normal(size=16))
    X, s = rng.normal(size=(300, 2)), np.where(rng.random(300) < 0.5, -1, 1)
    a = gradient(net, (X, s), backend="numba").flat()
    b = gradient(net, (X, s), backend="numpy").flat()
    assert np.max(np.abs(a - b)) < 1e-12


def test_json_round_trip(tmp_path):
    rng = np.random.default_rng(6)
    net = TwoLayerNet(a=rng.normal(size=(9, 2)), b=rng.normal(size=9), c0=-0.7,
                      c=rng.normal(size=9) / 3)
    path = tmp_path / "net.json"
    save_net(net, path)
    back = load_net(path)
    X = rng.normal(size=(40, 2))
    ref = predict(net, X, "numpy")
    assert np.max(np.abs(predict(back, X, "numpy") - ref) / np.maximum(np.abs(ref), 1e-300)) <= 1e-15
    assert np.array_equal(back.flat(), net.flat())


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(restarts=0)
    with pytest.raises(ValueError):
        TrainConfig(optimizer="rmsprop")
    with pytest.raises(ValueError):
        TrainConfig(adam_betas=(0.9, 1.0))
    with pytest.raises(ValueError):
        TrainConfig(loss="hinge")


@pytest.fixture(scope="module")
def mixture_sample():
    return sample_dataset(Scenario.from_mu(0.5, seed=21), 20_000)


def test_erm_result_structure(mixture_sample):
    res = train_erm(mixture_sample, 32, TrainConfig(restarts=3, epochs=8, seed=9))
    assert res.best_empirical_loss == min(res.per_restart_losses)
    assert res.per_restart_losses[res.best_restart_index] == res.best_empirical_loss
    assert res.best_net.k == 32
    assert empirical_loss(res.best_net, mixture_sample) == pytest.approx(res.best_empirical_loss, abs=1e-12)


def test_erm_close_to_optimal_predictor(mixture_sample):
    res = train_erm(mixture_sample, 32, TrainConfig(restarts=3, epochs=15, seed=2))
    t, s = mixture_sample.t, mixture_sample.s
    eta_loss = math.fsum(((s - np.tanh(0.5 * t)) ** 2).tolist()) / t.size
    assert res.best_empirical_loss <= eta_loss + 0.005


def test_restart_prefix_property(mixture_sample):
    cfg = TrainConfig(restarts=3, epochs=4, seed=17)
    three = train_erm(mixture_sample, 16, cfg)
    one = train_erm(mixture_sample, 16, TrainConfig(restarts=1, epochs=4, seed=17))
    assert one.per_restart_losses[0] == three.per_restart_losses[0]
    assert three.best_empirical_loss <= one.best_empirical_loss


def test_training_is_schedule_independent(mixture_sample):
    cfg = TrainConfig(restarts=3, epochs=3, seed=5)
    serial = train_erm(mixture_sample, 16, cfg, workers=1)
    threaded = train_erm(mixture_sample, 16, cfg, workers=3)
    assert serial.per_restart_losses == threaded.per_restart_losses
    assert np.array_equal(serial.best_net.flat(), threaded.best_net.flat())


@pytest.mark.parametrize("optimizer", ["sgd", "adam"])
@pytest.mark.parametrize("backend", BACKENDS)
def test_training_reduces_loss(mixture_sample, optimizer, backend):
    cfg = TrainConfig(restarts=1, epochs=3, optimizer=optimizer, seed=1,
                      learn_rate=0.05 if optimizer == "sgd" else None)
    res = train_erm(mixture_sample, 8, cfg, backend=backend)
    assert res.best_empirical_loss < 0.95


def test_backends_train_alike(mixture_sample):
    cfg = TrainConfig(restarts=1, epochs=2, seed=3)
    a = train_erm(mixture_sample, 8, cfg, backend="numba").best_empirical_loss
    b = train_erm(mixture_sample, 8, cfg, backend="numpy").best_empirical_loss
    assert a == pytest.approx(b, abs=1e-9)


def test_log_loss_training(mixture_sample):
    res = train_erm(mixture_sample, 8, TrainConfig(restarts=1, epochs=3, loss="log", seed=4))
    assert res.best_empirical_loss < math.log(2.0)


def test_divergence_is_reported(mixture_sample):
    cfg = TrainConfig(restarts=2, epochs=2, optimizer="sgd", learn_rate=1e200, seed=0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(AllRestartsDivergedError):
            train_erm(mixture_sample, 4, cfg)


def test_vacuous_warning():
    ds = sample_dataset(Scenario.from_mu(0.1), 10)
    with pytest.warns(VacuousCertificateWarning):
        train_erm(ds, 20, TrainConfig(restarts=1, epochs=1))
