import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leakaudit.analytic import binary_entropy
from leakaudit.finitealpha import (
    JointHistogram,
    JointPMF,
    empirical_loss_vector,
    histogram,
    load_histogram,
    min_empirical_loss_classification,
    plugin_conditional_entropy,
    save_histogram,
    tv_distance,
)
from leakaudit.synthdata import CLASSIFICATION, Dataset

GRID = np.linspace(-1.0, 1.0, 201)


def _cls(pairs, d):
    s, t = zip(*pairs)
    return Dataset(s=list(s), t=list(t), setting=CLASSIFICATION, d=d)


def _hand_entropy(probs):
    # direct double sum, rows s=-1 / s=+1, columns t
    total = 0.0
    for j in range(probs.shape[1]):
        pt = probs[0][j] + probs[1][j]
        for i in range(2):
            if probs[i][j] > 0:
                total -= probs[i][j] * math.log(probs[i][j] / pt)
    return total


def test_histogram_counts():
    h = histogram(_cls([(1, 1), (-1, 2)], 2))
    assert h.n == 2
    assert h.counts.tolist() == [[0, 1], [1, 0]]


def test_histogram_is_order_invariant():
    pairs = [(1, 1), (-1, 2), (1, 3), (1, 1), (-1, 1)]
    assert histogram(_cls(pairs, 3)) == histogram(_cls(pairs[::-1], 3))


def test_histogram_rejects_bad_input():
    with pytest.raises(ValueError):
        JointHistogram(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        JointHistogram(np.array([[1, -1], [0, 0]]))
    with pytest.raises(ValueError):
        _cls([(1, 4)], 3)


@pytest.mark.parametrize(
    "probs, expected",
    [
        ([[0.25, 0.25], [0.25, 0.25]], math.log(2.0)),
        ([[0.0, 0.5], [0.5, 0.0]], 0.0),
        ([[0.1, 0.4], [0.4, 0.1]], binary_entropy(0.2)),
    ],
    ids=["independent", "deterministic", "noisy-channel"],
)
def test_plugin_entropy_tabulated(probs, expected):
    p = JointPMF(np.array(probs))
    value = plugin_conditional_entropy(p)
    assert value == pytest.approx(_hand_entropy(np.array(probs)), abs=1e-16)
    assert value == pytest.approx(expected, abs=1e-15)


def test_plugin_entropy_noisy_channel_reference():
    p = JointPMF(np.array([[0.1, 0.4], [0.4, 0.1]]))
    assert plugin_conditional_entropy(p) == pytest.approx(0.5004024235381879, abs=1e-15)


def test_tv_distance():
    p = JointPMF(np.array([0.5, 0.5, 0.0, 0.0]))
    q = JointPMF(np.array([0.25, 0.25, 0.25, 0.25]))
    assert tv_distance(p, p) == 0.0
    # half of 4 * 0.25
    assert tv_distance(p, q) == pytest.approx(0.5)
    assert tv_distance(p, q) == tv_distance(q, p)
    assert tv_distance(p, JointPMF(np.array([0.0, 0.0, 0.5, 0.5]))) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        tv_distance(p, JointPMF(np.full(6, 1 / 6)))


def test_pmf_validation():
    with pytest.raises(ValueError):
        JointPMF(np.array([[0.5, 0.5], [0.5, 0.5]]))


def test_deterministic_histogram_has_zero_loss():
    h = JointHistogram(np.array([[0, 50], [50, 0]]))
    for loss in ("squared", "log"):
        value, _ = min_empirical_loss_classification(h, loss)
        assert value == 0.0


def test_unseen_symbols_get_neutral_prediction():
    h = JointHistogram(np.array([[3, 0, 1], [1, 0, 3]]))
    _, sq = min_empirical_loss_classification(h, "squared")
    _, lg = min_empirical_loss_classification(h, "log")
    assert sq[1] == 0.0 and lg[1] == 0.5
    assert sq[0] == pytest.approx(-0.5) and lg[2] == pytest.approx(0.75)


def _brute_force(h):
    c = h.counts.astype(float)
    a, b, d = np.meshgrid(GRID, GRID, GRID, indexing="ij", sparse=True)
    total = 0.0
    for j, v in enumerate((a, b, d)):
        total = total + c[0, j] * (v + 1.0) ** 2 + c[1, j] * (v - 1.0) ** 2
    return total.min() / h.n


@pytest.mark.parametrize("seed", range(12))
def test_squared_minimum_matches_grid_search(seed):
    rng = np.random.default_rng(seed)
    h = JointHistogram(rng.integers(0, 40, size=(2, 3)) + (np.arange(6).reshape(2, 3) == 0))
    value, argmin = min_empirical_loss_classification(h, "squared")
    brute = _brute_force(h)
    assert brute >= value - 1e-12
    assert brute - value <= 1e-4
    assert empirical_loss_vector(h, argmin) == pytest.approx(value, abs=1e-14)


@given(st.lists(st.integers(0, 30), min_size=6, max_size=6).filter(lambda c: sum(c) > 0))
@settings(max_examples=100, deadline=None)
def test_log_minimum_is_plugin_entropy(counts):
    h = JointHistogram(np.array(counts).reshape(2, 3))
    value, argmin = min_empirical_loss_classification(h, "log")
    assert value == plugin_conditional_entropy(h)
    assert empirical_loss_vector(h, argmin, "log") == pytest.approx(value, abs=1e-12)
    assert 0.0 <= value <= math.log(2.0)


@given(st.lists(st.integers(0, 30), min_size=4, max_size=8).filter(
    lambda c: len(c) % 2 == 0 and sum(c) > 0))
@settings(max_examples=100, deadline=None)
def test_squared_minimum_beats_perturbations(counts):
    h = JointHistogram(np.array(counts).reshape(2, -1))
    value, argmin = min_empirical_loss_classification(h, "squared")
    rng = np.random.default_rng(len(counts))
    for _ in range(5):
        other = np.clip(argmin + rng.normal(0, 0.1, argmin.size), -1, 1)
        assert empirical_loss_vector(h, other) >= value - 1e-12


def test_histogram_json_round_trip(tmp_path):
    h = JointHistogram(np.array([[1, 2, 0], [4, 0, 6]]))
    path = tmp_path / "h.json"
    save_histogram(h, path)
    assert load_histogram(path) == h
