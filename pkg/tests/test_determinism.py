from xml.etree import ElementTree

import pytest

from leakaudit.adversary import TrainConfig
from leakaudit.sweep import SweepConfig, run_sweep, write_sweep
from leakaudit.svgplot import line_chart
from leakaudit.synthdata import Scenario, sample_dataset

SMALL = dict(mu_grid=(0.0, 0.1, 0.4), n=1500, k=8, train=TrainConfig(restarts=2, epochs=2))


def _outputs(tmp_path, name, **kw):
    cfg = SweepConfig(**{**SMALL, **kw})
    paths = write_sweep(cfg, run_sweep(cfg), tmp_path / name)
    return {ext: open(p, "rb").read() for ext, p in paths.items()}


def test_sweep_outputs_identical_across_runs_and_threads(tmp_path):
    first = _outputs(tmp_path, "a")
    again = _outputs(tmp_path, "b")
    threaded = _outputs(tmp_path, "c", workers=3)
    assert first == again == threaded


def test_sweep_seed_matters(tmp_path):
    assert _outputs(tmp_path, "a")["csv"] != _outputs(tmp_path, "b", seed=1)["csv"]


def test_sweep_rows_are_floats_that_round_trip(tmp_path):
    text = _outputs(tmp_path, "a")["csv"].decode()
    for line in text.splitlines()[1:]:
        for tok in line.split(","):
            assert repr(float(tok)) == tok or str(int(tok)) == tok


def test_timing_is_opt_in(tmp_path):
    cfg = SweepConfig(**SMALL)
    assert all(r.wall_seconds == 0.0 for r in run_sweep(cfg))
    timed = SweepConfig(**{**SMALL, "mu_grid": (0.1,), "timing": True})
    assert run_sweep(timed)[0].wall_seconds > 0.0


def test_sweep_row_invariants():
    for row in run_sweep(SweepConfig(**SMALL)):
        assert row.lower_bound <= row.empirical_loss
        assert 0.0 <= row.true_loss <= 1.0


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(mu_grid=())
    with pytest.raises(ValueError):
        SweepConfig(mu_grid=(1.2,))
    with pytest.raises(ValueError):
        SweepConfig(delta=1.0)


def test_dataset_identical_across_runs():
    scn = Scenario.from_mu(0.2, seed=99)
    a, b = sample_dataset(scn, 5000, stream=4), sample_dataset(scn, 5000, stream=4)
    assert a.t.tobytes() == b.t.tobytes() and a.s.tobytes() == b.s.tobytes()


def test_svg_is_deterministic_and_well_formed():
    x = [0.0, 0.5, 1.0]
    series = [("a & b", [1.0, 0.9, 0.8]), ("c", [0.5, 0.5, 0.5])]
    svg = line_chart(x, series, title="t<1>", xlabel="x", ylabel="y")
    assert svg == line_chart(x, series, title="t<1>", xlabel="x", ylabel="y")
    root = ElementTree.fromstring(svg.split("\n", 1)[1])
    assert root.tag.endswith("svg")
    with pytest.raises(ValueError):
        line_chart([], series)


def test_numpy_backend_env(monkeypatch):
    from leakaudit import _accel

    monkeypatch.setenv(_accel.BACKEND_ENV, "numpy")
    assert not _accel.use_numba()
    monkeypatch.setenv(_accel.BACKEND_ENV, "fortran")
    with pytest.raises(ValueError):
        _accel.requested_backend()
    monkeypatch.setenv(_accel.BACKEND_ENV, "numba")
    assert _accel.use_numba() == _accel.HAS_NUMBA
