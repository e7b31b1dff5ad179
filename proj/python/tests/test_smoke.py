import os
from pathlib import Path

import numpy as np
import pytest

import coopadapt

SCENARIOS = Path(os.environ.get("COOPADAPT_SCENARIOS", Path(__file__).resolve().parents[2] / "scenarios"))


def arm(payload=(1.0, 0.1, 0.0, 0.05)):
    links = np.array([[2.0, 1.0, 0.0, 0.7], [1.5, 0.6, 0.0, 0.32], [0.5, 0.075, 0.0, 0.015]])
    return coopadapt.PlanarModel([1.0, 0.8, 0.3], links, gravity=(0.0, -9.81), payload=payload)


def test_mass_matrix_is_spd():
    h = arm().mass_matrix(np.array([0.3, 1.1, -0.6]))
    assert np.allclose(h, h.T, atol=1e-14)
    assert np.linalg.eigvalsh(h).min() > 0.0


def test_regressor_reproduces_inverse_dynamics():
    model = arm()
    rng = np.random.default_rng(3)
    q, qd, qdd = rng.normal(size=(3, 3))
    y = model.regressor(q, qd, qd, qdd)
    assert y.shape == (3, 4 * model.n_bodies)
    assert np.allclose(y @ model.param_vector(), model.inverse_dynamics(q, qd, qdd), atol=1e-12)
    assert np.allclose(model.forward_dynamics(q, qd, model.inverse_dynamics(q, qd, qdd)), qdd, atol=1e-10)


def test_payload_columns():
    model = arm()
    y = model.regressor(np.zeros(3), np.zeros(3), np.zeros(3), np.zeros(3), bodies=[model.payload_body])
    assert y.shape == (3, 4)
    assert np.allclose(model.param_vector([model.payload_body]), [1.0, 0.1, 0.0, 0.05])


def test_bad_shapes_raise():
    with pytest.raises(ValueError):
        coopadapt.PlanarModel([1.0, 0.5], np.ones((3, 4)))
    assert coopadapt.is_physical([1.0, 0.1, 0.0, 0.05])
    assert not coopadapt.is_physical([1.0, 1.0, 0.0, 0.05])


def test_validate_scenarios():
    assert coopadapt.validate(SCENARIOS / "switching3.json")["ok"]
    rep = coopadapt.validate(SCENARIOS / "switching3_disconnected.json")
    assert not rep["ok"] and rep["errors"]
    assert not coopadapt.validate(SCENARIOS / "coupled_delayed.json", {"network.delay_s": 0.2505})["ok"]


def test_short_run():
    r = coopadapt.run(SCENARIOS / "coupled.json", {"duration_s": 0.5}, decimate=50)
    assert r.columns[0] == "t"
    assert r.data.shape == (11, len(r.columns))
    assert r["t"][-1] == pytest.approx(0.5)
    assert not r.summary["diverged"]
    assert coopadapt.resolved(SCENARIOS / "coupled.json", {"duration_s": 0.5})["duration_s"] == 0.5


def test_missing_file_raises():
    with pytest.raises(ValueError):
        coopadapt.validate(SCENARIOS / "nope.json")
