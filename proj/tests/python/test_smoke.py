"""End-to-end smoke of the python bindings.

Runs under pytest, or standalone: python3 test_smoke.py
"""

import json

import numpy as np

import skewsim

CONFIG = {
    "dim": 3,
    "membranes": {
        "m0": 1.0,
        "inner": [[0.5, 1.0]],
        "gamma_top": 2.0,
        "gammabar_bottom": 2.0,
    },
    "simulation": {
        "n_paths": 64,
        "step": 1e-3,
        "horizon": 0.05,
        "seed": 7,
        "x0": [0.6, 0.0, 0.0],
    },
}


def make_model():
    return skewsim.Model(json.dumps(CONFIG))


def test_alpha_function():
    assert abs(skewsim.skew_alpha(1.0, 2.0) - 2.0 / 3.0) < 1e-15
    try:
        skewsim.skew_alpha(-1.0, 2.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative weight must raise")


def test_geometry():
    m = make_model()
    assert m.dim == 3
    assert m.m0 == 1.0
    np.testing.assert_allclose(m.boundaries, [0.5, 1.0])
    assert m.phi(0.25) == 1.0
    assert m.phi(0.75) == 2.0
    assert m.psi([0.75, 0.0, 0.0]) == 2.0

    c = m.coefficients()
    np.testing.assert_allclose(c["radius"], [0.5, 1.0])
    assert abs(c["alpha"][0] - 2.0 / 3.0) < 1e-15
    assert c["coeff"][1] == 0.0  # equal weights across m0
    assert c["m0_index"] == 1


def test_exit_probability_monotone():
    m = make_model()
    probs = [m.exit_probability(r0, 1.1, 2.0) for r0 in (1.2, 1.5, 1.8)]
    assert all(0.0 < p < 1.0 for p in probs)
    assert probs[0] < probs[1] < probs[2]


def test_simulate_shapes_and_determinism():
    m = make_model()
    out = m.simulate()
    assert out["dim"] == 3
    assert out["positions"].shape == (64, 51, 3)
    assert out["times"].shape == (51,)
    assert out["absorbed"].sum() == 0
    np.testing.assert_allclose(np.linalg.norm(out["positions"][:, 0, :], axis=1), 0.6)

    m.set_simulation(n_threads=3)
    np.testing.assert_array_equal(m.simulate()["positions"], out["positions"])

    m.set_simulation(n_threads=1, seed=8)
    assert not np.array_equal(m.simulate()["positions"], out["positions"])


def test_crossing_report():
    m = make_model()
    m.set_simulation(n_paths=2000, step=1e-4, horizon=1.0, seed=2024)
    rep = m.verify_crossing(0.5, eps=0.05)
    assert abs(rep["target"] - 22.0 / 31.0) < 1e-9
    assert abs(rep["estimate"] - rep["target"]) < 3.5 * rep["stderr"]
    assert rep["pass"]


def test_growth_report():
    rep = make_model().growth()
    assert abs(rep["alpha_tail"] - 3.0) < 0.05
    assert rep["conservative"]
    assert not rep["recurrent"]


def test_config_round_trip():
    m = make_model()
    again = skewsim.Model(m.canonical_config)
    assert again.config_hash == m.config_hash
    assert json.loads(m.canonical_config)["dim"] == 3


def test_bad_config_raises():
    try:
        skewsim.Model('{"dim": 3, "bogus": 1}')
    except ValueError as e:
        assert "bogus" in str(e)
    else:
        raise AssertionError("unknown key must raise")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"{name}: ok")
    print("smoke: all checks passed")
