import json

import numpy as np
import pytest

from confnav import scenarios
from confnav.exceptions import DomainError
from confnav.geometry import workspace_from_dict
from confnav.koebe import fit_circles, run_koebe
from confnav.navigation import make_params
from confnav.simulation import (ControlParams, FailedRun, batch_simulate, frechet_distance,
                                resample_arclength, simulate_dynamic, simulate_kinematic)


def test_start_at_goal(three):
    tr = simulate_kinematic(three.cm, three.sw, three.nav, ControlParams(), 0j)
    assert tr.outcome == "converged" and tr.n_states == 1
    tr = simulate_dynamic(three.cm, three.sw, three.nav, ControlParams(), 0j)
    assert tr.outcome == "converged" and tr.n_states == 1


def test_disk_radial_segment(disk):
    tr = simulate_kinematic(disk.cm, disk.sw, disk.nav, ControlParams(), 0.5 + 0j)
    assert tr.outcome == "converged"
    assert np.max(np.abs(tr.x.imag)) <= 1e-9
    assert abs(tr.x[-1]) <= 1e-3
    assert np.all(np.diff(tr.x.real) <= 0)


def test_scenario1_four_starts(scene1):
    ctrl = ControlParams()
    starts = [complex(*s) for s in scenarios.SCENARIO1_STARTS]
    runs = batch_simulate(scene1.cm, scene1.sw, scene1.nav, ctrl, starts)
    for tr in runs:
        assert tr.outcome == "converged"
        assert tr.n_halvings == 0
        assert tr.min_clearance > 0
        assert tr.final_error <= ctrl.goal_tol
        assert tr.max_lyapunov_increase() <= 1e-9


def test_batch_single_runs_identical(scene1):
    ctrl = ControlParams()
    s = complex(*scenarios.SCENARIO1_STARTS[1])
    a = batch_simulate(scene1.cm, scene1.sw, scene1.nav, ctrl, [s])[0]
    b = simulate_kinematic(scene1.cm, scene1.sw, scene1.nav, ctrl, s)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.t, b.t)


def test_batch_edge_cases(three):
    ctrl = ControlParams()
    assert batch_simulate(three.cm, three.sw, three.nav, ctrl, []) == []
    out = batch_simulate(three.cm, three.sw, three.nav, ctrl, [0.3 + 0.3j, 5.0, -0.3 + 0.4j])
    assert isinstance(out[1], FailedRun)
    assert out[0].outcome == "converged" and out[2].outcome == "converged"
    with pytest.raises(DomainError):
        simulate_kinematic(three.cm, three.sw, three.nav, ctrl, 5.0)


def test_dynamic_lambda_ordering(scene2):
    x0 = complex(*scenarios.SCENARIO2_START)
    kin = simulate_kinematic(scene2.cm, scene2.sw, scene2.nav, ControlParams(), x0)
    dists = {}
    for lam in (3.2, 5.0):
        tr = simulate_dynamic(scene2.cm, scene2.sw, scene2.nav, ControlParams(lam=lam), x0)
        assert tr.outcome == "converged"
        assert tr.min_clearance > 0
        assert tr.max_lyapunov_increase() <= 1e-9
        dists[lam] = frechet_distance(tr, kin)
    assert dists[5.0] < dists[3.2]


def test_dynamic_lyapunov_telescopes(scene2):
    x0 = complex(*scenarios.SCENARIO2_START)
    tr = simulate_dynamic(scene2.cm, scene2.sw, scene2.nav, ControlParams(lam=5.0), x0)
    drop = tr.lyapunov[0] - tr.lyapunov[-1]
    from confnav.navigation import pulled_back_phi
    phi0 = pulled_back_phi(scene2.cm, scene2.sw, scene2.nav, tr.x[0])
    phi1 = pulled_back_phi(scene2.cm, scene2.sw, scene2.nav, tr.x[-1])
    kinetic_end = 0.5 * abs(tr.v[-1]) ** 2
    assert abs(drop - (phi0 - phi1) + kinetic_end) <= 1e-12
    assert kinetic_end <= 1e-6
    assert abs(drop - (phi0 - phi1)) <= 1e-6


def test_dynamic_without_dissipation_conserves_energy(scene2):
    x0 = complex(*scenarios.SCENARIO2_START)
    ctrl = ControlParams(lam=0.0, max_steps=400)
    tr = simulate_dynamic(scene2.cm, scene2.sw, scene2.nav, ctrl, x0)
    assert tr.outcome == "max_steps"
    drift = np.max(np.abs(tr.lyapunov - tr.lyapunov[0]))
    assert drift <= 1e-6 * tr.t[-1]


def test_nonzero_velocity_needs_flag(three):
    with pytest.raises(ValueError):
        simulate_dynamic(three.cm, three.sw, three.nav, ControlParams(), 0.3j, v0=0.1)
    tr = simulate_dynamic(three.cm, three.sw, three.nav, ControlParams(), 0.3j, v0=0.1,
                          unsafe=True)
    assert tr.outcome == "converged"


def test_step_size_robustness(three):
    x0 = -0.2 + 0.75j
    a = simulate_kinematic(three.cm, three.sw, three.nav,
                           ControlParams(step_dt=0.02, cfl=1e9, goal_tol=1e-6), x0)
    b = simulate_kinematic(three.cm, three.sw, three.nav,
                           ControlParams(step_dt=0.01, cfl=1e9, goal_tol=1e-6), x0)
    assert a.outcome == b.outcome == "converged"
    assert abs(a.x[-1] - b.x[-1]) <= 1e-4
    # states at common times agree too
    common = b.t[::2][:a.n_states]
    n = len(common)
    assert np.allclose(a.t[:n], common)
    assert np.max(np.abs(a.x[:n] - b.x[::2][:n])) <= 1e-4


def test_collision_guard():
    ws = workspace_from_dict(scenarios.circular())
    cm, _ = run_koebe(ws)
    sw = fit_circles(cm)
    nav = make_params(cm, 0j)
    ctrl = ControlParams(gain_K=50.0, step_dt=0.5, cfl=1e9, max_halvings=0)
    tr = simulate_kinematic(cm, sw, nav, ctrl, -0.2 - 0.7j)
    assert tr.outcome == "collision_guard"
    assert tr.min_clearance > 0


def test_saddle_stall_is_labelled():
    schema = {"external": {"kind": "circle", "center": [0, 0], "radius": 1.0},
              "internal": [{"kind": "circle", "center": [0.3, 0], "radius": 0.15,
                            "clockwise": True}],
              "centers": [[0.3, 0]], "anchor": [0, 0], "n_nodes": 128}
    ws = workspace_from_dict(schema)
    cm, _ = run_koebe(ws)
    sw = fit_circles(cm)
    nav = make_params(cm, -0.5)
    tr = simulate_kinematic(cm, sw, nav, ControlParams(), 0.8 + 0j)
    assert tr.outcome == "saddle_stall"
    assert tr.saddle_residual < 1e-6
    assert tr.final_error > 0.5


def test_exports(tmp_path, three):
    tr = simulate_kinematic(three.cm, three.sw, three.nav, ControlParams(), 0.3 + 0.3j)
    tr.to_csv(tmp_path / "t.csv")
    tr.to_json(tmp_path / "t.json")
    lines = open(tmp_path / "t.csv").read().splitlines()
    assert lines[0] == "t,x,y,vx,vy,clearance,lyapunov,|u|"
    assert len(lines) == tr.n_states + 1
    doc = json.load(open(tmp_path / "t.json"))
    assert doc["outcome"] == "converged" and doc["params"]["gain_K"] == 1.0
    assert tr.states[0].position == 0.3 + 0.3j


def test_control_params_validation():
    for bad in ({"gain_K": 0}, {"lam": -1}, {"step_dt": 0}, {"max_steps": 0}):
        with pytest.raises(ValueError):
            ControlParams(**bad)


def test_frechet_helpers():
    a = np.linspace(0, 1, 50) + 0j
    b = a + 0.1j
    assert abs(frechet_distance(a, b) - 0.1) <= 1e-12
    assert abs(frechet_distance(a, a[::-1]) - 1.0) <= 1e-12
    r = resample_arclength(np.array([0, 1, 1 + 1j]), 5)
    assert np.allclose(r, [0, 0.5, 1, 1 + 0.5j, 1 + 1j])
