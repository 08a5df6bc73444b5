"""Closed-loop robot simulation in the original workspace.

Kinematic robot:  x' = -K * J_T(x)^T grad phi(T(x))
Dynamic robot:    m x'' = -K * J_T(x)^T grad phi(T(x)) - lambda x'

Both are integrated with the classical fourth-order Runge-Kutta method at a
fixed nominal step. Before each step the nominal step is halved until the
predicted displacement is at most ``cfl`` times the current clearance. If
the new position still leaves the free space the step is halved again, at
most ``max_halvings`` times; running out of halvings ends the run with
outcome ``collision_guard``, which signals integration trouble rather than
a physical collision.
"""
from dataclasses import asdict, dataclass, field
import csv
import json
import warnings

import numpy as np

from . import kernels
from .exceptions import ConfNavError, DomainError, NearBoundaryWarning
from .geometry import clearance, point_in_free_space
from .koebe import evaluate_composite
from .navigation import phi_kr, pullback_complex, saddle_residual

OUTCOMES = ("converged", "max_steps", "collision_guard", "saddle_stall")


@dataclass(frozen=True)
class ControlParams:
    gain_K: float = 1.0
    mass_m: float = 1.0
    lam: float = 3.2
    step_dt: float = None
    max_steps: int = 20000
    goal_tol: float = 1e-3
    dt_max: float = 0.05
    cfl: float = 0.1
    max_halvings: int = 10
    stall_tol: float = 1e-10

    def __post_init__(self):
        if self.gain_K <= 0 or self.mass_m <= 0:
            raise ValueError("gain_K and mass_m must be positive")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        if self.step_dt is not None and self.step_dt <= 0:
            raise ValueError("step_dt must be positive")
        if self.max_steps < 1 or self.goal_tol <= 0:
            raise ValueError("max_steps and goal_tol must be positive")


@dataclass(frozen=True)
class RobotState:
    position: complex
    velocity: complex
    time: float


@dataclass
class Trajectory:
    """Accepted states of one run plus per-state diagnostics."""

    model: str
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    clearance: np.ndarray
    lyapunov: np.ndarray
    control_norm: np.ndarray
    outcome: str
    goal: complex
    dt: float
    n_halvings: int = 0
    saddle_residual: float = None
    params: dict = field(default_factory=dict)

    @property
    def n_states(self):
        return self.t.shape[0]

    @property
    def states(self):
        return [RobotState(complex(p), complex(q), float(s))
                for p, q, s in zip(self.x, self.v, self.t)]

    @property
    def final_error(self):
        return float(abs(self.x[-1] - self.goal))

    @property
    def min_clearance(self):
        return float(self.clearance.min())

    def max_lyapunov_increase(self):
        """Largest one-step increase of the recorded Lyapunov values."""
        if self.n_states < 2:
            return 0.0
        return float(max(np.max(np.diff(self.lyapunov)), 0.0))

    def summary(self):
        return {"model": self.model, "outcome": self.outcome, "steps": self.n_states - 1,
                "final_time": float(self.t[-1]), "final_error": self.final_error,
                "min_clearance": self.min_clearance, "dt": self.dt,
                "n_halvings": self.n_halvings,
                "max_lyapunov_increase": self.max_lyapunov_increase(),
                "start": [float(self.x[0].real), float(self.x[0].imag)],
                "end": [float(self.x[-1].real), float(self.x[-1].imag)]}

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "y", "vx", "vy", "clearance", "lyapunov", "|u|"])
            for row in zip(self.t, self.x, self.v, self.clearance, self.lyapunov,
                           self.control_norm):
                t, x, v, c, lv, u = row
                w.writerow([repr(float(t)), repr(x.real), repr(x.imag), repr(v.real),
                            repr(v.imag), repr(float(c)), repr(float(lv)), repr(float(u))])

    def to_json(self, path):
        doc = self.summary()
        doc["params"] = self.params
        doc["saddle_residual"] = self.saddle_residual
        doc["t"] = self.t.tolist()
        doc["x"] = self.x.real.tolist()
        doc["y"] = self.x.imag.tolist()
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)


class _Field:
    """Pulled-back navigation field with the domain check and warnings handled."""

    def __init__(self, cm, sw, nav, ctrl):
        self.cm, self.sw, self.nav, self.ctrl = cm, sw, nav, ctrl
        self.ws = cm.workspace

    def grad(self, x):
        if not point_in_free_space(self.ws, x):
            raise DomainError("stage point left the free space")
        return complex(pullback_complex(self.cm, self.sw, self.nav, x, check_domain=False))

    def phi(self, x):
        return float(phi_kr(self.sw, self.nav,
                            evaluate_composite(self.cm, x, check_domain=False)))

    def clearance(self, x):
        return float(clearance(self.ws, x)[0])


def _cfl_step(dt, step_speed, clear, cfl):
    """Largest ``dt / 2^j`` whose predicted displacement respects the clearance cap."""
    h = dt
    while step_speed * h > cfl * clear and h > 1e-300:
        h *= 0.5
    return h


def _rk4(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _simulate(cm, sw, nav, ctrl, x0, v0, model):
    fld = _Field(cm, sw, nav, ctrl)
    x0 = complex(x0)
    v0 = complex(v0)
    if not point_in_free_space(fld.ws, x0):
        raise DomainError(f"start {x0} is not in the free space")
    goal = nav.goal_workspace
    K, m, lam = ctrl.gain_K, ctrl.mass_m, ctrl.lam

    if model == "kinematic":
        def rhs(y):
            return np.array([-K * fld.grad(y[0])])

        def control(y, g):
            return -K * g

        def lyap(y):
            return K * fld.phi(y[0])
    else:
        def rhs(y):
            return np.array([y[1], (-K * fld.grad(y[0]) - lam * y[1]) / m])

        def control(y, g):
            return -K * g - lam * y[1]

        def lyap(y):
            return K * fld.phi(y[0]) + 0.5 * m * abs(y[1]) ** 2

    y = np.array([x0] if model == "kinematic" else [x0, v0], dtype=np.complex128)
    g = fld.grad(x0)
    clear = fld.clearance(x0)
    dt = ctrl.dt_max if ctrl.step_dt is None else ctrl.step_dt
    ts, xs, vs, cs, ls, us = [0.0], [x0], [v0], [clear], [lyap(y)], [abs(control(y, g))]
    t = 0.0
    halvings = 0
    outcome = "max_steps"
    stall_res = None

    def speed(y):
        return abs(y[1]) if model == "dynamic" else 0.0

    for _ in range(ctrl.max_steps):
        if abs(y[0] - goal) <= ctrl.goal_tol and speed(y) <= ctrl.goal_tol:
            outcome = "converged"
            break
        if abs(g) * K < ctrl.stall_tol and speed(y) < ctrl.stall_tol:
            outcome = "saddle_stall"
            stall_res = float(saddle_residual(
                sw, nav, evaluate_composite(cm, y[0], check_domain=False)))
            break
        step_speed = abs(K * g) if model == "kinematic" else abs(y[1]) + abs(K * g) * dt / m
        h = _cfl_step(dt, step_speed, clear, ctrl.cfl)
        accepted = False
        for _ in range(ctrl.max_halvings + 1):
            try:
                y_new = _rk4(rhs, y, h)
                if point_in_free_space(fld.ws, y_new[0]):
                    accepted = True
                    break
            except DomainError:
                pass
            h *= 0.5
            halvings += 1
        if not accepted:
            outcome = "collision_guard"
            break
        y = y_new
        t += h
        g = fld.grad(y[0])
        clear = fld.clearance(y[0])
        ts.append(t)
        xs.append(y[0])
        vs.append(y[1] if model == "dynamic" else -K * g)
        cs.append(clear)
        ls.append(lyap(y))
        us.append(abs(control(y, g)))
    else:
        if abs(y[0] - goal) <= ctrl.goal_tol and speed(y) <= ctrl.goal_tol:
            outcome = "converged"

    if model == "kinematic":
        vs[0] = -K * fld.grad(x0)
    params = {"model": model, "k": nav.k_exponent,
              "goal": [goal.real, goal.imag], **asdict(ctrl)}
    return Trajectory(model, np.array(ts), np.array(xs), np.array(vs), np.array(cs),
                      np.array(ls), np.array(us), outcome, goal, dt, halvings,
                      stall_res, params)


def simulate_kinematic(cm, sw, nav, ctrl, x0):
    """First-order robot driven by the negative pulled-back gradient."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearBoundaryWarning)
        return _simulate(cm, sw, nav, ctrl, x0, 0j, "kinematic")


def simulate_dynamic(cm, sw, nav, ctrl, x0, v0=0j, unsafe=False):
    """Second-order robot with linear damping ``lam``.

    Convergence is only guaranteed from rest; a nonzero ``v0`` requires
    ``unsafe=True``.
    """
    if complex(v0) != 0 and not unsafe:
        raise ValueError("nonzero initial velocity is outside the guaranteed setting; "
                         "pass unsafe=True to run it anyway")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearBoundaryWarning)
        return _simulate(cm, sw, nav, ctrl, x0, v0, "dynamic")


@dataclass
class FailedRun:
    start: complex
    error: str
    outcome: str = "error"


def batch_simulate(cm, sw, nav, ctrl, starts, model="kinematic"):
    """Run every start independently; failures become :class:`FailedRun` records."""
    out = []
    for x0 in starts:
        try:
            if model == "kinematic":
                out.append(simulate_kinematic(cm, sw, nav, ctrl, x0))
            elif model == "dynamic":
                out.append(simulate_dynamic(cm, sw, nav, ctrl, x0))
            else:
                raise ValueError(f"unknown model {model!r}")
        except (ConfNavError, ValueError, TypeError) as exc:
            out.append(FailedRun(x0, str(exc)))
    return out


def resample_arclength(path, n):
    """``n`` points equally spaced in arclength along a complex polyline."""
    path = np.asarray(path, dtype=np.complex128)
    seg = np.abs(np.diff(path))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if s[-1] == 0.0:
        return np.full(n, path[0])
    keep = np.concatenate([[True], seg > 0])
    s, path = s[keep], path[keep]
    u = np.linspace(0.0, s[-1], n)
    return np.interp(u, s, path.real) + 1j * np.interp(u, s, path.imag)


def frechet_distance(a, b, n_samples=400):
    """Discrete Frechet distance between two trajectories (or complex paths).

    Both paths are first resampled to ``n_samples`` points equally spaced
    in arclength, so the result does not depend on the time steps.
    """
    pa = a.x if isinstance(a, Trajectory) else a
    pb = b.x if isinstance(b, Trajectory) else b
    return float(kernels.frechet(resample_arclength(pa, n_samples),
                                 resample_arclength(pb, n_samples)))
