"""Koebe iteration for workspaces with several obstacles.

One iteration runs M + 1 steps. Step k (k <= M) maps the outside of the
current image of obstacle k onto the outside of the unit circle; step M + 1
maps the inside of the current external curve onto the unit disk with the
anchor going to 0. Every other curve and every tracked point is pushed
through each step. Repeating the sweep makes all images circular, and the
stack of stages is the approximate transformation onto a sphere world.
"""
from dataclasses import dataclass, field
from functools import cached_property
import logging
import os
import warnings

import numpy as np

from . import kernels
from .exceptions import (CircleFitError, ConfNavError, ConstructionError, DomainError,
                         NearBoundaryWarning, NonConvergenceError)
from .geometry import (ParametricCurve, Workspace, point_in_free_space,
                       polygon_self_intersects, polygons_cross)
from .maps import build_exterior_map, build_interior_map, pack_stages

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-13
FIT_REL_TOL = 1e-6
EXTERNAL_TOL = 1e-10


@dataclass(eq=False)
class CompositeMap:
    """Ordered stages plus the current images of curves and tracked points.

    ``image_curves`` and ``tracked_points`` list the obstacles first and the
    external curve (respectively the anchor) last.
    """

    stages: list
    image_curves: list
    tracked_points: np.ndarray
    workspace: Workspace
    n_iterations: int = 0
    final_delta: float = np.inf

    @property
    def n_obstacles(self):
        return len(self.image_curves) - 1

    @cached_property
    def pack(self):
        return pack_stages(self.stages)


@dataclass
class IterationReport:
    deltas: np.ndarray = field(default_factory=lambda: np.zeros(0))
    converged: bool = False

    @property
    def ratio_estimates(self):
        d = np.asarray(self.deltas)
        return d[1:] / d[:-1] if d.size > 1 else np.zeros(0)

    def to_dict(self):
        return {"iterations": int(len(self.deltas)),
                "converged": bool(self.converged),
                "deltas": [float(x) for x in self.deltas],
                "ratio_estimates": [float(x) for x in self.ratio_estimates]}


@dataclass
class SphereWorld:
    """Unit disk minus the fitted obstacle disks."""

    obstacle_centers: np.ndarray
    obstacle_radii: np.ndarray
    fit_residuals: np.ndarray = None
    external_center: complex = 0j
    external_radius: float = 1.0

    @property
    def n_obstacles(self):
        return len(self.obstacle_radii)

    def check(self):
        q = np.asarray(self.obstacle_centers)
        r = np.asarray(self.obstacle_radii)
        if np.any(r <= 0) or np.any(r >= 1):
            raise CircleFitError("obstacle radii must lie in (0, 1)")
        if np.any(np.abs(q - self.external_center) + r >= self.external_radius):
            raise CircleFitError("obstacle disk touches the external circle")
        for i in range(len(r)):
            for j in range(i + 1, len(r)):
                if abs(q[i] - q[j]) <= r[i] + r[j]:
                    raise CircleFitError(f"obstacle disks {i} and {j} overlap")
        return self

    def to_dict(self):
        return {"external_center": [0.0, 0.0], "external_radius": 1.0,
                "obstacles": [{"center": [float(c.real), float(c.imag)],
                               "radius": float(r), "fit_residual": float(e)}
                              for c, r, e in zip(self.obstacle_centers,
                                                 self.obstacle_radii,
                                                 self.fit_residuals)]}


def _topology_ok(curves):
    if any(polygon_self_intersects(c) for c in curves):
        return False
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            if polygons_cross(curves[i], curves[j]):
                return False
    return True


def _push(stage, points):
    val, _, ratio = kernels.composite_eval(*stage.pack(), points)
    return val, ratio


def run_koebe(ws, tol=DEFAULT_TOL, max_iter=50, check_topology=True,
              dump_dir=None, raise_on_failure=True):
    """Iterate until the sup-node displacement between sweeps is at most ``tol``.

    Returns ``(CompositeMap, IterationReport)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = ws.n_obstacles
    curves = list(ws.curves)
    gammas = [c.gamma.copy() for c in curves]
    sizes = [c.n_nodes for c in curves]
    tracked = np.append(ws.obstacle_centers, ws.interior_anchor).astype(np.complex128)
    stages = []
    deltas = []
    prev = np.concatenate(gammas)
    converged = False
    for it in range(1, max_iter + 1):
        for k in range(m + 1):
            curve = curves[k]
            dump = None
            if dump_dir is not None:
                os.makedirs(dump_dir, exist_ok=True)
                dump = os.path.join(dump_dir, f"iter{it:03d}_step{k:02d}.npz")
            try:
                if k < m:
                    stage = build_exterior_map(curve, tracked[k], dump_path=dump)
                else:
                    stage = build_interior_map(curve, tracked[k], dump_path=dump)
            except ConfNavError as exc:
                raise type(exc)(f"iteration {it}, step {k + 1}: {exc}") from exc
            stages.append(stage)
            others = [j for j in range(m + 1) if j != k]
            pts = np.concatenate([gammas[j] for j in others] + [np.delete(tracked, k)])
            new, ratio = _push(stage, pts)
            if np.any(ratio < 1.0):
                warnings.warn(f"iteration {it}, step {k + 1}: curves closer than the "
                              "quadrature floor", NearBoundaryWarning, stacklevel=2)
            pos = 0
            for j in others:
                gammas[j] = new[pos:pos + sizes[j]]
                pos += sizes[j]
            tracked = np.insert(new[pos:], k, 0j)
            gammas[k] = stage.map_boundary.copy()
            for j in range(m + 1):
                curves[j] = ParametricCurve.from_samples(gammas[j], check=False)
        if check_topology and not _topology_ok(gammas):
            raise ConstructionError(f"iteration {it}: image curves lost simplicity "
                                    "or disjointness")
        cur = np.concatenate(gammas)
        delta = float(np.max(np.abs(cur - prev)))
        prev = cur
        deltas.append(delta)
        log.info("koebe iteration %d: delta %.3e", it, delta)
        if delta <= tol:
            converged = True
            break
    report = IterationReport(np.array(deltas), converged)
    cm = CompositeMap(stages, curves, tracked, ws, len(deltas), deltas[-1])
    if not converged and raise_on_failure:
        raise NonConvergenceError(
            f"no convergence after {max_iter} iterations (last delta {deltas[-1]:.3e})",
            report=report)
    return cm, report


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------

def _eval(cm, z, check_domain):
    z_in = z
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128)).ravel()
    if check_domain and not np.all(point_in_free_space(cm.workspace, z)):
        raise DomainError("point is not in the free space of the workspace")
    val, der, ratio = kernels.composite_eval(*cm.pack, z)
    if np.any(ratio < 1.0):
        warnings.warn("composite map evaluated close to a boundary; accuracy "
                      "is reduced", NearBoundaryWarning, stacklevel=3)
    if np.ndim(z_in) == 0:
        return val[0], der[0]
    shape = np.shape(z_in)
    return val.reshape(shape), der.reshape(shape)


def evaluate_composite(cm, z, check_domain=True):
    return _eval(cm, z, check_domain)[0]


def composite_derivative(cm, z, check_domain=True):
    return _eval(cm, z, check_domain)[1]


def evaluate_with_derivative(cm, z, check_domain=True):
    return _eval(cm, z, check_domain)


def jacobian_from_derivative(d):
    """Real 2x2 Jacobian(s) ``[[a, -b], [b, a]]`` of a complex derivative ``a + ib``."""
    d = np.asarray(d, dtype=np.complex128)
    a, b = d.real, d.imag
    return np.stack([np.stack([a, -b], -1), np.stack([b, a], -1)], -2)


def jacobian_2x2(cm, z, check_domain=True):
    return jacobian_from_derivative(composite_derivative(cm, z, check_domain))


# --------------------------------------------------------------------------
# Circle fitting
# --------------------------------------------------------------------------

def kasa_fit(points):
    """Algebraic least-squares circle through complex ``points``.

    Returns ``(center, radius, residual)`` with residual the largest distance
    of a point from the fitted circle.
    """
    p = np.asarray(points, dtype=np.complex128)
    shift = p.mean()
    q = p - shift
    x, y = q.real, q.imag
    a = np.column_stack([x, y, np.ones_like(x)])
    b = x * x + y * y
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    center = 0.5 * complex(sol[0], sol[1])
    radius = float(np.sqrt(sol[2] + abs(center) ** 2))
    residual = float(np.max(np.abs(np.abs(q - center) - radius)))
    return center + shift, radius, residual


def normalize_external(cm):
    """Append an interior stage that puts the external image on the unit circle.

    Modifies ``cm`` in place and returns it.
    """
    ext = cm.image_curves[-1]
    stage = build_interior_map(ext, cm.tracked_points[-1])
    pts = np.concatenate([c.gamma for c in cm.image_curves[:-1]] + [cm.tracked_points[:-1]])
    new, _ = _push(stage, pts)
    curves, pos = [], 0
    for c in cm.image_curves[:-1]:
        curves.append(ParametricCurve.from_samples(new[pos:pos + c.n_nodes], check=False))
        pos += c.n_nodes
    curves.append(ParametricCurve.from_samples(stage.map_boundary, check=False))
    cm.stages.append(stage)
    cm.image_curves = curves
    cm.tracked_points = np.append(new[pos:], 0j)
    cm.__dict__.pop("pack", None)
    return cm


def external_deviation(cm):
    return float(np.max(np.abs(np.abs(cm.image_curves[-1].gamma) - 1.0)))


def fit_circles(cm, rel_tol=FIT_REL_TOL):
    """Fit a circle to every obstacle image and return the sphere world.

    If the external image is off the unit circle by more than
    ``EXTERNAL_TOL`` a normalizing interior stage is appended to ``cm`` first.
    """
    if external_deviation(cm) > EXTERNAL_TOL:
        normalize_external(cm)
        dev = external_deviation(cm)
        if dev > EXTERNAL_TOL:
            raise CircleFitError(f"external image deviates {dev:.2e} from the unit "
                                 "circle after normalization")
    centers, radii, residuals = [], [], []
    for i, c in enumerate(cm.image_curves[:-1]):
        q, r, res = kasa_fit(c.gamma)
        if res > rel_tol * r:
            raise CircleFitError(
                f"obstacle {i} image is not circular (residual {res:.2e}, radius {r:.3f}); "
                "run more iterations")
        centers.append(q)
        radii.append(r)
        residuals.append(res)
    sw = SphereWorld(np.array(centers, dtype=np.complex128), np.array(radii),
                     np.array(residuals))
    return sw.check()
