"""Conformal maps of simply connected regions bounded by one curve.

An *interior* stage maps the inside of a counterclockwise curve onto the
unit disk with ``T(z_c) = 0`` and ``T'(z_c) > 0``:

    T(z) = exp(-c) (z - z_c) exp((z - z_c) f(z))

An *exterior* stage maps the outside of a clockwise curve onto the outside
of the unit disk with ``T(inf) = inf`` and ``T'(inf) > 0``:

    T(z) = exp(c) (z - z_c) exp(-f(z)),   f(inf) = 0

``f`` is known on the curve from the boundary integral solve and is carried
off the curve by Cauchy integrals, so ``T(z_c) = 0`` holds exactly.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple
import warnings

import numpy as np

from . import kernels
from .boundary_integral import build_kernels, dump_kernels, solve_riemann_hilbert
from .exceptions import ConstructionError, DomainError, NearBoundaryWarning
from .geometry import spectral_derivatives

FLOOR_SPACINGS = 5


@dataclass(frozen=True, eq=False)
class MapStage:
    kind: str
    curve: object
    center: complex
    c_const: float
    f_boundary: np.ndarray
    map_boundary: np.ndarray
    theta: np.ndarray

    @property
    def scale(self):
        return np.exp(-self.c_const) if self.kind == "interior" else np.exp(self.c_const)

    @cached_property
    def boundary_derivative(self):
        """``T'`` at the nodes, from the spectral derivative of theta."""
        s = self.curve.nodes
        dtheta = spectral_derivatives((self.theta - s).astype(np.complex128))[0].real + 1.0
        sign = 1.0 if self.kind == "interior" else -1.0
        dT_ds = 1j * sign * dtheta * self.map_boundary
        return dT_ds / self.curve.dgamma

    @cached_property
    def floor(self):
        """Distance below which evaluation accuracy degrades."""
        return FLOOR_SPACINGS * self.curve.max_spacing

    @cached_property
    def snap(self):
        """Distance at which a query is treated as the boundary node itself."""
        return 1e-13 * max(self.curve.diameter, 1.0)

    def pack(self):
        return pack_stages([self])


class StagePack(NamedTuple):
    """Stage data stacked into arrays for :func:`kernels.composite_eval`."""

    kind: np.ndarray
    gamma: np.ndarray
    weights: np.ndarray
    fvals: np.ndarray
    mapb: np.ndarray
    mapd: np.ndarray
    zc: np.ndarray
    scale: np.ndarray
    orient: np.ndarray
    floor: np.ndarray
    snap: np.ndarray


def pack_stages(stages):
    code = {"interior": kernels.INTERIOR, "exterior": kernels.EXTERIOR}
    return StagePack(
        kind=np.array([code[s.kind] for s in stages], dtype=np.int64),
        gamma=np.array([s.curve.gamma for s in stages]),
        weights=np.array([s.curve.weights for s in stages]),
        fvals=np.array([s.f_boundary for s in stages]),
        mapb=np.array([s.map_boundary for s in stages]),
        mapd=np.array([s.boundary_derivative for s in stages]),
        zc=np.array([s.center for s in stages], dtype=np.complex128),
        scale=np.array([s.scale for s in stages], dtype=float),
        orient=np.array([s.curve.orientation_sign for s in stages], dtype=float),
        floor=np.array([s.floor for s in stages], dtype=float),
        snap=np.array([s.snap for s in stages], dtype=float),
    )


def _check_theta(theta, kind):
    # the closing increment is the wrapped step from the last node back to the first
    closing = np.angle(np.exp(1j * (theta[0] - theta[-1])))
    turns = (theta[-1] - theta[0] + closing) / (2 * np.pi)
    if abs(turns - 1.0) > 1e-6:
        raise ConstructionError(
            f"{kind} stage: boundary correspondence winds {turns:.6f} times, expected 1")


def build_interior_map(curve, z_c, dump_path=None):
    """Map the inside of a counterclockwise ``curve`` onto the unit disk."""
    z_c = complex(z_c)
    if curve.orientation != "counterclockwise":
        raise ConstructionError("interior map needs a counterclockwise curve")
    w, _ = curve.winding_and_distance(z_c)
    if w[0] != 1:
        raise ConstructionError(f"center {z_c} is not inside the curve")
    ops = build_kernels(curve, z_c, "interior")
    if dump_path is not None:
        dump_kernels(ops, dump_path)
    g = curve.gamma - z_c
    mu = -np.log(np.abs(g))
    bd = solve_riemann_hilbert(ops, mu)
    theta = bd.upsilon + np.unwrap(np.angle(g))
    _check_theta(theta, "interior")
    f_b = (mu + bd.c_const + 1j * bd.upsilon) / g
    map_b = g / np.abs(g) * np.exp(1j * bd.upsilon)
    return MapStage("interior", curve, z_c, bd.c_const, f_b, map_b, theta)


def build_exterior_map(curve, z_c, dump_path=None):
    """Map the outside of a clockwise ``curve`` onto the outside of the unit disk.

    ``z_c`` is any point enclosed by the curve; the map does not depend on it.
    """
    z_c = complex(z_c)
    if curve.orientation != "clockwise":
        raise ConstructionError("exterior map needs a clockwise curve")
    w, _ = curve.winding_and_distance(z_c)
    if w[0] != -1:
        raise ConstructionError(f"center {z_c} is not inside the curve")
    ops = build_kernels(curve, z_c, "exterior")
    if dump_path is not None:
        dump_kernels(ops, dump_path)
    g = curve.gamma - z_c
    mu = np.log(np.abs(g))
    bd = solve_riemann_hilbert(ops, mu)
    theta = bd.upsilon - np.unwrap(np.angle(g))
    _check_theta(theta, "exterior")
    f_b = mu + bd.c_const + 1j * bd.upsilon
    map_b = g / np.abs(g) * np.exp(-1j * bd.upsilon)
    return MapStage("exterior", curve, z_c, bd.c_const, f_b, map_b, theta)


def _evaluate(stage, z):
    z_in = z
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128)).ravel()
    w, _ = stage.curve.winding_and_distance(z)
    ok = (w != 0) if stage.kind == "interior" else (w == 0)
    if not np.all(ok):
        raise DomainError(f"point outside the domain of the {stage.kind} stage")
    val, der, ratio = kernels.composite_eval(*stage.pack(), z)
    if np.any(ratio < 1.0):
        warnings.warn(f"{stage.kind} stage evaluated within {FLOOR_SPACINGS} node "
                      "spacings of its curve", NearBoundaryWarning, stacklevel=3)
    if np.ndim(z_in) == 0:
        return val[0], der[0]
    return val.reshape(np.shape(z_in)), der.reshape(np.shape(z_in))


def evaluate_stage(stage, z):
    return _evaluate(stage, z)[0]


def stage_derivative(stage, z):
    return _evaluate(stage, z)[1]
