"""Koditschek-Rimon navigation function on a sphere world and its pullback.

On the sphere world (unit disk minus disks ``|q - q_i| < rho_i``)::

    beta_0 = 1 - |q|^2,   beta_i = |q - q_i|^2 - rho_i^2,   beta = prod beta_i
    r_d = |q - q_d|^2
    phi = r_d / (r_d^k + beta)^(1/k)

The gradient is evaluated in the product form

    grad phi = (r_d^k + beta)^(-(k+1)/k) * [2 beta (q - q_d) - (r_d/k) grad beta]

with ``grad beta`` expanded by the product rule, which stays finite on the
boundary where some ``beta_i`` vanishes. Points are complex numbers and
gradients are returned as ``(..., 2)`` real arrays.
"""
from dataclasses import dataclass
import csv
import json
import warnings

import numpy as np

from .exceptions import ConfNavError, DomainError, NearBoundaryWarning
from .geometry import point_in_free_space
from .koebe import evaluate_composite, evaluate_with_derivative

BOUNDARY_SLACK = 1e-12


@dataclass(frozen=True)
class NavParams:
    k_exponent: int = 6
    goal_workspace: complex = 0j
    goal_image: complex = 0j

    def __post_init__(self):
        if int(self.k_exponent) != self.k_exponent or self.k_exponent < 2:
            raise ValueError("k_exponent must be an integer >= 2")


@dataclass(frozen=True)
class NavEvaluation:
    phi: float
    grad: np.ndarray
    beta: float
    betas: np.ndarray


def make_params(cm, goal, k=6):
    """Navigation parameters with the goal image computed through ``cm``."""
    goal = complex(goal)
    if not point_in_free_space(cm.workspace, goal):
        raise DomainError(f"goal {goal} is not in the free space")
    return NavParams(k, goal, complex(evaluate_composite(cm, goal)))


def _as_points(q):
    return np.asarray(q, dtype=np.complex128)


def beta(sw, q):
    """Obstacle functions ``beta_i`` (stacked on axis 0, external first) and their product."""
    q = _as_points(q)
    b0 = sw.external_radius ** 2 - np.abs(q - sw.external_center) ** 2
    bs = [b0] + [np.abs(q - c) ** 2 - r * r
                 for c, r in zip(sw.obstacle_centers, sw.obstacle_radii)]
    betas = np.stack(bs)
    return betas, np.prod(betas, axis=0)


def _grad_betas(sw, q):
    """Complex-encoded gradients of every ``beta_i``."""
    g0 = -2.0 * (q - sw.external_center)
    return np.stack([g0] + [2.0 * (q - c) for c in sw.obstacle_centers])


def _grad_product(betas, grads):
    """Product-rule gradient of ``prod beta_i``; no division by ``beta_i``."""
    m = betas.shape[0]
    total = np.zeros(betas.shape[1:], np.complex128)
    for i in range(m):
        others = np.prod(np.delete(betas, i, axis=0), axis=0)
        total = total + grads[i] * others
    return total


def _check_domain(betas):
    if np.any(betas < -BOUNDARY_SLACK):
        raise DomainError("point lies outside the sphere world (some beta_i < 0)")
    return np.maximum(betas, 0.0)


def phi_kr(sw, params, q):
    """Navigation function value; 0 at the goal image, 1 on every boundary circle."""
    q = _as_points(q)
    betas, _ = beta(sw, q)
    return _phi(_check_domain(betas), np.abs(q - params.goal_image) ** 2,
                params.k_exponent)


def _phi(betas, rd, k):
    b = np.prod(betas, axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        phi = rd / (rd ** k + b) ** (1.0 / k)
    return np.where(rd == 0.0, 0.0, phi)


def _grad_complex(sw, params, q):
    betas, _ = beta(sw, q)
    betas = _check_domain(betas)
    b = np.prod(betas, axis=0)
    if np.any(b == 0.0):
        warnings.warn("gradient requested on a boundary circle; returning the product-form "
                      "limit", NearBoundaryWarning, stacklevel=3)
    k = params.k_exponent
    diff = q - params.goal_image
    rd = np.abs(diff) ** 2
    db = _grad_product(betas, _grad_betas(sw, q))
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = (rd ** k + b) ** (-(k + 1.0) / k)
        g = scale * (2.0 * b * diff - (rd / k) * db)
    return np.where(rd == 0.0, 0j, g)


def _to_vec(g):
    return np.stack([np.real(g), np.imag(g)], axis=-1)


def grad_phi_kr(sw, params, q):
    """Analytic gradient of :func:`phi_kr`, shape ``(..., 2)``."""
    return _to_vec(_grad_complex(sw, params, _as_points(q)))


def evaluate(sw, params, q):
    """All navigation quantities at a single sphere-world point."""
    q = complex(q)
    betas, b = beta(sw, q)
    return NavEvaluation(float(phi_kr(sw, params, q)), grad_phi_kr(sw, params, q),
                         float(b), betas)


def saddle_vector(sw, params, q):
    """``(q - q_d) - (r_d / 2k) * sum_i grad beta_i / beta_i`` (complex encoded).

    Its zeros away from the goal are the critical points of ``phi``.
    """
    q = _as_points(q)
    betas, _ = beta(sw, q)
    grads = _grad_betas(sw, q)
    diff = q - params.goal_image
    rd = np.abs(diff) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sum(grads / betas, axis=0)
    return diff - rd / (2.0 * params.k_exponent) * s


def saddle_residual(sw, params, q):
    return np.abs(saddle_vector(sw, params, q))


# --------------------------------------------------------------------------
# Pullback to the workspace
# --------------------------------------------------------------------------

class PullbackIdentityError(ConfNavError):
    """The pulled-back gradient failed the conformal Jacobian identity."""


def pullback_complex(cm, sw, params, x, check_identity=True, check_domain=True):
    """Complex-encoded :func:`pullback_gradient`: ``gx + i gy``."""
    x = _as_points(x)
    t, dt = evaluate_with_derivative(cm, x, check_domain=check_domain)
    g = _grad_complex(sw, params, np.asarray(t))
    u = np.conj(dt) * g
    if check_identity:
        a, b = np.real(dt), np.imag(dt)
        det = a * a + b * b
        # det(J) * J^{-1} g with J^{-1} = [[a, b], [-b, a]] / det
        alt = det * ((a * g.real + b * g.imag) + 1j * (-b * g.real + a * g.imag)) / det
        err = np.abs(u - alt)
        if np.any(err > 1e-10 * np.maximum(1.0, np.abs(u))):
            raise PullbackIdentityError(
                f"pulled-back gradient violates the conformal identity by {err.max():.2e}")
    return u


def pullback_gradient(cm, sw, params, x, check_identity=True, check_domain=True):
    """``J_T(x)^T grad phi(T(x))`` as ``(..., 2)`` (gain applied by the caller).

    For a conformal ``T`` with ``T' = a + ib`` the Jacobian is
    ``[[a, -b], [b, a]]``, so ``J^T v`` is ``conj(T') * v`` in complex form.
    With ``check_identity`` the result is compared against
    ``det(J) J^{-1} grad phi``, which must agree to 1e-10. (For a conformal
    Jacobian ``J^T = det(J) J^{-1}``, the "norm" in that identity being the
    determinant ``|T'|^2``.)
    """
    return _to_vec(pullback_complex(cm, sw, params, x, check_identity, check_domain))


def pulled_back_phi(cm, sw, params, x, check_domain=True):
    return phi_kr(sw, params, evaluate_composite(cm, x, check_domain=check_domain))


# --------------------------------------------------------------------------
# Grids
# --------------------------------------------------------------------------

@dataclass
class PhiGrid:
    """``phi`` and ``|grad phi|`` on a regular grid; NaN marks points outside the free space."""

    x: np.ndarray
    y: np.ndarray
    phi: np.ndarray
    space: str
    grad_norm: np.ndarray = None

    def local_minima(self):
        return grid_local_minima(self.phi)

    def argmin(self):
        j, i = np.unravel_index(np.nanargmin(self.phi), self.phi.shape)
        return complex(self.x[i], self.y[j])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "phi", "grad_norm"])
            gn = self._grad_norm()
            for j, yv in enumerate(self.y):
                for i, xv in enumerate(self.x):
                    w.writerow([repr(float(xv)), repr(float(yv)),
                                _cell(self.phi[j, i]), _cell(gn[j, i])])

    def to_json(self, path):
        def rows(a):
            return [[None if np.isnan(v) else float(v) for v in row] for row in a]
        with open(path, "w") as fh:
            json.dump({"space": self.space, "x": self.x.tolist(), "y": self.y.tolist(),
                       "phi": rows(self.phi), "grad_norm": rows(self._grad_norm())}, fh)

    def _grad_norm(self):
        return np.full(self.phi.shape, np.nan) if self.grad_norm is None else self.grad_norm


def _cell(v):
    return "" if np.isnan(v) else repr(float(v))


def grid_local_minima(phi):
    """Grid indices ``(j, i)`` strictly below every valid 8-neighbour."""
    p = np.where(np.isnan(phi), np.inf, phi)
    pad = np.pad(p, 1, constant_values=np.inf)
    ny, nx = p.shape
    is_min = np.isfinite(p)
    for dj in (-1, 0, 1):
        for di in (-1, 0, 1):
            if dj == 0 and di == 0:
                continue
            nb = pad[1 + dj:1 + dj + ny, 1 + di:1 + di + nx]
            is_min &= p < nb
    return [tuple(ix) for ix in np.argwhere(is_min)]


def sphere_world_grid(sw, params, n=200):
    """``phi`` on an ``n x n`` grid over ``[-1, 1]^2``."""
    x = np.linspace(-1.0, 1.0, n)
    y = np.linspace(-1.0, 1.0, n)
    q = x[None, :] + 1j * y[:, None]
    betas, _ = beta(sw, q)
    free = np.all(betas >= 0.0, axis=0)
    phi = np.full(q.shape, np.nan)
    gn = np.full(q.shape, np.nan)
    phi[free] = phi_kr(sw, params, q[free])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearBoundaryWarning)
        gn[free] = np.abs(_grad_complex(sw, params, q[free]))
    return PhiGrid(x, y, phi, "sphere_world", gn)


def workspace_grid(cm, sw, params, n=200, bbox=None):
    """``phi(T(x))`` on an ``n x n`` grid over the workspace bounding box."""
    ext = cm.workspace.external.gamma
    if bbox is None:
        bbox = (ext.real.min(), ext.real.max(), ext.imag.min(), ext.imag.max())
    x = np.linspace(bbox[0], bbox[1], n)
    y = np.linspace(bbox[2], bbox[3], n)
    z = x[None, :] + 1j * y[:, None]
    free = point_in_free_space(cm.workspace, z.ravel()).reshape(z.shape)
    phi = np.full(z.shape, np.nan)
    gn = np.full(z.shape, np.nan)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearBoundaryWarning)
        t, dt = evaluate_with_derivative(cm, z[free], check_domain=False)
        # images of points just inside a boundary can land a hair outside a circle
        betas, _ = beta(sw, t)
        inside = np.all(betas >= 0.0, axis=0)
        g = np.zeros(t.shape, np.complex128)
        g[inside] = _grad_complex(sw, params, t[inside])
    phi[free] = _phi(np.maximum(betas, 0.0), np.abs(t - params.goal_image) ** 2,
                     params.k_exponent)
    gn[free] = np.where(inside, np.abs(dt * g), np.nan)
    return PhiGrid(x, y, phi, "workspace", gn)
