"""Nystrom solver for the boundary Riemann-Hilbert problem on one curve.

Given a real function ``mu`` on the curve, find a real function ``upsilon``
and a real constant ``c`` such that ``mu + c + i*upsilon`` equals
``A(s) * f(gamma(s))`` for some ``f`` holomorphic on the left of the curve.
The weight is ``A(s) = gamma(s) - z_c`` for interior problems and ``A = 1``
for exterior ones (the exterior problem is the interior problem of the curve
inverted about ``z_c``, and the inversion cancels the weight).

With ``K(s, t) = (1/pi) * A(s)/A(t) * gamma'(t) / (gamma(t) - gamma(s))``,
``H = Re K`` and ``R = Im K``:

    (I - R) upsilon = -H mu
    c = [H upsilon - (I - R) mu] / 2

``H`` carries the Cauchy singularity. It is split into the periodic Hilbert
kernel ``(1/2pi) cot((t - s)/2)``, applied spectrally, plus a smooth
remainder quadrated with the trapezoidal rule. The constant formula above
is the one that reproduces the scaled-disk oracle ``c = log 2``; the
variant ``[H mu - (I - R) upsilon]/2`` does not.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import SingularConfigurationError, SolverError

MAX_CONDITION = 1e12


@dataclass(frozen=True, eq=False)
class KernelOperators:
    """Pointwise kernel matrices; quadrature weights are applied on use."""

    curve: object
    center: complex
    side: str
    R_matrix: np.ndarray
    H_smooth: np.ndarray

    @property
    def n_nodes(self):
        return self.curve.n_nodes

    @property
    def h(self):
        return 2 * np.pi / self.curve.n_nodes


@dataclass(frozen=True, eq=False)
class BoundaryData:
    mu: np.ndarray
    upsilon: np.ndarray
    c_const: float
    residual: float
    condition: float


def winding_about(curve, z):
    """Net number of turns of ``gamma(s) - z`` over one period."""
    g = curve.gamma - z
    ang = np.angle(np.roll(g, -1) / g)
    return int(np.rint(ang.sum() / (2 * np.pi)))


def kernel_weight(curve, center, side):
    """The weight ``A`` and its derivative ``A'`` at the nodes."""
    if side == "interior":
        return curve.gamma - center, curve.dgamma
    if side == "exterior":
        n = curve.n_nodes
        return np.ones(n, np.complex128), np.zeros(n, np.complex128)
    raise ValueError(f"side must be 'interior' or 'exterior', got {side!r}")


def diagonal_limit(curve, center, side):
    """``lim_{t->s} [K(s,t) - 1/(pi (t-s))]`` at every node."""
    a, da = kernel_weight(curve, center, side)
    return (curve.ddgamma / (2 * curve.dgamma) - da / a) / np.pi


def build_kernels(curve, center, side="interior"):
    center = complex(center)
    g = curve.gamma
    scale = max(curve.diameter, 1.0)
    if np.min(np.abs(g - center)) <= 1e-12 * scale:
        raise SingularConfigurationError(f"center {center} lies on the curve")
    a, _ = kernel_weight(curve, center, side)
    # solvability: the curve must wind once around z_c, positively for the
    # interior problem and negatively (clockwise) for the exterior one
    expected = 1 if side == "interior" else -1
    turns = winding_about(curve, center)
    if turns != expected:
        raise SingularConfigurationError(
            f"{side} problem needs winding {expected} about the center, got {turns}")
    s = curve.nodes
    diff_g = g[None, :] - g[:, None]
    np.fill_diagonal(diff_g, 1.0)
    k = (a[:, None] / a[None, :]) * curve.dgamma[None, :] / diff_g / np.pi
    u = s[None, :] - s[:, None]
    np.fill_diagonal(u, 1.0)
    cot = 0.5 / np.tan(0.5 * u) / np.pi
    diag = diagonal_limit(curve, center, side)
    r_mat = k.imag.copy()
    np.fill_diagonal(r_mat, diag.imag)
    h_smooth = k.real - cot
    np.fill_diagonal(h_smooth, diag.real)
    return KernelOperators(curve, center, side, r_mat, h_smooth)


def conjugate(g):
    """Periodic conjugate function: ``exp(ins) -> -i sgn(n) exp(ins)``.

    Maps cos to sin and annihilates constants.
    """
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    k = np.fft.fftfreq(n, 1.0 / n)
    sgn = np.sign(k)
    sgn[n // 2] = 0.0
    return np.fft.ifft(-1j * sgn * np.fft.fft(g)).real


def cotangent_convolution(g):
    """Principal value of ``(1/2pi) int cot((t-s)/2) g(t) dt``, which is ``-conjugate(g)``."""
    return -conjugate(g)


def _check_length(ops, g):
    g = np.asarray(g, dtype=float)
    if g.shape != (ops.n_nodes,):
        raise ValueError(f"expected {ops.n_nodes} samples, got shape {g.shape}")
    return g


def apply_H(ops, g):
    g = _check_length(ops, g)
    return cotangent_convolution(g) + ops.H_smooth @ g * ops.h


def apply_R(ops, g):
    g = _check_length(ops, g)
    return ops.R_matrix @ g * ops.h


def solve_riemann_hilbert(ops, mu):
    """Solve for ``upsilon`` and ``c`` given boundary data ``mu``."""
    mu = _check_length(ops, mu)
    if not np.all(np.isfinite(mu)):
        raise SolverError("mu is not finite")
    n = ops.n_nodes
    system = np.eye(n) - ops.R_matrix * ops.h
    lu, piv = scipy.linalg.lu_factor(system, check_finite=False)
    anorm = np.linalg.norm(system, 1)
    rcond, info = scipy.linalg.lapack.dgecon(lu, anorm, norm="1")
    cond = np.inf if rcond == 0 else 1.0 / rcond
    if info != 0 or cond > MAX_CONDITION:
        raise SolverError(f"Nystrom system condition estimate {cond:.3e} exceeds "
                          f"{MAX_CONDITION:.0e}", condition=cond)
    rhs = -apply_H(ops, mu)
    ups = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    residual = float(np.max(np.abs(ups - apply_R(ops, ups) - rhs)))
    c_nodes = 0.5 * (apply_H(ops, ups) - (mu - apply_R(ops, mu)))
    return BoundaryData(mu, ups, float(np.mean(c_nodes)), residual, cond)


def dump_kernels(ops, path):
    """Write the kernel matrices to an ``.npz`` file (debugging aid)."""
    np.savez(path, R_matrix=ops.R_matrix, H_smooth=ops.H_smooth,
             gamma=ops.curve.gamma, center=np.complex128(ops.center),
             side=np.array(ops.side))
