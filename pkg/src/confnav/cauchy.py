"""Cauchy integrals of boundary data, evaluated off the curve.

Both sides use the trapezoidal rule with weights ``gamma'(s_j) * 2pi/N``.
The interior formula is the quotient (barycentric) form

    f(z) = sum w_j h_j / (gamma_j - z)  /  sum w_j / (gamma_j - z)

whose denominator is ``2*pi*i`` analytically; dividing by the computed
denominator cancels most of the quadrature error near the curve and makes
constants exact. On the exterior side, for ``f`` holomorphic outside the
curve with ``f(inf) = v`` and a counterclockwise curve,

    f(z) = (sum w_j h_j / (gamma_j - z) - 2*pi*i*v) / (sum w_j / (gamma_j - z) - 2*pi*i)

where the analytic value of the sum in the denominator is zero. Both forms
come from applying the Cauchy formula to ``(h(zeta) - f(z)) / (zeta - z)``.
For clockwise curves the sums change sign.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .exceptions import DomainError, SingularConfigurationError

_TWO_PI_I = 2j * np.pi


@dataclass(frozen=True, eq=False)
class BoundaryFunction:
    curve: object
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.curve.n_nodes,):
            raise ValueError("one value per curve node is required")
        if not np.all(np.isfinite(v)):
            raise ValueError("boundary values must be finite")
        object.__setattr__(self, "values", v)


def _sums(bf, z):
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128)).ravel()
    curve = bf.curve
    snap = 1e-14 * max(curve.diameter, 1.0)
    s0, d0, s1, d1, hit, _ = kernels.cauchy_sums(curve.gamma, curve.weights, bf.values,
                                                 z, snap)
    if np.any(hit >= 0):
        raise SingularConfigurationError("evaluation point coincides with a boundary node")
    return z, s0, d0, s1, d1


def _inside(curve, d0):
    # sum w/(gamma - z) = 2*pi*i * winding, with winding -1 for clockwise curves
    return np.abs(d0 / _TWO_PI_I) > 0.5


def _unwrap(z_in, out):
    return out[0] if np.ndim(z_in) == 0 else out.reshape(np.shape(z_in))


def cauchy_interior(bf, z):
    z_in = z
    z, s0, d0, _, _ = _sums(bf, z)
    if not np.all(_inside(bf.curve, d0)):
        raise DomainError("point outside the curve: use cauchy_exterior")
    return _unwrap(z_in, s0 / d0)


def _exterior(bf, z, value_at_infinity):
    z, s0, d0, s1, d1 = _sums(bf, z)
    if np.any(_inside(bf.curve, d0)):
        raise DomainError("point inside the curve: use cauchy_interior")
    o = bf.curve.orientation_sign
    den = o * d0 - _TWO_PI_I
    f = (o * s0 - _TWO_PI_I * value_at_infinity) / den
    return f, o * (s1 - f * d1) / den


def cauchy_exterior(bf, z, value_at_infinity=0.0):
    return _unwrap(z, _exterior(bf, z, value_at_infinity)[0])


def cauchy_derivative(bf, z, side, value_at_infinity=0.0):
    """Derivative of :func:`cauchy_interior` or :func:`cauchy_exterior` in ``z``."""
    z_in = z
    if side == "interior":
        z, s0, d0, s1, d1 = _sums(bf, z)
        if not np.all(_inside(bf.curve, d0)):
            raise DomainError("point outside the curve")
        f = s0 / d0
        return _unwrap(z_in, (s1 - f * d1) / d0)
    if side == "exterior":
        return _unwrap(z_in, _exterior(bf, z, value_at_infinity)[1])
    raise ValueError(f"side must be 'interior' or 'exterior', got {side!r}")
