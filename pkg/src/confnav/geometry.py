"""Workspaces built from smooth closed parametric curves.

Points in the plane are complex numbers throughout the package: ``x + iy``.
A curve is sampled at the uniform nodes ``s_j = 2*pi*j/N`` together with its
first and second derivatives in ``s``. External boundaries run
counterclockwise and obstacle boundaries clockwise, so the free space is
always on the left of every curve.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .exceptions import DegenerateCurveError, InvalidCurveError

CURVE_KINDS = ("circle", "ellipse", "trig_polynomial", "point_list")


def as_complex(p):
    """Accept ``[x, y]``, ``(x, y)``, a complex number or an array of them."""
    if isinstance(p, (complex, float, int, np.number)):
        return complex(p)
    a = np.asarray(p)
    if np.iscomplexobj(a):
        return a.astype(np.complex128)
    a = a.astype(float)
    if a.shape == (2,):
        return complex(a[0], a[1])
    if a.ndim >= 1 and a.shape[-1] == 2:
        return a[..., 0] + 1j * a[..., 1]
    return a.astype(np.complex128)


def nodes(n):
    return 2 * np.pi * np.arange(n) / n


def _check_n_nodes(n):
    if n < 16 or n & (n - 1):
        raise InvalidCurveError(f"n_nodes must be a power of two >= 16, got {n}")


def _wavenumbers(n):
    return np.fft.fftfreq(n, 1.0 / n)


def spectral_derivatives(gamma):
    """First and second derivatives of the trigonometric interpolant."""
    n = gamma.shape[0]
    k = _wavenumbers(n)
    k1 = k.copy()
    k1[n // 2] = 0.0  # odd derivative of the Nyquist mode is not resolved
    g_hat = np.fft.fft(gamma)
    return np.fft.ifft(1j * k1 * g_hat), np.fft.ifft(-(k ** 2) * g_hat)


def spectral_resample(values, n_new):
    """Trigonometric interpolation of periodic samples onto ``n_new`` nodes."""
    values = np.asarray(values, dtype=np.complex128)
    n = values.shape[0]
    if n_new == n:
        return values.copy()
    c = np.fft.fft(values) / n
    out = np.zeros(n_new, dtype=np.complex128)
    half = min(n, n_new) // 2
    out[:half] = c[:half]
    out[n_new - half + 1:] = c[n - half + 1:]
    # split (or fold) the shared Nyquist coefficient symmetrically
    if n_new > n:
        out[half] = 0.5 * c[half]
        out[n_new - half] = 0.5 * c[half]
    else:
        out[half] = c[half] + c[n - half]
    return np.fft.ifft(out) * n_new


@dataclass(frozen=True, eq=False)
class ParametricCurve:
    """Uniform-node samples of a 2*pi-periodic curve and its derivatives."""

    gamma: np.ndarray
    dgamma: np.ndarray
    ddgamma: np.ndarray

    @classmethod
    def from_samples(cls, gamma, check=True):
        """Build a curve whose derivatives come from spectral differentiation."""
        gamma = np.asarray(gamma, dtype=np.complex128)
        dg, ddg = spectral_derivatives(gamma)
        curve = cls(gamma, dg, ddg)
        if check:
            curve.check()
        return curve

    @property
    def n_nodes(self):
        return self.gamma.shape[0]

    @property
    def nodes(self):
        return nodes(self.n_nodes)

    @cached_property
    def signed_area(self):
        # Green's theorem with trapezoidal weights: spectrally accurate
        return 0.5 * np.mean((self.gamma.conj() * self.dgamma).imag) * 2 * np.pi

    @property
    def orientation(self):
        return "counterclockwise" if self.signed_area > 0 else "clockwise"

    @property
    def orientation_sign(self):
        return 1.0 if self.signed_area > 0 else -1.0

    @cached_property
    def weights(self):
        """Trapezoidal weights ``gamma'(s_j) * 2*pi/N`` for contour sums."""
        return self.dgamma * (2 * np.pi / self.n_nodes)

    @cached_property
    def diameter(self):
        g = self.gamma
        return float(np.max(np.abs(g[:, None] - g[None, :])))

    @cached_property
    def max_spacing(self):
        return float(np.max(np.abs(np.diff(np.append(self.gamma, self.gamma[0])))))

    @cached_property
    def polygon_tolerance(self):
        """Bound on the gap between the node polygon and the smooth curve."""
        h = 2 * np.pi / self.n_nodes
        return float(np.max(np.abs(self.ddgamma)) * h * h / 4)

    def resample(self, n_new):
        return ParametricCurve.from_samples(spectral_resample(self.gamma, n_new),
                                            check=False)

    def check(self):
        """Raise if a node has (numerically) zero speed or the polygon self-intersects."""
        speed = np.abs(self.dgamma)
        scale = max(float(np.max(np.abs(self.gamma))), 1.0)
        if not np.all(np.isfinite(self.gamma)) or not np.all(np.isfinite(self.dgamma)):
            raise InvalidCurveError("curve samples are not finite")
        if np.min(speed) <= 1e-12 * scale:
            j = int(np.argmin(speed))
            raise DegenerateCurveError(f"|gamma'| vanishes at node {j}")
        if polygon_self_intersects(self.gamma):
            raise InvalidCurveError("curve polygon is self-intersecting")
        return self

    def winding_and_distance(self, points):
        pts = np.atleast_1d(np.asarray(points, dtype=np.complex128))
        return kernels.winding_clearance(self.gamma, pts)


def _segments_cross(p1, p2, q1, q2):
    def cross(o, a, b):
        return ((a - o).conj() * (b - o)).imag

    d1 = cross(q1, q2, p1)
    d2 = cross(q1, q2, p2)
    d3 = cross(p1, p2, q1)
    d4 = cross(p1, p2, q2)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


def polygon_self_intersects(poly):
    """Segment-pair test on a closed polygon; adjacent segments are skipped."""
    n = poly.shape[0]
    a = poly
    b = np.roll(poly, -1)
    idx = np.arange(n)
    for i in range(n):
        j = idx[(idx > i + 1) & ~((i == 0) & (idx == n - 1))]
        if j.size and np.any(_segments_cross(a[i], b[i], a[j], b[j])):
            return True
    return False


def polygons_cross(p, q):
    """True when any segment of closed polygon ``p`` crosses one of ``q``."""
    pa, pb = p, np.roll(p, -1)
    qa, qb = q, np.roll(q, -1)
    for i in range(p.shape[0]):
        if np.any(_segments_cross(pa[i], pb[i], qa, qb)):
            return True
    return False


# --------------------------------------------------------------------------
# Curve specifications
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveSpec:
    """Input description of one boundary curve.

    ``params`` depends on ``kind``:

    circle
        ``center`` [x, y], ``radius``, optional ``clockwise`` (bool).
    ellipse
        ``center``, ``semi_axes`` [a, b], optional ``rotation`` (radians)
        and ``clockwise``.
    trig_polynomial
        ``coefficients``: list of ``[n, re, im]`` giving
        ``gamma(s) = center + sum c_n exp(i n s)``; optional ``center``.
    point_list
        ``points``: list of ``[x, y]`` taken as samples at uniform nodes;
        the curve is their trigonometric interpolant.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in CURVE_KINDS:
            raise InvalidCurveError(f"unknown curve kind {self.kind!r}")

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        try:
            kind = d.pop("kind")
        except KeyError:
            raise InvalidCurveError("curve spec is missing 'kind'") from None
        return cls(kind, d)

    def to_dict(self):
        return {"kind": self.kind, **self.params}


def _get(params, key, kind):
    try:
        return params[key]
    except KeyError:
        raise InvalidCurveError(f"{kind} curve needs {key!r}") from None


def sample_curve(spec, n_nodes):
    """Sample ``spec`` at ``n_nodes`` uniform nodes with exact derivatives where known."""
    _check_n_nodes(n_nodes)
    if isinstance(spec, dict):
        spec = CurveSpec.from_dict(spec)
    p = spec.params
    s = nodes(n_nodes)
    if spec.kind in ("circle", "ellipse"):
        c = as_complex(_get(p, "center", spec.kind))
        if spec.kind == "circle":
            a = b = float(_get(p, "radius", spec.kind))
            rot = 1.0
        else:
            a, b = (float(v) for v in _get(p, "semi_axes", spec.kind))
            rot = np.exp(1j * float(p.get("rotation", 0.0)))
        if a <= 0 or b <= 0:
            raise InvalidCurveError(f"{spec.kind} radii must be positive")
        sign = -1.0 if p.get("clockwise", False) else 1.0
        cs, sn = np.cos(s), np.sin(s)
        gamma = c + rot * (a * cs + 1j * sign * b * sn)
        dgamma = rot * (-a * sn + 1j * sign * b * cs)
        ddgamma = rot * (-a * cs - 1j * sign * b * sn)
        curve = ParametricCurve(gamma, dgamma, ddgamma)
    elif spec.kind == "trig_polynomial":
        c = as_complex(p.get("center", [0.0, 0.0]))
        coeffs = _get(p, "coefficients", spec.kind)
        gamma = np.full(n_nodes, c, dtype=np.complex128)
        dgamma = np.zeros(n_nodes, dtype=np.complex128)
        ddgamma = np.zeros(n_nodes, dtype=np.complex128)
        for n, re, im in coeffs:
            n = int(n)
            e = complex(re, im) * np.exp(1j * n * s)
            gamma += e
            dgamma += 1j * n * e
            ddgamma += -(n * n) * e
        curve = ParametricCurve(gamma, dgamma, ddgamma)
    else:
        pts = as_complex(np.asarray(_get(p, "points", spec.kind), dtype=float))
        pts = np.atleast_1d(pts)
        if pts.shape[0] < 3:
            raise InvalidCurveError("point_list needs at least 3 points")
        return ParametricCurve.from_samples(spectral_resample(pts, n_nodes))
    return curve.check()


# --------------------------------------------------------------------------
# Workspaces
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Workspace:
    """A bounded free space: one external curve minus M obstacle curves."""

    external: ParametricCurve
    internal: tuple
    obstacle_centers: np.ndarray
    interior_anchor: complex
    schema: dict = field(default=None, repr=False)

    @property
    def n_obstacles(self):
        return len(self.internal)

    @property
    def n_nodes(self):
        return self.external.n_nodes

    @property
    def curves(self):
        """Internal curves first, external last (the Koebe step order)."""
        return (*self.internal, self.external)


def workspace_from_dict(d, n_nodes=None):
    """Build a :class:`Workspace` from the JSON schema.

    ``{"external": spec, "internal": [spec...], "centers": [[x, y]...],
    "anchor": [x, y], "n_nodes": int}``
    """
    try:
        n = int(n_nodes if n_nodes is not None else d.get("n_nodes", 256))
        external = sample_curve(CurveSpec.from_dict(d["external"]), n)
        internal = tuple(sample_curve(CurveSpec.from_dict(c), n)
                         for c in d.get("internal", []))
        centers = np.array([as_complex(c) for c in d.get("centers", [])],
                           dtype=np.complex128)
        anchor = as_complex(d["anchor"])
    except KeyError as exc:
        raise InvalidCurveError(f"workspace is missing field {exc}") from None
    if centers.shape[0] != len(internal):
        raise InvalidCurveError(
            f"{len(internal)} obstacles but {centers.shape[0]} centers")
    schema = dict(d)
    schema["n_nodes"] = n
    return Workspace(external, internal, centers, complex(anchor), schema)


# --------------------------------------------------------------------------
# Validation and membership
# --------------------------------------------------------------------------

@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok


def _winding(curve, pts):
    w, _ = curve.winding_and_distance(pts)
    return w


def validate_workspace(ws):
    """List every violated workspace invariant; an empty report means valid."""
    report = ValidationReport()
    v = report.violations
    if ws.external.orientation != "counterclockwise":
        v.append("orientation: external curve must be counterclockwise")
    for i, c in enumerate(ws.internal):
        if c.orientation != "clockwise":
            v.append(f"orientation: internal curve {i} must be clockwise")
    for i, c in enumerate(ws.internal):
        if np.any(np.abs(_winding(ws.external, c.gamma)) != 1) or \
                polygons_cross(c.gamma, ws.external.gamma):
            v.append(f"containment: internal curve {i} is not inside the external curve")
    m = ws.n_obstacles
    for i in range(m):
        for j in range(i + 1, m):
            a, b = ws.internal[i], ws.internal[j]
            if (np.any(_winding(a, b.gamma) != 0) or np.any(_winding(b, a.gamma) != 0)
                    or polygons_cross(a.gamma, b.gamma)):
                v.append(f"disjointness: internal curves {i} and {j} overlap")
    for i, c in enumerate(ws.internal):
        z = ws.obstacle_centers[i]
        if abs(_winding(c, z)[0]) != 1:
            v.append(f"center: obstacle center {i} is not inside internal curve {i}")
    if not point_in_free_space(ws, ws.interior_anchor):
        v.append("anchor: interior anchor is not in the free space")
    return report


def clearance(ws, points):
    """Distance from each point to the nearest boundary node polygon."""
    pts = np.atleast_1d(np.asarray(points, dtype=np.complex128))
    dist = np.full(pts.shape, np.inf)
    for c in ws.curves:
        _, d = c.winding_and_distance(pts)
        dist = np.minimum(dist, d)
    return dist


def point_in_free_space(ws, p):
    """Winding-number membership test, conservative within the polygon tolerance.

    Scalar input gives a bool, array input a boolean array.
    """
    scalar = np.ndim(p) == 0
    pts = np.atleast_1d(np.asarray(p, dtype=np.complex128))
    w, d = ws.external.winding_and_distance(pts)
    inside = (w == 1) & (d > ws.external.polygon_tolerance)
    for c in ws.internal:
        w, d = c.winding_and_distance(pts)
        inside &= (w == 0) & (d > c.polygon_tolerance)
    return bool(inside[0]) if scalar else inside
