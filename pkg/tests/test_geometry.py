import numpy as np
import pytest

from confnav.exceptions import DegenerateCurveError, InvalidCurveError
from confnav.geometry import (CurveSpec, ParametricCurve, clearance, nodes,
                              point_in_free_space, polygon_self_intersects, sample_curve,
                              spectral_derivatives, spectral_resample, validate_workspace,
                              workspace_from_dict)


def circle(c=(0, 0), r=1.0, cw=False):
    return {"kind": "circle", "center": list(c), "radius": r, "clockwise": cw}


def test_unit_circle_samples():
    c = sample_curve(CurveSpec.from_dict(circle()), 64)
    e = np.exp(1j * nodes(64))
    assert np.allclose(c.gamma, e, atol=1e-15)
    assert np.allclose(c.dgamma, 1j * e, atol=1e-15)
    assert c.orientation == "counterclockwise"


def test_ellipse_samples():
    spec = CurveSpec("ellipse", {"center": [0, 0], "semi_axes": [2, 1]})
    c = sample_curve(spec, 128)
    s = nodes(128)
    assert np.allclose(c.gamma, 2 * np.cos(s) + 1j * np.sin(s), atol=1e-15)
    assert np.allclose(c.ddgamma, -2 * np.cos(s) - 1j * np.sin(s), atol=1e-15)


def test_clockwise_flag_reverses_orientation():
    c = sample_curve(CurveSpec.from_dict(circle(cw=True)), 32)
    assert c.orientation == "clockwise"
    assert c.orientation_sign == -1


def test_point_list_spectral_derivatives():
    s = nodes(64)
    pts = np.exp(1j * s) + 0.1 * np.exp(3j * s)
    spec = CurveSpec("point_list", {"points": np.column_stack([pts.real, pts.imag]).tolist()})
    c = sample_curve(spec, 64)
    exact = 1j * np.exp(1j * s) + 0.3j * np.exp(3j * s)
    assert np.max(np.abs(c.dgamma - exact)) <= 1e-10


@pytest.mark.parametrize("degree", [1, 3, 5, 8])
def test_trig_polynomial_derivatives_match_analytic(degree):
    rng = np.random.default_rng(degree)
    ks = list(range(-degree, degree + 1))
    coef = rng.normal(size=len(ks)) + 1j * rng.normal(size=len(ks))
    coef *= 0.05
    coef[ks.index(1)] = 2.0  # keep the curve a simple loop
    n = 4 * max(degree, 4)
    n = 1 << (n - 1).bit_length()
    spec = CurveSpec("trig_polynomial",
                     {"coefficients": [[k, c.real, c.imag] for k, c in zip(ks, coef)]})
    c = sample_curve(spec, n)
    s = nodes(n)
    d1 = sum(1j * k * a * np.exp(1j * k * s) for k, a in zip(ks, coef))
    d2 = sum(-(k ** 2) * a * np.exp(1j * k * s) for k, a in zip(ks, coef))
    # compare spectral differentiation of the samples with the analytic values
    sd1, sd2 = spectral_derivatives(c.gamma)
    assert np.max(np.abs(sd1 - d1)) <= 1e-10 * np.max(np.abs(d1))
    assert np.max(np.abs(sd2 - d2)) <= 1e-10 * np.max(np.abs(d2))
    assert np.max(np.abs(c.dgamma - d1)) <= 1e-10 * np.max(np.abs(d1))


def test_resampling_idempotence():
    s = nodes(64)
    g = 1.3 * np.exp(1j * s) + 0.2 * np.exp(-2j * s) + 0.05 * np.exp(4j * s)
    up = spectral_resample(g, 128)
    back = spectral_resample(up, 64)
    assert np.max(np.abs(back - g)) <= 1e-12
    # the fine samples interpolate the same trigonometric polynomial
    s2 = nodes(128)
    exact = 1.3 * np.exp(1j * s2) + 0.2 * np.exp(-2j * s2) + 0.05 * np.exp(4j * s2)
    assert np.max(np.abs(up - exact)) <= 1e-12


def test_zero_speed_node_is_degenerate():
    # e^{is} - e^{3is}/3 has a cusp at s = 0
    spec = CurveSpec("trig_polynomial", {"coefficients": [[1, 1, 0], [3, -1 / 3, 0]]})
    with pytest.raises(DegenerateCurveError):
        sample_curve(spec, 64)


def test_self_intersection_is_invalid():
    s = nodes(64)
    fig8 = np.sin(s) + 0.5j * np.sin(2 * s)
    spec = CurveSpec("point_list", {"points": np.column_stack([fig8.real, fig8.imag]).tolist()})
    with pytest.raises(InvalidCurveError):
        sample_curve(spec, 64)
    assert polygon_self_intersects(fig8)


def test_bad_node_count_and_kind():
    with pytest.raises(InvalidCurveError):
        sample_curve(CurveSpec.from_dict(circle()), 48)
    with pytest.raises(InvalidCurveError):
        CurveSpec.from_dict({"kind": "spline"})


def test_curve_spec_round_trip():
    d = {"kind": "ellipse", "center": [0.1, 0.2], "semi_axes": [1.0, 0.5], "rotation": 0.3,
         "clockwise": True}
    spec = CurveSpec.from_dict(d)
    assert CurveSpec.from_dict(spec.to_dict()) == spec


def _ws(internal, centers, anchor=(0, 0)):
    return workspace_from_dict({"external": circle(), "internal": internal,
                                "centers": centers, "anchor": list(anchor), "n_nodes": 128})


def test_validate_accepts_simple_workspace():
    ws = _ws([circle((0.5, 0), 0.2, cw=True)], [[0.5, 0]])
    assert validate_workspace(ws).ok


def test_validate_reports_overlap():
    ws = _ws([circle((0.2, 0), 0.3, cw=True), circle((-0.2, 0), 0.3, cw=True)],
             [[0.2, 0], [-0.2, 0]], anchor=(0, 0.6))
    rep = validate_workspace(ws)
    assert not rep.ok
    assert any("disjointness" in v and "0 and 1" in v for v in rep.violations)


def test_validate_reports_orientation():
    ws = _ws([circle((0.5, 0), 0.2, cw=False)], [[0.5, 0]])
    rep = validate_workspace(ws)
    assert any(v.startswith("orientation") for v in rep.violations)


def test_validate_reports_containment_center_and_anchor():
    ws = _ws([circle((1.5, 0), 0.2, cw=True)], [[0.0, 0.5]], anchor=(1.5, 0))
    text = " ".join(validate_workspace(ws).violations)
    assert "containment" in text and "center" in text and "anchor" in text


def test_point_in_free_space_examples():
    ws = _ws([circle((0.5, 0), 0.2, cw=True)], [[0.5, 0]])
    assert point_in_free_space(ws, 0j)
    assert not point_in_free_space(ws, 1.5 + 0j)
    assert not point_in_free_space(ws, 0.5 + 0j)
    mask = point_in_free_space(ws, np.array([0j, 1.5, 0.5]))
    assert mask.tolist() == [True, False, False]


def test_winding_nudges_around_obstacle():
    ws = _ws([circle((0.3, 0.1), 0.25, cw=True)], [[0.3, 0.1]])
    c = ws.internal[0]
    mid = 0.5 * (c.gamma + np.roll(c.gamma, -1))
    tangent = np.roll(c.gamma, -1) - c.gamma
    # clockwise curve: the free space is on the left of the direction of travel
    left = 1j * tangent / np.abs(tangent)
    step = 1e-3 * c.diameter
    assert not np.any(point_in_free_space(ws, mid - step * left))
    assert np.all(point_in_free_space(ws, mid + step * left))


def test_clearance_of_disk():
    ws = _ws([], [])
    d = clearance(ws, np.array([0j, 0.5]))
    assert np.allclose(d, [1.0, 0.5], atol=1e-3)


def test_resample_curve_keeps_shape():
    c = ParametricCurve.from_samples(2 * np.cos(nodes(64)) + 1j * np.sin(nodes(64)))
    f = c.resample(256)
    assert f.n_nodes == 256
    assert np.allclose(f.gamma[::4], c.gamma, atol=1e-13)


def test_workspace_missing_field():
    with pytest.raises(InvalidCurveError):
        workspace_from_dict({"external": circle()})
    with pytest.raises(InvalidCurveError):
        workspace_from_dict({"external": circle(), "internal": [circle((0.5, 0), 0.1, True)],
                             "centers": [], "anchor": [0, 0]})
