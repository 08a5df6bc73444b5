import warnings

import numpy as np
import pytest

from confnav.exceptions import ConstructionError, DomainError, NearBoundaryWarning
from confnav.geometry import CurveSpec, sample_curve
from confnav.maps import build_exterior_map, build_interior_map, evaluate_stage, stage_derivative


pytestmark = pytest.mark.filterwarnings("ignore::confnav.exceptions.NearBoundaryWarning")


def circle(r, n, center=(0, 0), cw=False):
    return sample_curve(CurveSpec("circle", {"center": list(center), "radius": r,
                                             "clockwise": cw}), n)


def ellipse(a, b, n, cw=False, center=(0, 0), rot=0.0):
    return sample_curve(CurveSpec("ellipse", {"center": list(center), "semi_axes": [a, b],
                                              "rotation": rot, "clockwise": cw}), n)


def disk_points(center, r, n, seed=0, frac=0.9):
    rng = np.random.default_rng(seed)
    rad = r * frac * np.sqrt(rng.uniform(size=n))
    return center + rad * np.exp(2j * np.pi * rng.uniform(size=n))


def mobius(z, a, r, b):
    w, wb = (z - a) / r, (b - a) / r
    return (w - wb) / (1 - np.conj(wb) * w)


def test_interior_identity_on_unit_disk():
    st = build_interior_map(circle(1.0, 64), 0.0)
    z = disk_points(0, 1, 50)
    assert np.max(np.abs(evaluate_stage(st, z) - z)) <= 1e-12
    assert np.max(np.abs(stage_derivative(st, z) - 1)) <= 1e-11


def test_interior_radius_two():
    st = build_interior_map(circle(2.0, 64), 0.0)
    assert abs(st.c_const - np.log(2)) <= 1e-13
    z = disk_points(0, 2, 50)
    assert np.max(np.abs(evaluate_stage(st, z) - z / 2)) <= 1e-12
    assert abs(stage_derivative(st, 0j) - 0.5) <= 1e-12


def test_interior_mobius_oracle():
    a, r, b = 0.3 - 0.1j, 1.2, 0.5 + 0.4j
    st = build_interior_map(circle(r, 256, center=(a.real, a.imag)), b)
    z = disk_points(a, r, 100, seed=2)
    assert np.max(np.abs(evaluate_stage(st, z) - mobius(z, a, r, b))) <= 1e-8


def test_interior_ellipse_normalization():
    c = ellipse(2.0, 1.0, 256, center=(0.1, 0.2), rot=0.3)
    st = build_interior_map(c, 0.3 + 0.1j)
    assert abs(evaluate_stage(st, 0.3 + 0.1j)) <= 1e-14
    d0 = stage_derivative(st, 0.3 + 0.1j)
    assert d0.real > 0 and abs(d0.imag) <= 1e-12
    assert np.max(np.abs(np.abs(st.map_boundary) - 1)) <= 1e-14
    # interior points go strictly inside the unit disk
    z = 0.1 + 0.2j + (1.8 * np.cos(np.linspace(0, 6, 40)) + 0.9j * np.sin(np.linspace(0, 6, 40))
                      ) * np.exp(0.3j) * np.linspace(0.1, 0.95, 40)
    assert np.all(np.abs(evaluate_stage(st, z)) < 1)


def test_exterior_radius_two():
    st = build_exterior_map(circle(2.0, 64, cw=True), 0.0)
    assert abs(st.c_const + np.log(2)) <= 1e-13
    z = np.array([3.0, -2.5 + 1j, 4j, 10 + 10j])
    assert np.max(np.abs(evaluate_stage(st, z) - z / 2)) <= 1e-12
    assert np.max(np.abs(stage_derivative(st, z) - 0.5)) <= 1e-12


def test_exterior_center_does_not_matter():
    c = circle(1.0, 64, center=(0.5, 0), cw=True)
    z = np.array([2.0, -1.0 + 1j, 0.5 + 3j])
    for zc in (0.5, 0.6 + 0.2j):
        st = build_exterior_map(c, zc)
        assert np.max(np.abs(evaluate_stage(st, z) - (z - 0.5))) <= 1e-12


def joukowski_inverse(z, a, b):
    return (z + z * np.sqrt(1 - (a * a - b * b) / z ** 2)) / (a + b)


def test_exterior_ellipse_joukowski_oracle():
    a, b = 2.0, 1.0
    st = build_exterior_map(ellipse(a, b, 512, cw=True), 0.0)
    assert abs(st.c_const - np.log(2 / 3)) <= 1e-12
    t = np.linspace(0, 2 * np.pi, 20, endpoint=False)
    rad = np.linspace(1.1, 3.0, 20)
    z = rad * (a * np.cos(t) + 1j * b * np.sin(t))
    assert np.max(np.abs(evaluate_stage(st, z) - joukowski_inverse(z, a, b))) <= 1e-8
    assert np.all(np.abs(evaluate_stage(st, z)) > 1)


def test_exterior_growth_at_infinity():
    st = build_exterior_map(ellipse(1.5, 0.7, 256, cw=True, rot=0.5), 0.1)
    big = 1e6 * np.exp(1j * np.linspace(0, 6, 7))
    ratio = evaluate_stage(st, big) / big
    assert np.max(np.abs(ratio - np.exp(st.c_const))) <= 1e-6


@pytest.mark.parametrize("kind", ["interior", "exterior"])
def test_derivative_matches_finite_differences(kind):
    if kind == "interior":
        st = build_interior_map(ellipse(1.5, 1.0, 256, rot=0.2), 0.1j)
        z = disk_points(0, 0.9, 20, seed=4, frac=1.0)
    else:
        st = build_exterior_map(ellipse(1.5, 1.0, 256, cw=True, rot=0.2), 0.1j)
        z = 2.0 * np.exp(1j * np.linspace(0, 6, 20))
    h = 1e-5
    fd = (evaluate_stage(st, z + h) - evaluate_stage(st, z - h)) / (2 * h)
    fdi = (evaluate_stage(st, z + 1j * h) - evaluate_stage(st, z - 1j * h)) / (2j * h)
    d = stage_derivative(st, z)
    assert np.max(np.abs(fd - d) / np.abs(d)) <= 1e-8
    assert np.max(np.abs(fdi - d) / np.abs(d)) <= 1e-8


def test_derivative_never_vanishes_and_boundary_winds_once():
    st = build_interior_map(ellipse(2.0, 0.8, 256), 0.3)
    z = disk_points(0.3, 0.7, 200, seed=5)
    assert np.min(np.abs(stage_derivative(st, z))) > 1e-3
    assert abs(np.sum(np.angle(np.roll(st.map_boundary, -1) / st.map_boundary))
               - 2 * np.pi) <= 1e-10


def test_refinement_converges():
    z = np.array([0.2 + 0.1j, -0.8 + 0.3j, 1.2 - 0.2j])
    vals = {n: evaluate_stage(build_interior_map(ellipse(2.0, 0.7, n), 0.1), z)
            for n in (64, 128, 512)}
    e64 = np.max(np.abs(vals[64] - vals[512]))
    e128 = np.max(np.abs(vals[128] - vals[512]))
    assert e128 <= 1e-10
    assert e128 <= 1e-3 * e64


def test_construction_errors():
    with pytest.raises(ConstructionError):
        build_interior_map(circle(1.0, 32, cw=True), 0.0)
    with pytest.raises(ConstructionError):
        build_exterior_map(circle(1.0, 32), 0.0)
    with pytest.raises(ConstructionError):
        build_interior_map(circle(1.0, 32), 2.0)
    with pytest.raises(ConstructionError):
        build_exterior_map(circle(1.0, 32, cw=True), 2.0)


def test_domain_errors_and_warning():
    st = build_interior_map(circle(1.0, 64), 0.0)
    with pytest.raises(DomainError):
        evaluate_stage(st, 1.5)
    ext = build_exterior_map(circle(1.0, 64, cw=True), 0.0)
    with pytest.raises(DomainError):
        evaluate_stage(ext, 0.2)
    with pytest.warns(NearBoundaryWarning):
        evaluate_stage(st, 0.999)


def test_kernel_dump(tmp_path):
    build_interior_map(circle(1.0, 16), 0.0, dump_path=tmp_path / "d.npz")
    assert (tmp_path / "d.npz").exists()


def test_near_boundary_is_still_accurate():
    a, r, b = 0.0, 1.0, 0.3
    st = build_interior_map(circle(r, 256), b)
    z = 0.995 * np.exp(1j * np.linspace(0, 6, 12))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearBoundaryWarning)
        val = evaluate_stage(st, z)
    assert np.max(np.abs(val - mobius(z, a, r, b))) <= 1e-10
