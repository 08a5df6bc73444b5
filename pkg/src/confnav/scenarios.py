"""Built-in workspaces in the style of the published simulations.

The published figures give obstacle types but no coordinates, so these
geometries are re-authored: an ellipse, an inverse ellipse, a plum and a
letter C inside a rounded square, and a workspace bounded by five ellipses.
"""
import numpy as np

from .geometry import nodes

POINT_LIST_SAMPLES = 128


def _pts(z):
    return [[float(p.real), float(p.imag)] for p in z]


def circle(center, radius, clockwise=False):
    return {"kind": "circle", "center": list(center), "radius": radius,
            "clockwise": clockwise}


def ellipse(center, a, b, rotation=0.0, clockwise=False):
    return {"kind": "ellipse", "center": list(center), "semi_axes": [a, b],
            "rotation": rotation, "clockwise": clockwise}


def plum(center, radius, amplitude=0.15, lobes=5):
    """Clockwise curve ``r = radius (1 + amplitude cos(lobes s))``."""
    half = 0.5 * amplitude * radius
    return {"kind": "trig_polynomial", "center": list(center),
            "coefficients": [[-1, radius, 0.0], [-(lobes + 1), half, 0.0],
                             [lobes - 1, half, 0.0]]}


def inverse_ellipse(center, size, a=1.0, b=0.55, rotation=0.0):
    """Image of an ellipse under ``z -> 1/z``; peanut shaped when ``a/b`` is large."""
    s = nodes(POINT_LIST_SAMPLES)
    z = complex(*center) + size * np.exp(1j * rotation) / (a * np.cos(s) + 1j * b * np.sin(s))
    return {"kind": "point_list", "points": _pts(z)}


def letter_c(center, radius, thickness, half_angle=2.2, facing=0.0):
    """A smooth C: an arc of ``2*half_angle`` radians with rounded tips."""
    s = nodes(POINT_LIST_SAMPLES)
    r = radius + thickness * np.sin(s)
    z = complex(*center) + r * np.exp(1j * (facing + np.pi + half_angle * np.cos(s)))
    area = 0.5 * np.sum((np.conj(z) * (np.roll(z, -1) - z)).imag)
    if area > 0:
        z = z[::-1]
    return {"kind": "point_list", "points": _pts(z)}


def letter_c_center(center, radius, facing=0.0):
    c = complex(*center) + radius * np.exp(1j * (facing + np.pi))
    return [c.real, c.imag]


def _external():
    return {"kind": "trig_polynomial", "coefficients": [[1, 1.5, 0.0], [-3, 0.1, 0.0]]}


def scenario1(n_nodes=256):
    """Kinematic-robot scene: ellipse, inverse ellipse, plum and letter C."""
    c_center = (-0.15, 0.62)
    return {
        "name": "scenario1",
        "external": _external(),
        "internal": [
            ellipse((0.7, 0.1), 0.12, 0.3, rotation=0.2, clockwise=True),
            inverse_ellipse((-0.68, -0.28), 0.13, rotation=0.5),
            plum((0.1, -0.6), 0.17),
            letter_c(c_center, 0.3, 0.1),
        ],
        "centers": [[0.7, 0.1], [-0.68, -0.28], [0.1, -0.6],
                    letter_c_center(c_center, 0.3)],
        "anchor": [0.0, 0.0],
        "n_nodes": n_nodes,
    }


def three_obstacles(n_nodes=256):
    """Ellipse, inverse ellipse and plum inside a rounded square."""
    return {
        "name": "three_obstacles",
        "external": _external(),
        "internal": [
            ellipse((0.7, 0.1), 0.12, 0.3, rotation=0.2, clockwise=True),
            inverse_ellipse((-0.68, -0.28), 0.13, rotation=0.5),
            plum((0.1, -0.6), 0.17),
        ],
        "centers": [[0.7, 0.1], [-0.68, -0.28], [0.1, -0.6]],
        "anchor": [0.0, 0.0],
        "n_nodes": n_nodes,
    }


def scenario2(n_nodes=256):
    """Dynamic-robot scene bounded by five ellipses."""
    return {
        "name": "scenario2",
        "external": ellipse((0.0, 0.0), 1.6, 1.2),
        "internal": [
            ellipse((-0.55, 0.4), 0.1, 0.25, rotation=0.4, clockwise=True),
            ellipse((-0.5, -0.35), 0.22, 0.1, rotation=-0.3, clockwise=True),
            ellipse((0.55, 0.35), 0.25, 0.12, rotation=0.3, clockwise=True),
            ellipse((0.5, -0.45), 0.15, 0.2, clockwise=True),
        ],
        "centers": [[-0.55, 0.4], [-0.5, -0.35], [0.55, 0.35], [0.5, -0.45]],
        "anchor": [0.0, 0.0],
        "n_nodes": n_nodes,
    }


def unit_disk(n_nodes=256):
    return {"name": "unit_disk", "external": circle((0.0, 0.0), 1.0),
            "internal": [], "centers": [], "anchor": [0.0, 0.0], "n_nodes": n_nodes}


def circular(n_nodes=256):
    """Already a sphere world: unit disk minus two small disks."""
    return {"name": "circular", "external": circle((0.0, 0.0), 1.0),
            "internal": [circle((0.5, 0.0), 0.15, clockwise=True),
                         circle((-0.3, 0.45), 0.1, clockwise=True)],
            "centers": [[0.5, 0.0], [-0.3, 0.45]], "anchor": [0.0, 0.0],
            "n_nodes": n_nodes}


BUILTIN = {
    "scenario1": scenario1,
    "scenario2": scenario2,
    "three_obstacles": three_obstacles,
    "unit_disk": unit_disk,
    "circular": circular,
}

# start points and goals of the published runs
SCENARIO1_STARTS = [(1.0, 0.6), (-1.0, 0.6), (1.0, -0.6), (0.05, -1.0)]
SCENARIO2_START = (-1.0, 0.1)
GOAL = (0.0, 0.0)
