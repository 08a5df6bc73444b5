"""Binary cache of a converged composite map and its sphere world.

The file is an uncompressed ``.npz`` archive (no pickled objects). Entry
``header`` holds a JSON document with, in order: ``format_version``,
``workspace_hash``, ``n_nodes``, ``tol``, ``n_iterations``, ``final_delta``,
``n_stages``, ``stage_kinds`` and ``schema`` (the workspace description).
Per-stage records follow as ``stage{i}/<field>`` arrays, then
``image{j}/<field>``, ``tracked_points`` and the fitted circles
``sphere/centers``, ``sphere/radii`` and ``sphere/residuals``. Every array is
stored at full precision, so a round trip is bit-exact.
"""
import hashlib
import json
import zipfile

import numpy as np

from .exceptions import CacheFormatError, StaleCacheError
from .geometry import ParametricCurve, Workspace, workspace_from_dict
from .koebe import CompositeMap, SphereWorld
from .maps import MapStage

FORMAT_VERSION = 1
_CURVE_FIELDS = ("gamma", "dgamma", "ddgamma")
_STAGE_FIELDS = ("center", "c_const", "f_boundary", "map_boundary", "theta")


def workspace_hash(schema, n_nodes, tol):
    """SHA-256 of the canonical workspace JSON plus node count and tolerance."""
    if isinstance(schema, Workspace):
        schema = schema.schema
    body = {k: v for k, v in schema.items() if k != "n_nodes"}
    text = json.dumps(body, sort_keys=True, separators=(",", ":"))
    text += f"|n_nodes={int(n_nodes)}|tol={float(tol)!r}"
    return hashlib.sha256(text.encode()).hexdigest()


def _put_curve(arrays, prefix, curve):
    for name in _CURVE_FIELDS:
        arrays[f"{prefix}/{name}"] = getattr(curve, name)


def _get_curve(data, prefix):
    return ParametricCurve(*(data[f"{prefix}/{name}"] for name in _CURVE_FIELDS))


def save_cache(cm, sw, path, tol):
    """Write ``cm`` and ``sw`` to ``path``."""
    ws = cm.workspace
    header = {
        "format_version": FORMAT_VERSION,
        "workspace_hash": workspace_hash(ws.schema, ws.n_nodes, tol),
        "n_nodes": int(ws.n_nodes),
        "tol": float(tol),
        "n_iterations": int(cm.n_iterations),
        "final_delta": float(cm.final_delta),
        "n_stages": len(cm.stages),
        "stage_kinds": [s.kind for s in cm.stages],
        "schema": ws.schema,
    }
    arrays = {"header": np.array(json.dumps(header))}
    for i, st in enumerate(cm.stages):
        _put_curve(arrays, f"stage{i}", st.curve)
        arrays[f"stage{i}/center"] = np.complex128(st.center)
        arrays[f"stage{i}/c_const"] = np.float64(st.c_const)
        for name in ("f_boundary", "map_boundary", "theta"):
            arrays[f"stage{i}/{name}"] = getattr(st, name)
    for j, c in enumerate(cm.image_curves):
        _put_curve(arrays, f"image{j}", c)
    arrays["tracked_points"] = cm.tracked_points
    arrays["sphere/centers"] = np.asarray(sw.obstacle_centers, dtype=np.complex128)
    arrays["sphere/radii"] = np.asarray(sw.obstacle_radii, dtype=float)
    arrays["sphere/residuals"] = np.asarray(sw.fit_residuals, dtype=float)
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def read_header(path):
    try:
        with np.load(path, allow_pickle=False) as data:
            return json.loads(str(data["header"][()]))
    except (zipfile.BadZipFile, KeyError, ValueError, EOFError) as exc:
        raise CacheFormatError(f"{path}: not a valid cache file ({exc})") from None


def load_cache(path, workspace=None, tol=None):
    """Read a cache written by :func:`save_cache`.

    If ``workspace`` (a schema dict or :class:`Workspace`) is given, its hash,
    computed with ``tol`` or the cached tolerance, must match the stored one.
    Returns ``(CompositeMap, SphereWorld)``.
    """
    header = read_header(path)
    if header.get("format_version") != FORMAT_VERSION:
        raise CacheFormatError(f"{path}: unsupported format version "
                               f"{header.get('format_version')!r}")
    if workspace is not None:
        schema = workspace.schema if isinstance(workspace, Workspace) else workspace
        n = schema.get("n_nodes", header["n_nodes"])
        expected = workspace_hash(schema, n, header["tol"] if tol is None else tol)
        if expected != header["workspace_hash"]:
            raise StaleCacheError(f"{path}: cache was built for a different workspace, "
                                  "node count or tolerance")
    try:
        with np.load(path, allow_pickle=False) as data:
            stages = []
            for i, kind in enumerate(header["stage_kinds"]):
                p = f"stage{i}"
                stages.append(MapStage(
                    kind, _get_curve(data, p), complex(data[f"{p}/center"][()]),
                    float(data[f"{p}/c_const"][()]), data[f"{p}/f_boundary"],
                    data[f"{p}/map_boundary"], data[f"{p}/theta"]))
            n_images = len(header["schema"].get("internal", [])) + 1
            images = [_get_curve(data, f"image{j}") for j in range(n_images)]
            tracked = data["tracked_points"]
            sw = SphereWorld(data["sphere/centers"], data["sphere/radii"],
                             data["sphere/residuals"])
    except (zipfile.BadZipFile, KeyError, ValueError, EOFError) as exc:
        raise CacheFormatError(f"{path}: incomplete cache file ({exc})") from None
    ws = workspace_from_dict(header["schema"], n_nodes=header["n_nodes"])
    cm = CompositeMap(stages, images, tracked, ws, header["n_iterations"],
                      header["final_delta"])
    return cm, sw
