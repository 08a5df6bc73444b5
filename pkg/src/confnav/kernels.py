"""Hot inner loops.

Every kernel exists twice: a loop version compiled with numba and a
vectorised numpy version. ``USE_NUMBA`` (see :mod:`confnav._jit`) decides
which one the public names point to; both stay importable under their
``*_numba`` / ``*_numpy`` names so tests and the benchmark can compare them.
"""
import cmath
import math

import numpy as np

from ._jit import USE_NUMBA, njit

INTERIOR = 0
EXTERIOR = 1

_TWO_PI_I = 2j * np.pi


# --------------------------------------------------------------------------
# Cauchy sums
# --------------------------------------------------------------------------

@njit
def cauchy_sums_numba(gamma, weights, values, z, snap):
    m = z.shape[0]
    n = gamma.shape[0]
    s0 = np.zeros(m, np.complex128)
    d0 = np.zeros(m, np.complex128)
    s1 = np.zeros(m, np.complex128)
    d1 = np.zeros(m, np.complex128)
    hit = np.full(m, -1, np.int64)
    dmin = np.full(m, np.inf)
    for i in range(m):
        zi = z[i]
        a0 = 0j
        b0 = 0j
        a1 = 0j
        b1 = 0j
        best = np.inf
        for j in range(n):
            d = gamma[j] - zi
            ad = abs(d)
            if ad < best:
                best = ad
                if ad <= snap:
                    hit[i] = j
            if ad == 0.0:
                continue
            r = weights[j] / d
            r2 = r / d
            a0 += r * values[j]
            b0 += r
            a1 += r2 * values[j]
            b1 += r2
        s0[i] = a0
        d0[i] = b0
        s1[i] = a1
        d1[i] = b1
        dmin[i] = best
    return s0, d0, s1, d1, hit, dmin


def cauchy_sums_numpy(gamma, weights, values, z, snap):
    d = gamma[None, :] - z[:, None]
    ad = np.abs(d)
    jmin = np.argmin(ad, axis=1)
    dmin = ad[np.arange(z.shape[0]), jmin]
    hit = np.where(dmin <= snap, jmin, -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = weights[None, :] / d
        r2 = r / d
        s0 = r @ values
        d0 = r.sum(axis=1)
        s1 = r2 @ values
        d1 = r2.sum(axis=1)
    return s0, d0, s1, d1, hit, dmin


# --------------------------------------------------------------------------
# Composite map: a chain of interior / exterior stages
# --------------------------------------------------------------------------

@njit
def composite_eval_numba(kind, gamma, weights, fvals, mapb, mapd, zc, scale,
                         orient, floor, snap, z):
    n_stage, n = gamma.shape
    m = z.shape[0]
    out = np.empty(m, np.complex128)
    der = np.empty(m, np.complex128)
    ratio = np.full(m, np.inf)
    for i in range(m):
        w = z[i]
        dw = 1.0 + 0j
        worst = np.inf
        for s in range(n_stage):
            a0 = 0j
            b0 = 0j
            a1 = 0j
            b1 = 0j
            best = np.inf
            hit = -1
            ext = kind[s] == EXTERIOR
            for j in range(n):
                d = gamma[s, j] - w
                ad = abs(d)
                if ad < best:
                    best = ad
                    if ad <= snap[s]:
                        hit = j
                if ad == 0.0:
                    continue
                r = weights[s, j] / d
                r2 = r / d
                h = fvals[s, j]
                a0 += r * h
                b0 += r
                a1 += r2 * h
                b1 += r2
            q = best / floor[s]
            if q < worst:
                worst = q
            if hit >= 0:
                val = mapb[s, hit]
                dv = mapd[s, hit]
            elif ext:
                o = orient[s]
                den = o * b0 - 2j * math.pi
                f = o * a0 / den
                fp = o * (a1 - f * b1) / den
                g = w - zc[s]
                e = cmath.exp(-f)
                val = scale[s] * g * e
                dv = scale[s] * e * (1.0 - g * fp)
            else:
                f = a0 / b0
                fp = (a1 - f * b1) / b0
                g = w - zc[s]
                e = cmath.exp(g * f)
                val = scale[s] * g * e
                dv = scale[s] * e * (1.0 + g * (f + g * fp))
            dw = dw * dv
            w = val
        out[i] = w
        der[i] = dw
        ratio[i] = worst
    return out, der, ratio


def composite_eval_numpy(kind, gamma, weights, fvals, mapb, mapd, zc, scale,
                         orient, floor, snap, z):
    w = np.array(z, dtype=np.complex128, copy=True)
    dw = np.ones_like(w)
    ratio = np.full(w.shape, np.inf)
    rows = np.arange(w.shape[0])
    for s in range(gamma.shape[0]):
        d = gamma[s][None, :] - w[:, None]
        ad = np.abs(d)
        jmin = np.argmin(ad, axis=1)
        best = ad[rows, jmin]
        hit = best <= snap[s]
        ratio = np.minimum(ratio, best / floor[s])
        with np.errstate(divide="ignore", invalid="ignore"):
            r = weights[s][None, :] / d
            r2 = r / d
            g = w - zc[s]
            if kind[s] == EXTERIOR:
                o = orient[s]
                den = o * r.sum(axis=1) - _TWO_PI_I
                f = o * (r @ fvals[s]) / den
                fp = o * (r2 @ fvals[s] - f * r2.sum(axis=1)) / den
                e = np.exp(-f)
                val = scale[s] * g * e
                dv = scale[s] * e * (1.0 - g * fp)
            else:
                b0 = r.sum(axis=1)
                f = (r @ fvals[s]) / b0
                fp = (r2 @ fvals[s] - f * r2.sum(axis=1)) / b0
                e = np.exp(g * f)
                val = scale[s] * g * e
                dv = scale[s] * e * (1.0 + g * (f + g * fp))
        val = np.where(hit, mapb[s][jmin], val)
        dv = np.where(hit, mapd[s][jmin], dv)
        dw = dw * dv
        w = val
    return w, dw, ratio


# --------------------------------------------------------------------------
# Winding number and clearance against closed node polygons
# --------------------------------------------------------------------------

@njit
def winding_clearance_numba(poly, pts):
    n = poly.shape[0]
    m = pts.shape[0]
    wind = np.zeros(m, np.int64)
    dist = np.empty(m)
    for i in range(m):
        p = pts[i]
        total = 0.0
        best = np.inf
        for j in range(n):
            a = poly[j] - p
            b = poly[(j + 1) % n] - p
            total += cmath.phase(b / a) if a != 0 else 0.0
            e = b - a
            ee = e.real * e.real + e.imag * e.imag
            t = 0.0
            if ee > 0.0:
                t = -(a.real * e.real + a.imag * e.imag) / ee
                t = min(1.0, max(0.0, t))
            dd = abs(a + t * e)
            if dd < best:
                best = dd
        wind[i] = int(round(total / (2.0 * math.pi)))
        dist[i] = best
    return wind, dist


def winding_clearance_numpy(poly, pts):
    a = poly[None, :] - pts[:, None]
    b = np.roll(poly, -1)[None, :] - pts[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        ang = np.angle(b / a)
    ang = np.where(a == 0, 0.0, ang)
    wind = np.rint(ang.sum(axis=1) / (2 * np.pi)).astype(np.int64)
    e = b - a
    ee = (e * e.conj()).real
    with np.errstate(divide="ignore", invalid="ignore"):
        t = -(a.real * e.real + a.imag * e.imag) / ee
    t = np.clip(np.where(ee > 0, t, 0.0), 0.0, 1.0)
    dist = np.abs(a + t * e).min(axis=1)
    return wind, dist


# --------------------------------------------------------------------------
# Discrete Frechet distance between two polylines
# --------------------------------------------------------------------------

@njit
def frechet_numba(p, q):
    n = p.shape[0]
    m = q.shape[0]
    ca = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            d = abs(p[i] - q[j])
            if i == 0 and j == 0:
                ca[i, j] = d
            elif i == 0:
                ca[i, j] = max(ca[i, j - 1], d)
            elif j == 0:
                ca[i, j] = max(ca[i - 1, j], d)
            else:
                c = min(ca[i - 1, j], min(ca[i - 1, j - 1], ca[i, j - 1]))
                ca[i, j] = max(c, d)
    return ca[n - 1, m - 1]


def frechet_numpy(p, q):
    # anti-diagonal wavefront: cell (i, j) only needs cells on earlier diagonals
    n, m = p.shape[0], q.shape[0]
    dist = np.abs(p[:, None] - q[None, :])
    ca = np.full((n, m), np.inf)
    for k in range(n + m - 1):
        i = np.arange(max(0, k - m + 1), min(n, k + 1))
        j = k - i
        if k == 0:
            ca[0, 0] = dist[0, 0]
            continue
        prev = np.full(i.shape, np.inf)
        ok = i > 0
        prev[ok] = np.minimum(prev[ok], ca[i[ok] - 1, j[ok]])
        ok = j > 0
        prev[ok] = np.minimum(prev[ok], ca[i[ok], j[ok] - 1])
        ok = (i > 0) & (j > 0)
        prev[ok] = np.minimum(prev[ok], ca[i[ok] - 1, j[ok] - 1])
        ca[i, j] = np.maximum(prev, dist[i, j])
    return float(ca[n - 1, m - 1])


if USE_NUMBA:
    cauchy_sums = cauchy_sums_numba
    composite_eval = composite_eval_numba
    winding_clearance = winding_clearance_numba
    frechet = frechet_numba
else:
    cauchy_sums = cauchy_sums_numpy
    composite_eval = composite_eval_numpy
    winding_clearance = winding_clearance_numpy
    frechet = frechet_numpy
