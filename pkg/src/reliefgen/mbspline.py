"""Multilevel uniform cubic B-spline scattered-data approximation.

Level 0 is a 4x4 control lattice (one cell) fitted with the local
least-squares BA formula; every following level doubles the lattice
resolution and fits the residual of the previous levels.  For fast
evaluation the per-level lattices are collapsed onto the finest lattice
by B-spline subdivision, so a full-field query costs one lattice lookup.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _basis(s):
    """Cubic B-spline basis values B0..B3 at local coordinate s in [0,1)."""
    s2 = s * s
    s3 = s2 * s
    return np.stack([
        (1.0 - s) ** 3 / 6.0,
        (3.0 * s3 - 6.0 * s2 + 4.0) / 6.0,
        (-3.0 * s3 + 3.0 * s2 + 3.0 * s + 1.0) / 6.0,
        s3 / 6.0,
    ], axis=-1)


def _locate(xy, origin, size, m, n):
    u = (xy[:, 0] - origin[0]) / size[0] * m
    v = (xy[:, 1] - origin[1]) / size[1] * n
    u = np.clip(u, 0.0, np.nextafter(float(m), 0.0))
    v = np.clip(v, 0.0, np.nextafter(float(n), 0.0))
    i = np.minimum(u.astype(np.int64), m - 1)
    j = np.minimum(v.astype(np.int64), n - 1)
    return i, j, _basis(u - i), _basis(v - j)


@dataclass(frozen=True)
class Lattice:
    """One uniform cubic B-spline control lattice over a rectangle."""

    coeffs: np.ndarray  # (m+3, n+3); coeffs[a, b] is control (a-1, b-1)
    origin: tuple
    size: tuple

    @property
    def cells(self):
        return self.coeffs.shape[0] - 3, self.coeffs.shape[1] - 3

    def eval(self, xy):
        m, n = self.cells
        i, j, bx, by = _locate(np.asarray(xy, dtype=np.float64),
                               self.origin, self.size, m, n)
        out = np.zeros(len(i))
        c = self.coeffs
        for k in range(4):
            for l in range(4):
                out += bx[:, k] * by[:, l] * c[i + k, j + l]
        return out


def _refine_axis(c, axis):
    """Double a lattice's resolution along one axis (cubic subdivision).

    Control i of the coarse lattice maps to controls 2i of the fine one;
    the surface is reproduced exactly.
    """
    c = np.moveaxis(c, axis, 0)
    m = c.shape[0] - 3
    out = np.zeros((2 * m + 3,) + c.shape[1:])
    out[1:2 * m + 2:2] = (c[:m + 1] + 6.0 * c[1:m + 2] + c[2:m + 3]) / 8.0
    out[0:2 * m + 3:2] = (c[:m + 2] + c[1:m + 3]) / 2.0
    return np.moveaxis(out, 0, axis)


def refine(lat: Lattice) -> Lattice:
    c = _refine_axis(_refine_axis(lat.coeffs, 0), 1)
    return Lattice(c, lat.origin, lat.size)


class GridSampler:
    """Precomputed cell indices and basis weights for a fixed query set.

    Repeated evaluation of same-geometry lattices (same origin, size and
    cell counts) over the same points reduces to one gather per frame.
    """

    def __init__(self, xy, origin, size, m: int, n: int):
        xy = np.asarray(xy, dtype=np.float64)
        i, j, bx, by = _locate(xy, origin, size, m, n)
        off = (np.arange(4)[:, None] * (n + 3) + np.arange(4)).ravel()
        self.cells = (m, n)
        self.idx = (i * (n + 3) + j)[:, None] + off
        self.w = (bx[:, :, None] * by[:, None, :]).reshape(len(xy), 16)

    def sample(self, lat: Lattice):
        if lat.cells != self.cells:
            raise ValueError(f"lattice cells {lat.cells} != {self.cells}")
        return np.einsum("nt,nt->n", self.w, lat.coeffs.ravel()[self.idx])


class _LevelPlan:
    """Per-level site data reused across fits on the same scattered sites."""

    def __init__(self, xy, origin, size, m, n):
        i, j, bx, by = _locate(xy, origin, size, m, n)
        off = (np.arange(4)[:, None] * (n + 3) + np.arange(4)).ravel()
        self.shape = (m + 3, n + 3)
        self.idx = (i * (n + 3) + j)[:, None] + off
        self.w = (bx[:, :, None] * by[:, None, :]).reshape(len(xy), 16)
        w2 = self.w * self.w
        self.w3 = w2 * self.w
        self.ssum = (bx * bx).sum(axis=1) * (by * by).sum(axis=1)
        size_flat = self.shape[0] * self.shape[1]
        self.den = np.bincount(self.idx.ravel(), weights=w2.ravel(),
                               minlength=size_flat).astype(np.float64)

    def ba_fit(self, z):
        phi = z / self.ssum
        num = np.bincount(self.idx.ravel(),
                          weights=(self.w3 * phi[:, None]).ravel(),
                          minlength=len(self.den)).astype(np.float64)
        return np.divide(num, self.den, out=np.zeros_like(num),
                         where=self.den > 1e-300).reshape(self.shape)

    def eval(self, coeffs):
        return np.einsum("nt,nt->n", self.w, coeffs.ravel()[self.idx])


class FitPlan:
    """Reusable multilevel fit over a fixed site set (values vary per call)."""

    def __init__(self, xy, origin, size, levels: int = 8, passes: int = 2):
        if levels < 1:
            raise ValueError("levels must be >= 1")
        xy = np.asarray(xy, dtype=np.float64)
        self.origin, self.size = origin, size
        self.passes = passes
        self.levels = [_LevelPlan(xy, origin, size, 2 ** lev, 2 ** lev)
                       for lev in range(levels)]

    def fit(self, values) -> "MultilevelBSpline":
        values = np.asarray(values, dtype=np.float64)
        mean = float(values.mean()) if len(values) else 0.0
        residual = values - mean
        lats = []
        resid_hist = []
        for lev, lp in enumerate(self.levels):
            coeffs = np.zeros(lp.shape)
            for _ in range(self.passes):
                c = lp.ba_fit(residual)
                residual = residual - lp.eval(c)
                coeffs += c
            if lev == 0:
                coeffs += mean
            lats.append(Lattice(coeffs, self.origin, self.size))
            resid_hist.append(float(np.abs(residual).max())
                              if len(residual) else 0.0)
        acc = lats[0]
        for lat in lats[1:]:
            acc = refine(acc)
            acc = Lattice(acc.coeffs + lat.coeffs, acc.origin, acc.size)
        return MultilevelBSpline(tuple(lats), acc, np.array(resid_hist))


@dataclass(frozen=True)
class MultilevelBSpline:
    """Sum of dyadically refined B-spline lattices, pre-collapsed for evaluation."""

    levels: tuple            # per-level Lattice (coarsest first)
    collapsed: Lattice       # all levels refined to the finest and summed
    site_residuals: np.ndarray  # max abs residual at the sites after each level

    def eval(self, xy):
        return self.collapsed.eval(xy)


def fit_mbspline(xy, values, origin, size, levels: int = 8,
                 passes: int = 2) -> MultilevelBSpline:
    """Fit scattered data with `levels` dyadic B-spline levels.

    Each level applies `passes` BA corrections on the running residual
    (two passes tighten the site residual ~4x over one at little cost).
    The mean of `values` is folded into the level-0 lattice (B-splines
    partition unity), so constant fields are reproduced exactly.
    """
    return FitPlan(xy, origin, size, levels, passes).fit(values)
