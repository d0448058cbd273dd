"""XY Delaunay triangulation of the visible cloud and fast normal refresh.

The topology never changes with the heights, so triangulation runs once
per session; per frame only face cross products and vertex averages are
recomputed.  Triangles whose XY edges span former occlusion gaps (longer
than 4*rho) are pruned so separate models are not webbed together.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.spatial import Delaunay, QhullError

from .errors import DegenerateInput

PRUNE_EDGE_FACTOR = 4.0  # real surface edges at 2*rho sampling are <= 2*sqrt(2)*rho


@dataclass(frozen=True)
class ReliefMesh:
    vertices: np.ndarray   # (V, 3)
    triangles: np.ndarray  # (F, 3) CCW in XY
    normals: np.ndarray    # (V, 3) unit, n_z > 0; may be None before refresh


def triangulate_xy(xy, rho: float) -> np.ndarray:
    """Delaunay triangles of the XY projection, occlusion bridges pruned."""
    xy = np.asarray(xy, dtype=np.float64)
    if len(xy) < 3:
        raise DegenerateInput("need at least 3 points")
    try:
        tri = Delaunay(xy).simplices
    except QhullError as e:
        raise DegenerateInput(f"degenerate XY point set: {e}") from None

    a, b, c = xy[tri[:, 0]], xy[tri[:, 1]], xy[tri[:, 2]]
    limit = (PRUNE_EDGE_FACTOR * rho) ** 2
    keep = (((a - b) ** 2).sum(1) <= limit) \
        & (((b - c) ** 2).sum(1) <= limit) \
        & (((c - a) ** 2).sum(1) <= limit)
    tri = tri[keep]

    # enforce counter-clockwise XY orientation
    a, b, c = xy[tri[:, 0]], xy[tri[:, 1]], xy[tri[:, 2]]
    cross = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) \
        - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    cw = cross < 0
    tri[cw] = tri[cw][:, [0, 2, 1]]
    return np.ascontiguousarray(tri, dtype=np.int64)


class NormalUpdater:
    """Vertex normals for a fixed XY triangulation with varying heights.

    The XY edge vectors and the z component of each face cross product
    never change, so they are precomputed along with a sparse face-to-
    vertex accumulation matrix; per frame only the height-dependent x/y
    cross terms are evaluated.
    """

    def __init__(self, xy, triangles):
        xy = np.asarray(xy, dtype=np.float64)
        t = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        self.t = t
        self.n = len(xy)
        a, b, c = xy[t[:, 0]], xy[t[:, 1]], xy[t[:, 2]]
        self._dxy1 = b - a
        self._dxy2 = c - a
        cz = self._dxy1[:, 0] * self._dxy2[:, 1] \
            - self._dxy1[:, 1] * self._dxy2[:, 0]
        sign = np.where(cz < 0, -1.0, 1.0)  # orient face normals n_z >= 0
        self._dxy1 *= sign[:, None]
        self._dxy2 *= sign[:, None]
        self._cz = np.abs(cz)
        self._acc = sp.csr_matrix(
            (np.ones(3 * len(t)), (t.ravel(), np.repeat(np.arange(len(t)), 3))),
            shape=(self.n, len(t)))

    def __call__(self, z) -> np.ndarray:
        t = self.t
        dz1 = z[t[:, 1]] - z[t[:, 0]]
        dz2 = z[t[:, 2]] - z[t[:, 0]]
        fn = np.empty((len(t), 3))
        fn[:, 0] = self._dxy1[:, 1] * dz2 - dz1 * self._dxy2[:, 1]
        fn[:, 1] = dz1 * self._dxy2[:, 0] - self._dxy1[:, 0] * dz2
        fn[:, 2] = self._cz
        lengths = np.linalg.norm(fn, axis=1)
        lengths[lengths < 1e-300] = 1.0
        fn /= lengths[:, None]

        out = self._acc @ fn
        norms = np.linalg.norm(out, axis=1)
        isolated = norms < 1e-12
        out[isolated] = (0.0, 0.0, 1.0)
        out[~isolated] /= norms[~isolated, None]
        return out


def update_normals(xy, z, triangles) -> np.ndarray:
    """Vertex normals from 1-ring face-normal averages, oriented n_z > 0.

    Isolated vertices get (0, 0, 1).  One-shot helper; for repeated
    updates over the same triangulation build a NormalUpdater.
    """
    return NormalUpdater(xy, triangles)(np.asarray(z, dtype=np.float64))


def make_mesh(xy, z, triangles, normals=None) -> ReliefMesh:
    if normals is None:
        normals = update_normals(xy, z, triangles)
    return ReliefMesh(np.column_stack([xy, z]), triangles, normals)
