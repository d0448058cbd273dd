"""Sparse control-point extraction from the visible cloud.

Greedy region growing in raster cell order: a selected point suppresses
later candidates within XY radius r2, where r2 follows the equal-area
rule n1*r1^2 = n2*r2^2.  Boundary points bypass suppression so the rim
is fully covered by position constraints.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import TargetExceedsInput, TargetTooSmall


@dataclass(frozen=True)
class ControlSet:
    indices: np.ndarray      # (C,) indices into the visible set
    xy: np.ndarray           # (C, 2)
    z: np.ndarray            # (C,) original view-aligned heights
    normals: np.ndarray      # (C, 3)
    neighbors: np.ndarray    # (C, k) control-relative 6-NN (directed)
    is_boundary: np.ndarray  # (C,) bool
    dist: np.ndarray         # (C,) boundary distance
    k_norm: np.ndarray       # (C,)
    delta: float             # std of k_norm over the controls
    r2: float                # suppression radius used

    def __len__(self):
        return len(self.indices)


def sample_controls(vis, cloud, bnd, curv, rho: float,
                    target_count: int = 8000) -> ControlSet:
    n_vis = len(vis.indices)
    if target_count < 100:
        raise TargetTooSmall(f"target_count {target_count} < 100")
    if target_count > n_vis:
        raise TargetExceedsInput(f"target_count {target_count} > {n_vis} visible")

    xy = cloud.points[vis.indices, :2]
    area = float(vis.occupied.sum()) * vis.cell_size ** 2
    r1 = np.sqrt(area / n_vis)
    r2 = float(np.sqrt(n_vis / target_count) * r1)

    # raster order over the visibility grid cells, boundary first
    order = np.lexsort((np.arange(n_vis), vis.cells[:, 1], vis.cells[:, 0]))
    order = np.concatenate([order[bnd.is_boundary[order]],
                            order[~bnd.is_boundary[order]]])

    # grid hash over selected points for the suppression query
    origin = xy.min(axis=0)
    inv = 1.0 / r2
    buckets: dict = {}
    selected = []
    r2sq = r2 * r2
    is_b = bnd.is_boundary
    for i in order:
        p = xy[i]
        cx = int((p[0] - origin[0]) * inv)
        cy = int((p[1] - origin[1]) * inv)
        if not is_b[i]:
            hit = False
            for ax in (cx - 1, cx, cx + 1):
                for ay in (cy - 1, cy, cy + 1):
                    cell = buckets.get((ax, ay))
                    if cell:
                        arr = np.asarray(cell)
                        d = arr - p
                        if np.any(d[:, 0] ** 2 + d[:, 1] ** 2 < r2sq):
                            hit = True
                            break
                if hit:
                    break
            if hit:
                continue
        buckets.setdefault((cx, cy), []).append(p)
        selected.append(i)

    from .mapping import visible_neighbor_graph
    sel = np.array(sorted(selected), dtype=np.int64)
    cxy = xy[sel]
    neighbors = visible_neighbor_graph(cxy, k=6)

    k_norm = curv.k_norm[sel]
    return ControlSet(
        indices=sel,
        xy=cxy,
        z=cloud.points[vis.indices[sel], 2],
        normals=cloud.normals[vis.indices[sel]],
        neighbors=neighbors,
        is_boundary=bnd.is_boundary[sel],
        dist=bnd.dist[sel],
        k_norm=k_norm,
        delta=float(k_norm.std()),
        r2=r2,
    )
