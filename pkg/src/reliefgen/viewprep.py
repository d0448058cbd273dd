"""View alignment, visible-point detection and boundary identification.

The view direction is rotated onto +Z with R = R_y(theta_y) @ R_x(theta_x);
afterwards visibility reduces to a per-cell max-z test on a 2*rho XY grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .cloud import PointCloud
from .errors import ZeroDirection


@dataclass(frozen=True)
class ViewFrame:
    theta_x: float
    theta_y: float
    R: np.ndarray  # (3, 3)


def _rot_x(t):
    c, s = np.cos(t), np.sin(t)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def _rot_y(t):
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def align_view(cloud: PointCloud, v_r) -> tuple[PointCloud, ViewFrame]:
    """Rotate cloud (points and normals) so that v_r maps onto +Z."""
    v = np.asarray(v_r, dtype=np.float64)
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        raise ZeroDirection("view direction must be nonzero")
    v = v / norm
    # R_x zeroes the y component, R_y then takes (vx, 0, r) to +Z.
    theta_x = float(np.arctan2(v[1], v[2]))
    r = float(np.hypot(v[1], v[2]))
    theta_y = float(np.arctan2(-v[0], r))
    R = _rot_y(theta_y) @ _rot_x(theta_x)
    aligned = PointCloud(cloud.points @ R.T, cloud.normals @ R.T)
    return aligned, ViewFrame(theta_x, theta_y, R)


@dataclass(frozen=True)
class VisibleSet:
    indices: np.ndarray     # (M,) into the cloud
    cell_size: float        # 2 * rho
    origin: np.ndarray      # XY of grid cell (0, 0) corner
    shape: tuple            # (nx, ny)
    cells: np.ndarray       # (M, 2) int cell coords per visible point
    occupied: np.ndarray    # (nx, ny) bool, cells holding >= 1 visible point


@dataclass(frozen=True)
class BoundaryInfo:
    is_boundary: np.ndarray  # (M,) bool per visible point
    dist: np.ndarray         # (M,) XY distance to nearest boundary point


def _grid_coords(xy, origin, cell, shape):
    c = np.floor((xy - origin) / cell).astype(np.int64)
    np.clip(c[:, 0], 0, shape[0] - 1, out=c[:, 0])
    np.clip(c[:, 1], 0, shape[1] - 1, out=c[:, 1])
    return c


def detect_visible(cloud: PointCloud, rho: float) -> VisibleSet:
    """A point is visible iff it lies within 2*rho of its cell's max z."""
    pts = cloud.points
    cell = 2.0 * rho
    lo = pts[:, :2].min(axis=0)
    hi = pts[:, :2].max(axis=0)
    shape = tuple(np.maximum(1, np.ceil((hi - lo) / cell + 1e-9).astype(int)))
    coords = _grid_coords(pts[:, :2], lo, cell, shape)
    flat = coords[:, 0] * shape[1] + coords[:, 1]
    max_z = np.full(shape[0] * shape[1], -np.inf)
    np.maximum.at(max_z, flat, pts[:, 2])
    visible = (max_z[flat] - pts[:, 2]) < cell
    idx = np.nonzero(visible)[0]
    occupied = np.zeros(shape[0] * shape[1], dtype=bool)
    occupied[flat[idx]] = True
    return VisibleSet(idx, cell, lo, shape, coords[idx],
                      occupied.reshape(shape))


def detect_boundary(vis: VisibleSet, cloud: PointCloud, rho: float) -> BoundaryInfo:
    """Flag visible points in cells with an empty 8-neighbor cell.

    dist is the exact XY distance to the nearest boundary point (zero on
    the boundary itself).  Interior holes count as boundary, like the rim.
    """
    occ = vis.occupied
    padded = np.pad(occ, 1, constant_values=False)
    has_empty_nbr = np.zeros_like(occ)
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            nbr = padded[1 + dx:1 + dx + occ.shape[0],
                         1 + dy:1 + dy + occ.shape[1]]
            has_empty_nbr |= ~nbr
    boundary_cell = occ & has_empty_nbr
    is_b = boundary_cell[vis.cells[:, 0], vis.cells[:, 1]]
    xy = cloud.points[vis.indices, :2]
    dist = np.zeros(len(is_b))
    if is_b.any() and not is_b.all():
        d, _ = cKDTree(xy[is_b]).query(xy[~is_b])
        dist[~is_b] = d
    return BoundaryInfo(is_b, dist)
