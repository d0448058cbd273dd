"""Transfer of control-point compression ratios to the full visible cloud.

A one-time full-resolution solve with curvature weighting disabled (only
the boundary blend active) provides a discontinuity-free reference relief.
Per frame, each control's ratio of solved height to reference height above
the base is fitted with multilevel B-splines and evaluated over the cloud.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import solver
from .basesurface import BaseSurface
from .compression import boundary_weight, compress_normals
from .mbspline import FitPlan, GridSampler, MultilevelBSpline, fit_mbspline

RATIO_CLAMP = 1.5   # B-spline overshoot must not punch through the base
DEGENERATE_FRAC = 1e-6  # sites this close to the base are left out of the fit


@dataclass(frozen=True)
class ReferenceRelief:
    z_ref: np.ndarray   # per visible point
    z_base: np.ndarray  # base heights used for the reference solve
    h_ref: float
    base: BaseSurface


def visible_neighbor_graph(xy, k: int = 6):
    """Directed k-nearest-neighbor lists in XY, self excluded."""
    kq = min(k, len(xy) - 1)
    _, nn = cKDTree(xy).query(xy, k=kq + 1)
    self_mask = nn == np.arange(len(xy))[:, None]
    no_self = ~self_mask.any(axis=1)  # duplicate coordinates can hide self
    self_mask[no_self, -1] = True
    order = np.argsort(self_mask, axis=1, kind="stable")
    return np.ascontiguousarray(
        np.take_along_axis(nn, order, axis=1)[:, :kq], dtype=np.int64)


def build_reference(vis, cloud, bnd, base: BaseSurface, rho: float,
                    lambda_b: float = solver.LAMBDA_B,
                    neighbors=None) -> ReferenceRelief:
    """Full-resolution solve with boundary-only normal compression."""
    xy = cloud.points[vis.indices, :2]
    if neighbors is None:
        neighbors = visible_neighbor_graph(xy)
    n_tilde = compress_normals(cloud.normals[vis.indices],
                               boundary_weight(bnd.dist, rho))
    system = solver.assemble_system(xy, neighbors, bnd.is_boundary, lambda_b)
    sol = solver.solve_heights(system, n_tilde, base)
    return ReferenceRelief(sol.z_hat, sol.z_base, sol.h, base)


@dataclass(frozen=True)
class RatioField:
    field: MultilevelBSpline

    def eval(self, xy):
        return np.clip(self.field.eval(xy), 0.0, RATIO_CLAMP)

    def sample(self, sampler: GridSampler):
        """eval() over a point set with a precomputed GridSampler."""
        return np.clip(sampler.sample(self.field.collapsed), 0.0, RATIO_CLAMP)


def ratio_domain(xy, rho: float):
    """XY fit rectangle: the bounding box expanded by 2*rho."""
    lo = xy.min(axis=0) - 2.0 * rho
    hi = xy.max(axis=0) + 2.0 * rho
    return tuple(lo), tuple(hi - lo)


def _fit_sites(controls, ref: ReferenceRelief):
    """Controls with a usable reference height (static per session)."""
    ref_height = ref.z_ref[controls.indices] - ref.z_base[controls.indices]
    ok = np.abs(ref_height) >= DEGENERATE_FRAC * max(ref.h_ref, 1e-300)
    return ok, ref_height


def make_ratio_plan(controls, ref: ReferenceRelief, rho: float,
                    levels: int = 8) -> FitPlan:
    """Precompute the B-spline fit plan reused by every frame's ratio fit."""
    ok, _ = _fit_sites(controls, ref)
    origin, size = ratio_domain(controls.xy, rho)
    return FitPlan(controls.xy[ok], origin, size, levels)


def fit_ratio_field(controls, sol, ref: ReferenceRelief, rho: float,
                    levels: int = 8, plan: FitPlan | None = None) -> RatioField:
    """Fit control ratios (solved height / reference height above base)."""
    zb = sol.z_base
    ok, ref_height = _fit_sites(controls, ref)
    ratio = np.where(ok, (sol.z_hat - zb) / np.where(ok, ref_height, 1.0), 0.0)
    if plan is None:
        origin, size = ratio_domain(controls.xy, rho)
        plan = FitPlan(controls.xy[ok], origin, size, levels)
    return RatioField(plan.fit(ratio[ok]))


def map_heights(xy, ref: ReferenceRelief, field: RatioField,
                base: BaseSurface):
    """z = base + clamp(ratio, 0, 1.5) * (reference height above its base)."""
    zb = base.eval_xy(xy)
    return zb + field.eval(xy) * (ref.z_ref - ref.z_base)
