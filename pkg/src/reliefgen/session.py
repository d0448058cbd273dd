"""Session orchestration: one-time prepare, per-frame adjust.

Prepare runs the heavy view-dependent work (visibility, curvature,
control sampling, factorization, reference relief, triangulation) and is
immutable afterwards.  adjust() re-solves control heights for new
parameters; with pipelining enabled the fresh solve runs concurrently
with the mapping and normal update of the previous solution, so streamed
frames lag the parameters by one step.  Exports drain that lag.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from threading import RLock

import numpy as np

from . import solver
from .cloud import PointCloud, estimate_density
from .compression import ReliefParams, expected_normals
from .curvature import CurvatureField, MLSConfig, mean_curvature_field, \
    normalize_curvature
from .detail import enhance_details
from .errors import NoFrameYet, ReliefError
from .mapping import ReferenceRelief, build_reference, fit_ratio_field, \
    make_ratio_plan, ratio_domain, visible_neighbor_graph
from .mbspline import GridSampler
from .meshing import NormalUpdater, ReliefMesh, make_mesh, triangulate_xy
from .sampling import ControlSet, sample_controls
from .viewprep import BoundaryInfo, VisibleSet, ViewFrame, align_view, \
    detect_boundary, detect_visible


@dataclass(frozen=True)
class SessionConfig:
    target_controls: int = 8000
    mbs_levels: int = 8
    lambda_b: float = solver.LAMBDA_B
    reference_mode: bool = False  # disables pipelining (testing aid)
    initial_params: ReliefParams = field(default_factory=ReliefParams)


@dataclass(frozen=True)
class FrameResult:
    seq: int
    z: np.ndarray          # per visible point
    normals: np.ndarray    # per visible point
    span: float            # control-solve span at the *requested* params
    params: ReliefParams       # params of the solve the span reports
    geom_params: ReliefParams  # params the returned geometry corresponds to
    timings: dict          # solve/map/normal stage times, ms
    error: str | None = None


class Session:
    """Prepared solver state; create with prepare_session()."""

    def __init__(self, cloud, view, rho, vis, bnd, curv, controls, system,
                 reference, triangles, config):
        self.cloud: PointCloud = cloud          # view-aligned
        self.view: ViewFrame = view
        self.rho: float = rho
        self.vis: VisibleSet = vis
        self.bnd: BoundaryInfo = bnd
        self.curv: CurvatureField = curv
        self.controls: ControlSet = controls
        self.system: solver.LinearSystem = system
        self.reference: ReferenceRelief = reference
        self.triangles = triangles
        self.config: SessionConfig = config
        self.vis_xy = cloud.points[vis.indices, :2]
        # static-geometry caches: per-frame work touches heights only
        self._ratio_plan = make_ratio_plan(controls, reference, rho,
                                           config.mbs_levels)
        origin, size = ratio_domain(controls.xy, rho)
        m = 2 ** (config.mbs_levels - 1)
        self._sampler = GridSampler(self.vis_xy, origin, size, m, m)
        self._normals = NormalUpdater(self.vis_xy, triangles)
        self.prepare_timings: dict = {}
        self._lock = RLock()
        self._pool = ThreadPoolExecutor(max_workers=1)
        self._seq = 0
        self._pending = None     # (HeightSolution, ReliefParams) of latest solve
        self._last_frame = None

    # --- stages -----------------------------------------------------------

    def solve_controls(self, params: ReliefParams) -> solver.HeightSolution:
        n_tilde = expected_normals(self.controls, params, self.rho)
        return solver.solve_heights(self.system, n_tilde, params.base)

    def _map_stage(self, sol, params):
        field = fit_ratio_field(self.controls, sol, self.reference, self.rho,
                                self.config.mbs_levels, self._ratio_plan)
        zb = params.base.eval_xy(self.vis_xy)
        z = zb + field.sample(self._sampler) * (self.reference.z_ref
                                                - self.reference.z_base)
        h = solver.height_span(z, zb)
        return enhance_details(z, self.curv.k_norm, self.curv.degenerate,
                               params.gamma, h)

    # --- public API ---------------------------------------------------------

    @property
    def point_count(self):
        return len(self.vis.indices)

    @property
    def params(self):
        with self._lock:
            return self._pending[1]

    def adjust(self, params: ReliefParams) -> FrameResult:
        with self._lock:
            try:
                return self._adjust(params)
            except ReliefError as e:
                if self._last_frame is None:
                    raise
                frame = replace(self._last_frame, error=e.code)
                self._last_frame = frame
                return frame

    def _adjust(self, params):
        self._seq += 1
        timings = {}
        if self.config.reference_mode:
            sol = self._timed(timings, "solve_ms", self.solve_controls, params)
            z = self._timed(timings, "map_ms", self._map_stage, sol, params)
            normals = self._timed(timings, "normal_ms", self._normals, z)
            geom_params = params
        else:
            fut = self._pool.submit(self._timed, timings, "solve_ms",
                                    self.solve_controls, params)
            prev_sol, geom_params = self._pending
            z = self._timed(timings, "map_ms", self._map_stage,
                            prev_sol, geom_params)
            normals = self._timed(timings, "normal_ms", self._normals, z)
            sol = fut.result()
        self._pending = (sol, params)
        frame = FrameResult(self._seq, z, normals, sol.h, params,
                            geom_params, timings)
        self._last_frame = frame
        return frame

    def export_mesh(self) -> ReliefMesh:
        """Mesh of the latest parameters; drains the one-step pipeline lag."""
        with self._lock:
            if self._pending is None:
                raise NoFrameYet("no frame produced yet")
            sol, params = self._pending
            z = self._map_stage(sol, params)
            return make_mesh(self.vis_xy, z, self.triangles, self._normals(z))

    def latest_frame(self) -> FrameResult:
        with self._lock:
            if self._last_frame is None:
                raise NoFrameYet("no frame produced yet")
            return self._last_frame

    @staticmethod
    def _timed(timings, key, fn, *args):
        t0 = time.perf_counter()
        out = fn(*args)
        timings[key] = (time.perf_counter() - t0) * 1e3
        return out


def prepare_session(cloud: PointCloud, v_r=(0.0, 0.0, 1.0),
                    config: SessionConfig | None = None) -> Session:
    """Run the one-time pipeline and emit the initial frame at the defaults."""
    config = config or SessionConfig()
    t = {}

    def timed(key, fn, *args, **kw):
        t0 = time.perf_counter()
        out = fn(*args, **kw)
        t[key] = (time.perf_counter() - t0) * 1e3
        return out

    aligned, view = timed("align_ms", align_view, cloud, v_r)
    rho = timed("density_ms", estimate_density, aligned)
    vis = timed("visible_ms", detect_visible, aligned, rho)
    bnd = timed("boundary_ms", detect_boundary, vis, aligned, rho)
    k_raw, degen = timed("curvature_ms", mean_curvature_field, vis, aligned,
                         MLSConfig.from_density(rho))
    curv = normalize_curvature(k_raw, degen)
    controls = timed("sampling_ms", sample_controls, vis, aligned, bnd, curv,
                     rho, min(config.target_controls, len(vis.indices)))
    system = timed("factorize_ms", solver.assemble_system, controls.xy,
                   controls.neighbors, controls.is_boundary, config.lambda_b)
    xy = aligned.points[vis.indices, :2]
    vis_nbrs = timed("vis_graph_ms", visible_neighbor_graph, xy)
    reference = timed("reference_ms", build_reference, vis, aligned, bnd,
                      config.initial_params.base, rho, config.lambda_b,
                      vis_nbrs)
    triangles = timed("triangulate_ms", triangulate_xy, xy, rho)

    session = Session(aligned, view, rho, vis, bnd, curv, controls, system,
                      reference, triangles, config)
    session.prepare_timings = t
    # initial frame at the default parameters, computed sequentially
    sol = session.solve_controls(config.initial_params)
    session._pending = (sol, config.initial_params)
    z = session._map_stage(sol, config.initial_params)
    normals = session._normals(z)
    session._seq = 1
    session._last_frame = FrameResult(1, z, normals, sol.h,
                                      config.initial_params,
                                      config.initial_params, {})
    return session
