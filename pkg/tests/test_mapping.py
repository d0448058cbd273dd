import numpy as np
import pytest

from reliefgen import (Plane, build_reference, detect_boundary, detect_visible,
                       estimate_density, fit_ratio_field, map_heights)
from reliefgen.mapping import RATIO_CLAMP, RatioField, visible_neighbor_graph
from reliefgen.mbspline import fit_mbspline
from reliefgen.solver import HeightSolution

from conftest import fibonacci_hemisphere, terrain_grid


def reference_setup(cloud):
    rho = estimate_density(cloud)
    vis = detect_visible(cloud, rho)
    bnd = detect_boundary(vis, cloud, rho)
    ref = build_reference(vis, cloud, bnd, Plane(), rho)
    return rho, vis, bnd, ref


class TestNeighborGraph:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(21)
        xy = rng.uniform(size=(80, 2))
        got = visible_neighbor_graph(xy, k=6)
        d2 = ((xy[:, None] - xy[None, :]) ** 2).sum(-1)
        np.fill_diagonal(d2, np.inf)
        expect = np.argsort(d2, axis=1, kind="stable")[:, :6]
        assert set(map(tuple, np.sort(got, 1))) == \
            set(map(tuple, np.sort(expect, 1)))

    def test_duplicate_points_no_self(self):
        xy = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 1.0],
                       [1.0, 1.0]])
        nn = visible_neighbor_graph(xy, k=3)
        assert (nn != np.arange(5)[:, None]).all()


class TestReference:
    def test_smooth_input_preserved(self):
        # boundary-only compression keeps a fully visible smooth bump
        # field essentially intact away from the rim
        from reliefgen import PointCloud
        n = 80
        g = np.stack(np.meshgrid(np.arange(n), np.arange(n), indexing="ij"),
                     -1).reshape(-1, 2).astype(float)
        # Gaussian bump, flat at the rim so the boundary blend is benign
        amp, s, c = 5.0, 8.0, (n - 1.0) / 2.0
        dx, dy = g[:, 0] - c, g[:, 1] - c
        z = amp * np.exp(-(dx * dx + dy * dy) / (2.0 * s * s))
        dzdx = -z * dx / (s * s)
        dzdy = -z * dy / (s * s)
        nrm = np.column_stack([-dzdx, -dzdy, np.ones(len(g))])
        cloud = PointCloud(np.column_stack([g, z]), nrm)
        rho, vis, bnd, ref = reference_setup(cloud)
        assert len(vis.indices) == n * n  # slopes < 1: everything visible
        z_in = cloud.points[vis.indices, 2]
        inner = bnd.dist > 8 * rho
        err = np.abs(ref.z_ref[inner] - z_in[inner])
        assert err.mean() <= 0.05 * amp
        assert ref.h_ref == pytest.approx(amp, rel=0.1)

    def test_hemisphere_reference_smooth(self):
        # at the silhouette the slope floor loses height, but the result
        # must stay smooth: neighbor jumps bounded by the local spacing
        cloud = fibonacci_hemisphere(8000)
        rho, vis, bnd, ref = reference_setup(cloud)
        xy = cloud.points[vis.indices, :2]
        nn = visible_neighbor_graph(xy, k=6)
        jump = np.abs(ref.z_ref[:, None] - ref.z_ref[nn]).max(axis=1)
        assert np.percentile(jump, 99) <= 10 * rho * 2  # slope cap 20:1

    def test_base_heights_recorded(self):
        cloud = fibonacci_hemisphere(3000)
        rho, vis, bnd, ref = reference_setup(cloud)
        assert np.allclose(ref.z_base, 0.0)


class TestRatioField:
    def test_clamped(self):
        field = fit_mbspline(np.array([[0.2, 0.2], [0.8, 0.8], [0.2, 0.8],
                                       [0.8, 0.2]]),
                             np.array([5.0, 5.0, -2.0, -2.0]),
                             (0, 0), (1, 1), levels=3)
        rf = RatioField(field)
        vals = rf.eval(np.random.default_rng(0).uniform(0, 1, (200, 2)))
        assert vals.min() >= 0.0
        assert vals.max() <= RATIO_CLAMP

    def test_constant_ratio_transfers(self):
        # controls whose heights are exactly 0.4x the reference must map
        # the whole cloud to 0.4x the reference
        cloud = terrain_grid(60, 60, spacing=0.5, amp=2.0)
        rho, vis, bnd, ref = reference_setup(cloud)
        idx = np.arange(0, len(vis.indices), 7)

        class Controls:
            indices = idx
            xy = cloud.points[vis.indices[idx], :2]

        sol = HeightSolution(0.4 * ref.z_ref[idx], np.zeros(len(idx)),
                             float(0.4 * ref.z_ref[idx].max()))
        field = fit_ratio_field(Controls, sol, ref, rho)
        xy_all = cloud.points[vis.indices, :2]
        z = map_heights(xy_all, ref, field, Plane())
        ok = np.abs(ref.z_ref) > 1e-3
        assert np.abs(z[ok] - 0.4 * ref.z_ref[ok]).max() <= \
            0.02 * np.abs(ref.z_ref[ok]).max()
