import numpy as np
import pytest

from reliefgen import make_mesh, triangulate_xy, update_normals
from reliefgen.errors import DegenerateInput


def circumcircle_violations(xy, tri):
    """Brute-force empty-circumcircle oracle (scaled tolerance)."""
    bad = 0
    for t in tri:
        a, b, c = xy[t]
        # circumcenter via perpendicular bisector intersection
        d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1])
                   + c[0] * (a[1] - b[1]))
        if abs(d) < 1e-12:
            continue
        ux = ((a @ a) * (b[1] - c[1]) + (b @ b) * (c[1] - a[1])
              + (c @ c) * (a[1] - b[1])) / d
        uy = ((a @ a) * (c[0] - b[0]) + (b @ b) * (a[0] - c[0])
              + (c @ c) * (b[0] - a[0])) / d
        center = np.array([ux, uy])
        r2 = ((a - center) ** 2).sum()
        inside = ((xy - center) ** 2).sum(axis=1) < r2 * (1.0 - 1e-9)
        inside[t] = False
        bad += int(inside.any())
    return bad


class TestTriangulate:
    def test_delaunay_oracle(self):
        rng = np.random.default_rng(13)
        xy = rng.uniform(0, 1, size=(1000, 2))
        tri = triangulate_xy(xy, rho=1.0)  # big rho: no pruning
        assert circumcircle_violations(xy, tri) == 0

    def test_ccw_orientation(self):
        rng = np.random.default_rng(14)
        xy = rng.uniform(0, 1, size=(200, 2))
        tri = triangulate_xy(xy, rho=1.0)
        a, b, c = xy[tri[:, 0]], xy[tri[:, 1]], xy[tri[:, 2]]
        cross = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) \
            - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
        assert (cross > 0).all()

    def test_long_edges_pruned(self):
        # two 3x3 patches 100 apart must not be webbed together
        g = np.stack(np.meshgrid(np.arange(3.0), np.arange(3.0)),
                     -1).reshape(-1, 2)
        xy = np.vstack([g, g + [100.0, 0.0]])
        tri = triangulate_xy(xy, rho=1.0)
        left = tri < 9
        assert (left.all(axis=1) | (~left).all(axis=1)).all()

    def test_degenerate_collinear(self):
        xy = np.column_stack([np.arange(5.0), np.zeros(5)])
        with pytest.raises(DegenerateInput):
            triangulate_xy(xy, rho=1.0)


class TestNormals:
    def test_flat_grid_up(self):
        g = np.stack(np.meshgrid(np.arange(5.0), np.arange(5.0)),
                     -1).reshape(-1, 2)
        tri = triangulate_xy(g, rho=2.0)
        n = update_normals(g, np.zeros(len(g)), tri)
        assert np.allclose(n, [0, 0, 1])

    def test_tilted_plane_oracle(self):
        g = np.stack(np.meshgrid(np.arange(6.0), np.arange(6.0)),
                     -1).reshape(-1, 2)
        tri = triangulate_xy(g, rho=2.0)
        z = 0.5 * g[:, 0]
        n = update_normals(g, z, tri)
        expect = np.array([-0.5, 0.0, 1.0])
        expect /= np.linalg.norm(expect)
        assert np.allclose(n, expect, atol=1e-12)

    def test_unit_and_up(self):
        rng = np.random.default_rng(15)
        xy = rng.uniform(0, 4, size=(300, 2))
        z = np.sin(xy[:, 0]) * np.cos(xy[:, 1])
        tri = triangulate_xy(xy, rho=10.0)
        n = update_normals(xy, z, tri)
        assert np.allclose(np.linalg.norm(n, axis=1), 1.0, atol=1e-12)
        assert (n[:, 2] > 0).all()

    def test_isolated_vertex(self):
        # pruning can orphan vertices; they get the base normal
        g = np.stack(np.meshgrid(np.arange(3.0), np.arange(3.0)),
                     -1).reshape(-1, 2)
        xy = np.vstack([g, [[50.0, 50.0]]])
        tri = triangulate_xy(xy, rho=1.0)
        n = update_normals(xy, np.zeros(len(xy)), tri)
        assert np.allclose(n[-1], [0, 0, 1])

    def test_make_mesh(self):
        g = np.stack(np.meshgrid(np.arange(4.0), np.arange(4.0)),
                     -1).reshape(-1, 2)
        mesh = make_mesh(g, np.ones(16), triangulate_xy(g, rho=2.0))
        assert mesh.vertices.shape == (16, 3)
        assert (mesh.vertices[:, 2] == 1.0).all()
        assert mesh.normals.shape == (16, 3)
