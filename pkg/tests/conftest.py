import io

import numpy as np
import pytest

from reliefgen import PointCloud, ReliefParams, SessionConfig, prepare_session


def fibonacci_hemisphere(n: int) -> PointCloud:
    """Quasi-uniform area sampling of the upper unit hemisphere.

    Normals are exact (radial), which the curvature oracle relies on.
    """
    i = np.arange(n)
    z = (i + 0.5) / n
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    r = np.sqrt(1.0 - z * z)
    pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return PointCloud(pts.copy(), pts.copy())


def fibonacci_sphere(n: int) -> PointCloud:
    i = np.arange(n)
    z = 1.0 - 2.0 * (i + 0.5) / n
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    r = np.sqrt(1.0 - z * z)
    pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return PointCloud(pts.copy(), pts.copy())


def flat_grid(nx: int, ny: int, spacing: float = 1.0, z: float = 0.0,
              jitter: float = 0.0, seed: int = 0) -> PointCloud:
    gx, gy = np.meshgrid(np.arange(nx) * spacing, np.arange(ny) * spacing,
                         indexing="ij")
    xy = np.column_stack([gx.ravel(), gy.ravel()])
    if jitter:
        rng = np.random.default_rng(seed)
        xy = xy + rng.uniform(-jitter, jitter, xy.shape) * spacing
    pts = np.column_stack([xy, np.full(len(xy), float(z))])
    nrm = np.tile([0.0, 0.0, 1.0], (len(pts), 1))
    return PointCloud(pts, nrm)


def terrain_grid(nx: int, ny: int, spacing: float = 1.0,
                 amp: float = 6.0) -> PointCloud:
    """Smooth bumpy heightfield with analytically exact normals."""
    gx, gy = np.meshgrid(np.arange(nx) * spacing, np.arange(ny) * spacing,
                         indexing="ij")
    x, y = gx.ravel(), gy.ravel()
    fx = 2.0 * np.pi / (nx * spacing) * 3.0
    fy = 2.0 * np.pi / (ny * spacing) * 2.0
    z = amp * np.sin(fx * x) * np.cos(fy * y)
    dzdx = amp * fx * np.cos(fx * x) * np.cos(fy * y)
    dzdy = -amp * fy * np.sin(fx * x) * np.sin(fy * y)
    nrm = np.column_stack([-dzdx, -dzdy, np.ones_like(x)])
    return PointCloud(np.column_stack([x, y, z]), nrm)


def ply_bytes(cloud: PointCloud) -> bytes:
    buf = io.StringIO()
    buf.write("ply\nformat ascii 1.0\n")
    buf.write(f"element vertex {len(cloud)}\n")
    for p in ("x", "y", "z", "nx", "ny", "nz"):
        buf.write(f"property float {p}\n")
    buf.write("end_header\n")
    for p, n in zip(cloud.points, cloud.normals):
        buf.write("%.9g %.9g %.9g %.9g %.9g %.9g\n" % (*p, *n))
    return buf.getvalue().encode()


@pytest.fixture(scope="session")
def hemi_cloud():
    return fibonacci_hemisphere(20000)


@pytest.fixture(scope="session")
def hemi_session(hemi_cloud):
    cfg = SessionConfig(target_controls=5000,
                        initial_params=ReliefParams(gamma=0.0))
    return prepare_session(hemi_cloud, config=cfg)


@pytest.fixture(scope="session")
def hemi_ply(tmp_path_factory):
    cloud = fibonacci_hemisphere(8000)
    path = tmp_path_factory.mktemp("clouds") / "hemi.ply"
    path.write_bytes(ply_bytes(cloud))
    return path
