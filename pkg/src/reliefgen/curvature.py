"""Mean curvature of the visible cloud from an implicit MLS surface.

The implicit function is g(x) = n(x) . (x - a(x)) with Gaussian-weighted
average position a(x) and normal n(x).  Its gradient and Hessian are
evaluated analytically (the curvature formula divides by |grad g|^3, which
makes finite differencing too noisy), then

    k_mean = (|grad g|^2 Tr(H) - grad g^T H grad g) / (2 |grad g|^3)

so that a surface convex toward the viewer gets positive curvature.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .cloud import PointCloud
from .viewprep import VisibleSet

_PAIRS6 = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
_TRIPLES10 = [(0, 0, 0), (0, 0, 1), (0, 0, 2), (0, 1, 1), (0, 1, 2),
              (0, 2, 2), (1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2)]


@dataclass(frozen=True)
class MLSConfig:
    neighbor_radius: float
    gauss_sigma: float
    min_neighbors: int = 8

    @classmethod
    def from_density(cls, rho: float) -> "MLSConfig":
        # radius must be ~4 sigma; a tighter cut biases curvature low
        return cls(neighbor_radius=4.0 * rho, gauss_sigma=rho)


@dataclass(frozen=True)
class CurvatureField:
    k_mean: np.ndarray      # signed, per visible point
    k_norm: np.ndarray      # |k| clamped at the 99th percentile, in [0, 1]
    delta: float            # population std of k_norm
    p99: float
    degenerate: np.ndarray  # bool mask; these points skip detail enhancement


def _sym_expand6(cols):
    """(n, 6) upper-triangle columns -> (n, 3, 3) symmetric."""
    out = np.empty(cols.shape[:-1] + (3, 3))
    for c, (i, j) in enumerate(_PAIRS6):
        out[..., i, j] = cols[..., c]
        out[..., j, i] = cols[..., c]
    return out


def _sym_expand10(cols):
    """(n, 10) sorted-triple columns -> (n, 3, 3, 3) fully symmetric."""
    out = np.empty(cols.shape[:-1] + (3, 3, 3))
    for c, t in enumerate(_TRIPLES10):
        for p in {(t[0], t[1], t[2]), (t[0], t[2], t[1]), (t[1], t[0], t[2]),
                  (t[1], t[2], t[0]), (t[2], t[0], t[1]), (t[2], t[1], t[0])}:
            out[..., p[0], p[1], p[2]] = cols[..., c]
    return out


def _chunk_curvature(x, nbr_pts, nbr_nrm, starts, sigma):
    """Analytic k_mean for one chunk of evaluation points.

    x: (n, 3) evaluation points; nbr_* flattened neighbor data with
    reduceat offsets `starts` (one segment per point, each nonempty).
    """
    n = len(x)
    seg = np.repeat(np.arange(n), np.diff(np.append(starts, len(nbr_pts))))
    diff = x[seg] - nbr_pts                      # (P, 3)
    s2 = sigma * sigma
    theta = np.exp(-(diff * diff).sum(axis=1) / (2.0 * s2))
    u = diff / s2

    cols = np.empty((len(theta), 50))
    cols[:, 0] = theta
    cols[:, 1:4] = theta[:, None] * u
    for c, (i, j) in enumerate(_PAIRS6):
        cols[:, 4 + c] = theta * u[:, i] * u[:, j]
    for c, (i, j, k) in enumerate(_TRIPLES10):
        cols[:, 10 + c] = theta * u[:, i] * u[:, j] * u[:, k]
    cols[:, 20:23] = theta[:, None] * nbr_nrm
    p = 23
    for i in range(3):
        for j in range(3):
            cols[:, p] = theta * nbr_nrm[:, i] * u[:, j]
            p += 1
    for i in range(3):
        for c, (j, k) in enumerate(_PAIRS6):
            cols[:, p] = theta * nbr_nrm[:, i] * u[:, j] * u[:, k]
            p += 1

    S = np.add.reduceat(cols, starts, axis=0)
    M0 = S[:, 0]
    M1 = S[:, 1:4]
    M2 = _sym_expand6(S[:, 4:10])
    M3 = _sym_expand10(S[:, 10:20])
    N0 = S[:, 20:23]
    N1 = S[:, 23:32].reshape(n, 3, 3)
    N2 = np.empty((n, 3, 3, 3))
    for i in range(3):
        N2[:, i] = _sym_expand6(S[:, 32 + 6 * i:38 + 6 * i])

    eye = np.eye(3)
    W = M0
    GW = -M1                                            # grad of sum(theta)
    HW = M2 - eye[None] * (M0 / s2)[:, None, None]
    s_vec = x * W[:, None] - s2 * M1
    Js = -(np.einsum("ni,nj->nij", x, M1) - s2 * M2)
    Ts = (np.einsum("ni,njk->nijk", x, M2) - s2 * M3
          - np.einsum("jk,ni->nijk", eye, s_vec) / s2)
    m = N0
    Jm = -N1
    Tm = N2 - np.einsum("jk,ni->nijk", eye, N0) / s2

    bad = (W < 1e-300) | (np.linalg.norm(m, axis=1) < 1e-12)
    Ws = np.where(W < 1e-300, 1.0, W)

    a = s_vec / Ws[:, None]
    Ja = (Js - np.einsum("ni,nj->nij", a, GW)) / Ws[:, None, None]
    Ta = (Ts - np.einsum("nij,nk->nijk", Ja, GW)
          - np.einsum("nik,nj->nijk", Ja, GW)
          - np.einsum("ni,njk->nijk", a, HW)) / Ws[:, None, None, None]

    r = np.linalg.norm(m, axis=1)
    rs = np.where(r < 1e-12, 1.0, r)
    nvec = m / rs[:, None]
    rg = np.einsum("ni,nij->nj", m, Jm) / rs[:, None]
    rH = (np.einsum("nij,nik->njk", Jm, Jm)
          + np.einsum("ni,nijk->njk", m, Tm)
          - np.einsum("nj,nk->njk", rg, rg)) / rs[:, None, None]
    Jn = (Jm - np.einsum("ni,nj->nij", nvec, rg)) / rs[:, None, None]
    Tn = (Tm / rs[:, None, None, None]
          - np.einsum("nij,nk->nijk", Jm, rg) / (rs ** 2)[:, None, None, None]
          - np.einsum("nik,nj->nijk", Jm, rg) / (rs ** 2)[:, None, None, None]
          - np.einsum("ni,njk->nijk", m, rH) / (rs ** 2)[:, None, None, None]
          + 2.0 * np.einsum("ni,nj,nk->nijk", m, rg, rg)
          / (rs ** 3)[:, None, None, None])

    d = x - a
    Jd = eye[None] - Ja
    grad = (np.einsum("nij,ni->nj", Jn, d)
            + np.einsum("ni,nij->nj", nvec, Jd))
    hess = (np.einsum("nijk,ni->njk", Tn, d)
            + np.einsum("nij,nik->njk", Jn, Jd)
            + np.einsum("nik,nij->njk", Jn, Jd)
            - np.einsum("ni,nijk->njk", nvec, Ta))

    gnorm = np.linalg.norm(grad, axis=1)
    bad |= gnorm < 1e-9
    gs = np.where(gnorm < 1e-9, 1.0, gnorm)
    quad = np.einsum("nj,njk,nk->n", grad, hess, grad)
    trace = np.einsum("njj->n", hess)
    k = (gs * gs * trace - quad) / (2.0 * gs ** 3)
    k[bad] = 0.0
    return k, bad


def mean_curvature_field(vis: VisibleSet, cloud: PointCloud,
                         cfg: MLSConfig, chunk: int = 4096):
    """Raw signed mean curvature per visible point.

    Points with fewer than cfg.min_neighbors inside neighbor_radius (or a
    vanishing gradient) get k_mean = 0 and a degenerate mark.
    """
    pts = cloud.points[vis.indices]
    nrm = cloud.normals[vis.indices]
    tree = cKDTree(pts)
    k_all = np.zeros(len(pts))
    degen = np.zeros(len(pts), dtype=bool)
    for lo in range(0, len(pts), chunk):
        hi = min(lo + chunk, len(pts))
        nbrs = tree.query_ball_point(pts[lo:hi], cfg.neighbor_radius)
        lens = np.array([len(nb) for nb in nbrs])
        degen[lo:hi] |= lens < cfg.min_neighbors
        flat = np.concatenate(nbrs) if len(nbrs) else np.empty(0, np.int64)
        flat = np.asarray(flat, dtype=np.int64)
        starts = np.concatenate([[0], np.cumsum(lens[:-1])]).astype(np.int64)
        k, bad = _chunk_curvature(pts[lo:hi], pts[flat], nrm[flat],
                                  starts, cfg.gauss_sigma)
        degen[lo:hi] |= bad
        k_all[lo:hi] = k
    k_all[degen] = 0.0
    return k_all, degen


def normalize_curvature(k_mean, degenerate=None) -> CurvatureField:
    """Clamp |k| at its 99th percentile and rescale to [0, 1].

    The clamp doubles as the top-1%-curvature suppression used by detail
    enhancement; delta is the population std of the normalized values.
    """
    k_mean = np.asarray(k_mean, dtype=np.float64)
    if len(k_mean) == 0:
        raise ValueError("empty curvature field")
    if degenerate is None:
        degenerate = np.zeros(len(k_mean), dtype=bool)
    kabs = np.abs(k_mean)
    p99 = float(np.percentile(kabs, 99))
    if p99 <= 0.0:
        p99 = 1.0
    k_norm = np.minimum(kabs, p99) / p99
    degenerate = np.asarray(degenerate, dtype=bool)
    k_norm[degenerate] = 0.0  # no curvature signal, no compression weight
    return CurvatureField(k_mean, k_norm, float(k_norm.std()), p99,
                          degenerate)
