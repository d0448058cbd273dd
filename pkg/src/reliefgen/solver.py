"""Sparse least-squares height solver.

The objective combines k directed normal rows per point (expected normal
as perpendicular as possible to each point-neighbor edge) and a weighted
position row pinning every boundary point to the base surface.  Normal
rows are divided through by the expected normal's z component, so the
matrix A depends only on the neighbor graph: parameter changes touch the
right-hand side alone and each frame costs two triangular solves against
the one-time factorization of A^T A.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import splu

from .basesurface import BaseSurface
from .compression import NZ_FLOOR
from .errors import FactorizationFailure, FloatingComponent, NonFiniteSolution

LAMBDA_B = 10.0  # boundary row weight; rims must hold against 6 normal rows


@dataclass(frozen=True)
class LinearSystem:
    A: sp.csr_matrix         # (rows, n) with +1/-1 normal rows, lambda_b position rows
    row_p: np.ndarray        # (Rn,) point index of each normal row
    row_dxy: np.ndarray      # (Rn, 2) XY displacement p - q per normal row
    boundary_idx: np.ndarray  # (Rb,) point indices of position rows
    xy: np.ndarray           # (n, 2) point XY (for base evaluation)
    lambda_b: float
    _lu: object              # SuperLU factorization of A^T A

    @property
    def n(self):
        return self.A.shape[1]


@dataclass(frozen=True)
class HeightSolution:
    z_hat: np.ndarray
    z_base: np.ndarray
    h: float  # height span above the base


def assemble_system(xy, neighbors, is_boundary,
                    lambda_b: float = LAMBDA_B) -> LinearSystem:
    """Build and factor the system for a point set with a directed k-NN graph."""
    xy = np.asarray(xy, dtype=np.float64)
    neighbors = np.asarray(neighbors, dtype=np.int64)
    n, k = neighbors.shape

    # every connected component needs at least one boundary anchor
    src = np.repeat(np.arange(n), k)
    dst = neighbors.ravel()
    adj = sp.coo_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
    ncomp, labels = connected_components(adj, directed=False)
    anchored = np.zeros(ncomp, dtype=bool)
    anchored[labels[is_boundary]] = True
    if not anchored.all():
        raise FloatingComponent(
            f"{(~anchored).sum()} of {ncomp} components have no boundary point")

    rows_n = n * k
    b_idx = np.nonzero(is_boundary)[0]
    rows = rows_n + len(b_idx)
    r = np.arange(rows_n)
    data = np.concatenate([np.ones(rows_n), -np.ones(rows_n),
                           np.full(len(b_idx), lambda_b)])
    row_ind = np.concatenate([r, r, rows_n + np.arange(len(b_idx))])
    col_ind = np.concatenate([src, dst, b_idx])
    A = sp.csr_matrix((data, (row_ind, col_ind)), shape=(rows, n))

    try:
        lu = splu(sp.csc_matrix(A.T @ A))
    except RuntimeError as e:
        raise FactorizationFailure(str(e)) from None

    return LinearSystem(A=A, row_p=src, row_dxy=xy[src] - xy[dst],
                        boundary_idx=b_idx, xy=xy, lambda_b=lambda_b, _lu=lu)


def assemble_rhs(system: LinearSystem, n_tilde, base: BaseSurface):
    nt = np.asarray(n_tilde, dtype=np.float64)
    nz = np.maximum(nt[system.row_p, 2], NZ_FLOOR)
    rhs_n = -(nt[system.row_p, 0] * system.row_dxy[:, 0]
              + nt[system.row_p, 1] * system.row_dxy[:, 1]) / nz
    zb = base.eval_xy(system.xy[system.boundary_idx])
    return np.concatenate([rhs_n, system.lambda_b * zb])


def solve_heights(system: LinearSystem, n_tilde,
                  base: BaseSurface) -> HeightSolution:
    b = assemble_rhs(system, n_tilde, base)
    z = system._lu.solve(system.A.T @ b)
    if not np.isfinite(z).all():
        raise NonFiniteSolution("solver produced non-finite heights")
    z_base = base.eval_xy(system.xy)
    return HeightSolution(z, z_base, height_span(z, z_base))


def height_span(z_hat, z_base) -> float:
    """Max height above the base, clamped at zero."""
    return float(np.maximum(z_hat - z_base, 0.0).max())
