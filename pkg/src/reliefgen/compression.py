"""Normal-space compression: blend normals toward (0,0,1) by curvature
and boundary weights, which lowers the reconstructed relief height."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basesurface import BaseSurface, Plane

NZ_FLOOR = 0.05  # max slope 20:1 when a silhouette normal gets divided out

_ALPHA_MIN = 1e-6  # alpha = 0 from the UI means "no compression", as a limit


@dataclass(frozen=True)
class ReliefParams:
    alpha: float = 4.0   # height coefficient
    beta: float = 0.01   # saturation coefficient
    gamma: float = 0.02  # detail coefficient
    base: BaseSurface = field(default_factory=Plane)

    def __post_init__(self):
        if not (0.0 <= self.gamma < 1.0):
            raise ValueError("gamma must be in [0, 1)")
        if self.beta < 0.0 or self.alpha < 0.0:
            raise ValueError("alpha and beta must be non-negative")


def curvature_weight(k_norm, alpha: float, beta: float, delta: float):
    """w_k = 1 - exp(-(k_norm / (alpha * delta))^beta), with 0^0 = 1.

    delta = 0 short-circuits to w_k = 1 (no curvature signal to weight by).
    """
    k_norm = np.asarray(k_norm, dtype=np.float64)
    if delta <= 0.0:
        return np.ones_like(k_norm)
    alpha = max(alpha, _ALPHA_MIN)
    t = k_norm / (alpha * delta)
    return 1.0 - np.exp(-np.power(t, beta))


def boundary_weight(dist, rho: float):
    """w_b = 1 - exp(-(dist / 2rho)^2); zero on the boundary, ~1 inside."""
    t = np.asarray(dist, dtype=np.float64) / (2.0 * rho)
    return 1.0 - np.exp(-t * t)


def compress_normals(normals, weights):
    """Blend each viewer-facing normal toward (0,0,1) by 1-w, renormalized.

    normals: (C, 3); weights: (C,) product w_k * w_b in [0, 1].
    Normals with negative z are flipped first.
    """
    n = np.array(normals, dtype=np.float64)
    flip = n[:, 2] < 0.0
    n[flip] = -n[flip]
    w = np.asarray(weights, dtype=np.float64)[:, None]
    out = w * n
    out[:, 2] += (1.0 - w[:, 0])
    out /= np.linalg.norm(out, axis=1, keepdims=True)
    return out


def expected_normals(controls, params: ReliefParams, rho: float):
    """Compressed normals for a control set under the given parameters."""
    wk = curvature_weight(controls.k_norm, params.alpha, params.beta,
                          controls.delta)
    wb = boundary_weight(controls.dist, rho)
    return compress_normals(controls.normals, wk * wb)
