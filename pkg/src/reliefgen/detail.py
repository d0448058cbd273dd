"""Curvature-proportional detail enhancement."""
from __future__ import annotations

import numpy as np


def enhance_details(z, k_norm, degenerate, gamma: float, h: float):
    """Raise each point by gamma * k_norm * h (pre-enhancement span h).

    k_norm's 99th-percentile clamp caps the increment at gamma * h and
    suppresses the top-1%-curvature outliers; degenerate-curvature points
    receive no increment.
    """
    if gamma == 0.0:
        return z
    dz = gamma * np.asarray(k_norm, dtype=np.float64) * h
    dz[np.asarray(degenerate, dtype=bool)] = 0.0
    return z + dz
