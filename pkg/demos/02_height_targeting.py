#!/usr/bin/env python3
"""Automatic height targeting.

Asks the solver for reliefs at decreasing fractions of the bounding-box
diagonal and reports how many sparse solves each target took.
"""
import numpy as np

from reliefgen import (PointCloud, ReliefParams, SessionConfig,
                       TargetRequest, prepare_session, solve_for_height)


def hemisphere(n=20000):
    i = np.arange(n)
    z = (i + 0.5) / n
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    r = np.sqrt(1.0 - z * z)
    pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return PointCloud(pts, pts.copy())


session = prepare_session(
    hemisphere(),
    config=SessionConfig(target_controls=5000,
                         initial_params=ReliefParams(gamma=0.0)))
diag = session.cloud.diagonal
print(f"diagonal {diag:.3f}, initial span {session.latest_frame().span:.4f}")

for frac in (0.20, 0.10, 0.05, 0.025):
    h0 = frac * diag
    res = solve_for_height(session, TargetRequest(h0))
    err = abs(res.span - h0) / h0
    print(f"target {frac:5.3f}*diag = {h0:.4f}: span {res.span:.4f} "
          f"(err {err:.2%}) after {res.solves} solves, "
          f"alpha={res.alpha:.4g} beta={res.beta:.4g}")
