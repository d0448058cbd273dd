#!/usr/bin/env python3
"""Interactive adjustment throughput at scanner-scale point counts.

Prepares a ~185k-point terrain once, then sweeps the height knob and
reports per-stage times and the steady-state frame rate. The control
solve of frame t runs concurrently with the mapping and normal update of
frame t-1, so frames lag the parameters by one step.
"""
import time
from dataclasses import replace

import numpy as np

from reliefgen import PointCloud, ReliefParams, SessionConfig, prepare_session


def terrain(nx=430, ny=430, amp=20.0):
    gx, gy = np.meshgrid(np.arange(nx, dtype=float),
                         np.arange(ny, dtype=float), indexing="ij")
    x, y = gx.ravel(), gy.ravel()
    fx, fy = 2 * np.pi / nx, 2 * np.pi / ny
    z = amp * np.sin(3 * fx * x) * np.cos(2 * fy * y)
    dzdx = amp * 3 * fx * np.cos(3 * fx * x) * np.cos(2 * fy * y)
    dzdy = -amp * 2 * fy * np.sin(3 * fx * x) * np.sin(2 * fy * y)
    n = np.column_stack([-dzdx, -dzdy, np.ones_like(x)])
    return PointCloud(np.column_stack([x, y, z]), n)


t0 = time.perf_counter()
session = prepare_session(terrain(), config=SessionConfig(
    target_controls=8000, initial_params=ReliefParams(gamma=0.02)))
print(f"prepare: {time.perf_counter() - t0:.1f} s, "
      f"{session.point_count} points, {len(session.controls)} controls")
for stage, ms in sorted(session.prepare_timings.items()):
    print(f"  {stage:16s} {ms:8.1f} ms")

sweep = [replace(session.params, alpha=a) for a in np.linspace(1.0, 16.0, 18)]
for p in sweep[:3]:
    session.adjust(p)  # warm up

acc = {"solve_ms": 0.0, "map_ms": 0.0, "normal_ms": 0.0}
t0 = time.perf_counter()
for p in sweep[3:]:
    frame = session.adjust(p)
    for k in acc:
        acc[k] += frame.timings[k]
wall = time.perf_counter() - t0
n = len(sweep) - 3
print(f"\nsteady state over {n} frames:")
for k, v in acc.items():
    print(f"  {k:10s} {v / n:6.1f} ms/frame")
print(f"  throughput {n / wall:6.1f} fps")
