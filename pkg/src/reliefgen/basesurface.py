"""Base surfaces the relief is projected onto."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class BaseSurface:
    def eval(self, x, y):
        raise NotImplementedError

    def eval_xy(self, xy):
        xy = np.asarray(xy, dtype=np.float64)
        return self.eval(xy[:, 0], xy[:, 1])


@dataclass(frozen=True)
class Plane(BaseSurface):
    z0: float = 0.0

    def eval(self, x, y):
        return np.full_like(np.asarray(x, dtype=np.float64), self.z0)


@dataclass(frozen=True)
class FoldedPlane(BaseSurface):
    """Two half-planes meeting at x = x0 with slopes s1 (left) and s2 (right)."""

    x0: float
    s1: float
    s2: float

    def eval(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x <= self.x0, self.s1 * (x - self.x0),
                        self.s2 * (x - self.x0))


@dataclass(frozen=True)
class Wave(BaseSurface):
    amplitude: float
    frequency: float
    axis: str = "x"  # which coordinate drives the wave

    def eval(self, x, y):
        t = np.asarray(x if self.axis == "x" else y, dtype=np.float64)
        return self.amplitude * np.sin(self.frequency * t)


@dataclass(frozen=True)
class Heightfield(BaseSurface):
    """Bilinearly interpolated sample grid; clamped outside its extent."""

    xs: np.ndarray  # (nx,) ascending
    ys: np.ndarray  # (ny,) ascending
    zs: np.ndarray  # (nx, ny)

    def eval(self, x, y):
        x = np.clip(np.asarray(x, dtype=np.float64), self.xs[0], self.xs[-1])
        y = np.clip(np.asarray(y, dtype=np.float64), self.ys[0], self.ys[-1])
        i = np.clip(np.searchsorted(self.xs, x) - 1, 0, len(self.xs) - 2)
        j = np.clip(np.searchsorted(self.ys, y) - 1, 0, len(self.ys) - 2)
        tx = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i])
        ty = (y - self.ys[j]) / (self.ys[j + 1] - self.ys[j])
        z = self.zs
        return ((1 - tx) * (1 - ty) * z[i, j] + tx * (1 - ty) * z[i + 1, j]
                + (1 - tx) * ty * z[i, j + 1] + tx * ty * z[i + 1, j + 1])


def parse_base(spec: str) -> BaseSurface:
    """CLI base syntax: plane[:z0] | fold:x0,s1,s2 | wave:amp,freq[,axis]."""
    kind, _, rest = spec.partition(":")
    kind = kind.lower()
    if kind == "plane":
        return Plane(float(rest) if rest else 0.0)
    if kind == "fold":
        x0, s1, s2 = (float(v) for v in rest.split(","))
        return FoldedPlane(x0, s1, s2)
    if kind == "wave":
        parts = rest.split(",")
        axis = parts[2].strip() if len(parts) > 2 else "x"
        return Wave(float(parts[0]), float(parts[1]), axis)
    raise ValueError(f"unknown base surface {spec!r}")
