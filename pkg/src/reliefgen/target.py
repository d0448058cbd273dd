"""Automatic convergence of the relief span to a requested height.

The span decreases monotonically with the height coefficient alpha, so
each inner pass brackets the goal between a tiny alpha and a large cap
and bisects to 1% relative error.  At small saturation coefficients the
span is nearly alpha-insensitive (the uniform-compression regime), so
probing both bracket ends rejects an unworkable beta in two solves; the
outer loop then doubles beta from 1e-5.  Detail enhancement is factored
out by targeting (1 - gamma) * h0 on the pre-enhancement span.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .compression import boundary_weight, compress_normals
from .errors import TargetUnreachable
from .solver import solve_heights

REL_TOL = 0.01        # convergence: |span - goal| / goal
ALPHA_START = 0.001
ALPHA_CAP = ALPHA_START * 2.0 ** 24  # leverage probe; past this alpha is moot
BETA_START = 1e-5


@dataclass(frozen=True)
class TargetRequest:
    h0: float
    max_solves: int = 200

    def __post_init__(self):
        if self.h0 <= 0.0:
            raise ValueError("target height must be positive")


@dataclass(frozen=True)
class TargetResult:
    alpha: float
    beta: float
    span: float        # pre-enhancement control span at (alpha, beta)
    solves: int


def max_control_span(session) -> float:
    """Span of the uncompressed relief (w_k = 1, boundary blend only)."""
    c = session.controls
    n_tilde = compress_normals(c.normals, boundary_weight(c.dist, session.rho))
    return solve_heights(session.system, n_tilde, session.params.base).h


def solve_for_height(session, req: TargetRequest,
                     progress=None) -> TargetResult:
    """Find (alpha, beta) whose control span matches req.h0 within 1%."""
    params = session.params
    goal = (1.0 - params.gamma) * req.h0
    solves = 0
    best = None

    def span_at(alpha, beta):
        nonlocal solves, best
        solves += 1
        h = session.solve_controls(replace(params, alpha=alpha, beta=beta)).h
        if best is None or abs(h - goal) < abs(best[2] - goal):
            best = (alpha, beta, h)
        if progress is not None:
            progress(solves, alpha, beta, h)
        return h

    def converged(h):
        return abs(h - goal) / goal <= REL_TOL

    solves += 1
    h_max = max_control_span(session)
    if goal > h_max * (1.0 + REL_TOL):
        raise TargetUnreachable(
            f"goal {goal:.6g} above the uncompressed span {h_max:.6g}",
            best=(1e-6, BETA_START, h_max))

    beta = BETA_START
    while solves < req.max_solves:
        h_lo = span_at(ALPHA_START, beta)
        if converged(h_lo):
            return TargetResult(ALPHA_START, beta, h_lo, solves)
        if h_lo < goal:
            beta *= 2.0  # even the smallest alpha undershoots at this beta
            continue
        h_hi = span_at(ALPHA_CAP, beta)
        if converged(h_hi):
            return TargetResult(ALPHA_CAP, beta, h_hi, solves)
        if h_hi > goal:
            beta *= 2.0  # alpha has no leverage at this beta; plateau
            continue
        lo, hi = ALPHA_START, ALPHA_CAP  # span(lo) >= goal > span(hi)
        while solves < req.max_solves:
            alpha = 0.5 * (lo + hi)
            h = span_at(alpha, beta)
            if converged(h):
                return TargetResult(alpha, beta, h, solves)
            if h < goal:
                hi = alpha
            else:
                lo = alpha
            if hi - lo <= 1e-12 * hi:
                break  # span is discontinuous across the goal; give beta room
        beta *= 2.0

    raise TargetUnreachable(
        f"no convergence within {req.max_solves} solves "
        f"(best span {best[2]:.6g} for goal {goal:.6g})", best=best)
