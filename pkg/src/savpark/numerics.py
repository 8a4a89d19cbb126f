"""Scalar numerical kernels used by the planning solvers.

Two pieces live here: closed-form extraction of the positive root of a
depressed cubic t**3 + a*t + b = 0 via the trigonometric (three-real-root)
branch, and a deterministic derivative-free minimizer over a 2-D box
(coarse logarithmic grid scan followed by coordinate-wise golden-section
refinement). Everything is dimensionless; callers own unit handling.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence, Tuple


class RegimeError(ValueError):
    """Inputs left the regime the closed-form math assumes."""


class InfeasibleError(RegimeError):
    """No feasible point exists under the stated constraints."""


class EvaluationError(RuntimeError):
    """Objective returned a non-finite value. ``point`` holds the input."""

    def __init__(self, message: str, point: Tuple[float, float]):
        super().__init__(message)
        self.point = point


# arccos arguments within this distance past +-1 are treated as round-off
_ACOS_SLACK = 1e-12

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

GRID_POINTS = 32
OUTER_SWEEPS = 3


def cubic_discriminant(lin: float, const: float) -> float:
    """Discriminant of t**3 + lin*t + const.

    Positive means three distinct real roots, zero a repeated root,
    negative a single real root.
    """
    return -(4.0 * lin ** 3 + 27.0 * const ** 2)


def viete_positive_root(lin: float, const: float) -> float:
    """Unique positive root of t**3 + lin*t + const = 0.

    Requires the three-real-root regime with lin < 0 (guaranteed upstream
    by positive cost coefficients). Uses the k=0 trigonometric branch,
    then two guarded Newton polish steps so the residual stays near
    machine precision even for badly scaled coefficients.
    """
    if not (math.isfinite(lin) and math.isfinite(const)):
        raise RegimeError("cubic coefficients must be finite")
    if lin >= 0.0:
        raise RegimeError(f"cubic linear coefficient must be negative, got {lin}")
    if cubic_discriminant(lin, const) <= 0.0:
        raise RegimeError(
            "cubic discriminant is not positive; scenario parameters are degenerate"
        )
    arg = (3.0 * const / (2.0 * lin)) * math.sqrt(-3.0 / lin)
    if arg > 1.0:
        if arg - 1.0 > _ACOS_SLACK:
            raise RegimeError(f"trigonometric branch argument {arg} out of range")
        arg = 1.0
    elif arg < -1.0:
        if -1.0 - arg > _ACOS_SLACK:
            raise RegimeError(f"trigonometric branch argument {arg} out of range")
        arg = -1.0
    root = 2.0 * math.sqrt(-lin / 3.0) * math.cos(math.acos(arg) / 3.0)
    for _ in range(2):
        f = root * (root * root + lin) + const
        df = 3.0 * root * root + lin
        if df == 0.0:
            break
        step = f / df
        # near-degenerate cubics make Newton overshoot; keep the closed form then
        if abs(step) > 0.5 * abs(root):
            break
        root -= step
    return root


Bounds2D = Tuple[Tuple[float, float], Tuple[float, float]]


def _checked(f: Callable[[float, float], float], u: float, v: float) -> float:
    val = f(u, v)
    if not math.isfinite(val):
        raise EvaluationError(f"objective returned {val} at ({u}, {v})", (u, v))
    return val


def _axis_grid(lo: float, hi: float, points: int) -> Sequence[float]:
    if lo > 0.0:
        ratio = hi / lo
        return [lo * ratio ** (i / (points - 1)) for i in range(points)]
    step = (hi - lo) / (points - 1)
    return [lo + i * step for i in range(points)]


def minimize_box_2d(
    f: Callable[[float, float], float],
    bounds: Bounds2D,
    tol: float = 1e-7,
) -> Tuple[Tuple[float, float], float]:
    """Minimize f over the box, returning ((u, v), f(u, v)).

    Deterministic: a GRID_POINTS x GRID_POINTS logarithmic scan locates the
    basin, then OUTER_SWEEPS rounds of coordinate-wise golden-section search
    shrink each coordinate bracket to ``tol``. Intended for objectives that
    are unimodal along each coordinate on the box, which the planning cost
    surfaces are; for anything multimodal the result is only a local
    minimum. Non-finite objective values raise EvaluationError.
    """
    (lo_u, hi_u), (lo_v, hi_v) = bounds
    if not (lo_u < hi_u and lo_v < hi_v):
        raise ValueError(f"degenerate bounds {bounds}")
    if tol <= 0.0:
        raise ValueError("tol must be positive")

    best_u = best_v = 0.0
    best_f = math.inf
    for u in _axis_grid(lo_u, hi_u, GRID_POINTS):
        for v in _axis_grid(lo_v, hi_v, GRID_POINTS):
            val = _checked(f, u, v)
            if val < best_f:
                best_f, best_u, best_v = val, u, v

    def golden(g: Callable[[float], float], lo: float, hi: float) -> Tuple[float, float]:
        a, b = lo, hi
        c = b - _INV_GOLDEN * (b - a)
        d = a + _INV_GOLDEN * (b - a)
        fc, fd = g(c), g(d)
        while b - a > tol:
            if fc <= fd:
                b, d, fd = d, c, fc
                c = b - _INV_GOLDEN * (b - a)
                fc = g(c)
            else:
                a, c, fc = c, d, fd
                d = a + _INV_GOLDEN * (b - a)
                fd = g(d)
        return (c, fc) if fc <= fd else (d, fd)

    for _ in range(OUTER_SWEEPS):
        u, fu = golden(lambda t: _checked(f, t, best_v), lo_u, hi_u)
        if fu < best_f:
            best_f, best_u = fu, u
        v, fv = golden(lambda t: _checked(f, best_u, t), lo_v, hi_v)
        if fv < best_f:
            best_f, best_v = fv, v
    return (best_u, best_v), best_f
