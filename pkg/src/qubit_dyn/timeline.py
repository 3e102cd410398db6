"""Bright/dark interval extraction from a signed concurrence evaluator.

An evaluator ``f`` returns ``c_tilde`` (the pre-clamp concurrence) and
must accept both a float and a 1-D array of times. Bright means
``f > 0``; dark means ``f <= 0``, i.e. concurrence exactly zero.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import analytics
from .concurrence import x_c_tilde
from .core import ModelParams
from .errors import GridTooCoarse
from .liouvillian import build_superoperator, unvec, vec
from . import _accel

# Probe offset used to decide whether a zero is a crossing or a touch.
TOUCH_PROBE = 1e-6
BISECT_REL_TOL = 1e-8
# Interior probes per refined cell, used to detect hidden extra crossings.
_CELL_PROBES = 8


class Kind(enum.Enum):
    BRIGHT = "bright"
    DARK = "dark"


@dataclass(frozen=True)
class Interval:
    t_start: float
    t_end: float
    kind: Kind

    @property
    def length(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class EntanglementTimeline:
    intervals: tuple[Interval, ...]
    horizon: float
    esd_time: float | None = None
    boundaries: tuple[float, ...] = field(default=(), repr=False)

    def kinds(self) -> list[Kind]:
        return [iv.kind for iv in self.intervals]


def default_grid_n(horizon: float, v_over_rate: float = 0.0) -> int:
    """4096 points per 10 time units, scaled linearly with the coupling."""
    n = 4096 * max(horizon, 1e-12) / 10.0 * max(1.0, abs(v_over_rate))
    return max(int(math.ceil(n)), 1000)


def _bisect(f, lo, hi, f_lo, tol):
    """Shrink a sign-change bracket to width ``tol``, then one secant step."""
    f_hi = float(f(hi))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = float(f(mid))
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    if f_hi != f_lo:
        root = lo - f_lo * (hi - lo) / (f_hi - f_lo)
        return min(max(root, lo), hi)
    return 0.5 * (lo + hi)


def extract_timeline(f, horizon: float, grid_n: int | None = None) -> EntanglementTimeline:
    if grid_n is None:
        grid_n = default_grid_n(horizon)
    if grid_n < 1000:
        raise ValueError("grid_n must be at least 1000")
    grid = np.linspace(0.0, horizon, grid_n + 1)
    values = np.asarray(f(grid), dtype=float)
    bright = values > 0
    tol = BISECT_REL_TOL * horizon

    boundaries = []
    for k in np.flatnonzero(bright[1:] != bright[:-1]):
        lo, hi = grid[k], grid[k + 1]
        probes = np.linspace(lo, hi, _CELL_PROBES + 2)
        signs = np.asarray(f(probes), dtype=float) > 0
        if np.count_nonzero(signs[1:] != signs[:-1]) > 1:
            raise GridTooCoarse(
                f"several sign changes inside [{lo:.6g}, {hi:.6g}]; increase grid_n")
        boundaries.append(_bisect(f, lo, hi, values[k], tol))

    kinds = [Kind.BRIGHT if bright[0] else Kind.DARK]
    for _ in boundaries:
        kinds.append(Kind.DARK if kinds[-1] is Kind.BRIGHT else Kind.BRIGHT)
    edges = [0.0] + boundaries + [float(horizon)]
    intervals = [Interval(edges[i], edges[i + 1], kinds[i]) for i in range(len(kinds))]
    intervals = _merge_touches(f, intervals)

    esd = intervals[-1].t_start if intervals[-1].kind is Kind.DARK else None
    return EntanglementTimeline(tuple(intervals), float(horizon), esd,
                                tuple(iv.t_end for iv in intervals[:-1]))


def _merge_touches(f, intervals):
    """Drop dark slivers where ``f`` only touches zero from above."""
    out = []
    for iv in intervals:
        is_touch = (iv.kind is Kind.DARK and out and out[-1].kind is Kind.BRIGHT
                    and iv.length < 2 * TOUCH_PROBE
                    and iv is not intervals[-1])
        if is_touch:
            mid = 0.5 * (iv.t_start + iv.t_end)
            if float(f(mid - TOUCH_PROBE)) > 0 and float(f(mid + TOUCH_PROBE)) > 0:
                out[-1] = Interval(out[-1].t_start, iv.t_end, Kind.BRIGHT)
                continue
        if out and out[-1].kind is iv.kind:
            out[-1] = Interval(out[-1].t_start, iv.t_end, iv.kind)
        else:
            out.append(iv)
    return out


def dark_fraction(tl: EntanglementTimeline) -> float:
    dark = sum(iv.length for iv in tl.intervals if iv.kind is Kind.DARK)
    return dark / tl.horizon if tl.horizon > 0 else 0.0


def revival_count(tl: EntanglementTimeline) -> int:
    return sum(1 for prev, cur in zip(tl.intervals, tl.intervals[1:])
               if prev.kind is Kind.DARK and cur.kind is Kind.BRIGHT)


def analytic_evaluator(p: analytics.AnalyticParams):
    return lambda t: analytics.c_tilde(p, t)


class NumericEvaluator:
    """``c_tilde(t)`` by exact re-propagation of an X initial state.

    Times are absolute; pass ``time_scale`` to accept times in units of
    the bath rate instead.
    """

    def __init__(self, rho0, params: ModelParams, time_scale: float = 1.0):
        self.L = build_superoperator(params).entries
        self.vec0 = vec(np.asarray(rho0, dtype=complex))
        self.time_scale = time_scale

    def states(self, t):
        times = np.atleast_1d(np.asarray(t, dtype=float)) / self.time_scale
        return unvec(_accel.exp_propagate(self.L, self.vec0, times))

    def __call__(self, t):
        out = x_c_tilde(self.states(t))
        return out if np.ndim(t) else float(out[0])


def sign_change_count(values) -> int:
    """Number of bright/dark transitions in sampled ``c_tilde`` values."""
    bright = np.asarray(values) > 0
    return int(np.count_nonzero(bright[1:] != bright[:-1]))
