"""Closed-form concurrence for the one-parameter mixed-state family.

Family: weights (a, 1, 1, 1-a), ``z = exp(i chi)``, normalization 1/3,
equal bath rates on both qubits. Times are in units of the bath rate
(``gamma t`` for decay, ``tau = Gamma t`` for dephasing) and the coupling
enters only through ``v_over_rate``. All functions broadcast over numpy
arrays of times.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Environment
from .errors import ModelMismatch


@dataclass(frozen=True)
class AnalyticParams:
    a: float
    chi: float
    v_over_rate: float
    model: Environment = Environment.DECAY

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise ValueError(f"a must lie in [0, 1], got {self.a}")


class EsdVerdict(enum.Enum):
    ESD_OCCURS = "esd"
    NO_ESD = "no-esd"
    BOUNDARY = "boundary"


def _require(p: AnalyticParams, model: Environment):
    if p.model is not model:
        raise ModelMismatch(f"expected {model.value} parameters, got {p.model.value}")


def population_radicand(a, w):
    """``a (1 - a + 2 w^2 + a w^4)``: 9 rho_11 rho_44 e^{2 gamma t} under decay."""
    w2 = w * w
    return a * (1.0 - a + 2.0 * w2 + a * w2 * w2)


def c_tilde_decay(p: AnalyticParams, t):
    _require(p, Environment.DECAY)
    t = np.asarray(t, dtype=float)
    decay = np.exp(-t)
    w = np.sqrt(-np.expm1(-t))
    coherence = np.sqrt(math.cos(p.chi) ** 2
                        + math.sin(p.chi) ** 2 * np.cos(2 * p.v_over_rate * t) ** 2)
    out = (2.0 / 3.0) * decay * (coherence - np.sqrt(population_radicand(p.a, w)))
    return out if out.ndim else float(out)


def _flip_flop_factor(x, tau):
    """``cos(W tau) - sin(W tau) / W`` with ``W = sqrt(x^2 - 1)``, continued below x = 1.

    For x < 1 the trigonometric functions become hyperbolic with
    ``W' = sqrt(1 - x^2)``; at x = 1 both branches reduce to ``1 - tau``.
    ``sin(W tau)/W`` is evaluated as ``tau sinc`` so nothing divides by
    a vanishing frequency.
    """
    disc = x * x - 1.0
    if disc >= 0:
        W = math.sqrt(disc)
        return np.cos(W * tau) - tau * np.sinc(W * tau / np.pi)
    W = math.sqrt(-disc)
    arg = W * tau
    # sinh(arg)/arg, exact 1 at arg = 0
    with np.errstate(invalid="ignore", divide="ignore"):
        shc = np.where(arg == 0, 1.0, np.sinh(arg) / np.where(arg == 0, 1.0, arg))
    return np.cosh(arg) - tau * shc


def c_tilde_dephasing(p: AnalyticParams, tau):
    _require(p, Environment.DEPHASING)
    tau = np.asarray(tau, dtype=float)
    g = _flip_flop_factor(2.0 * abs(p.v_over_rate), tau)
    inner = np.exp(-2 * tau) * math.cos(p.chi) ** 2 + math.sin(p.chi) ** 2 * g * g
    out = (2.0 / 3.0) * (np.exp(-tau) * np.sqrt(inner) - math.sqrt(p.a * (1 - p.a)))
    return out if out.ndim else float(out)


def c_tilde(p: AnalyticParams, t):
    if p.model is Environment.DECAY:
        return c_tilde_decay(p, t)
    return c_tilde_dephasing(p, t)


def concurrence(p: AnalyticParams, t):
    return np.maximum(c_tilde(p, t), 0.0)


def dark_condition_decay(p: AnalyticParams, t):
    """True where the qubits are disentangled under decay.

    Compares the population radicand with ``1 - sin^2 chi sin^2(2 v t)``.
    """
    _require(p, Environment.DECAY)
    t = np.asarray(t, dtype=float)
    w = np.sqrt(-np.expm1(-t))
    rhs = 1.0 - math.sin(p.chi) ** 2 * np.sin(2 * p.v_over_rate * t) ** 2
    out = population_radicand(p.a, w) > rhs
    return out if out.ndim else bool(out)


def esd_threshold_decay(p: AnalyticParams) -> EsdVerdict:
    """Asymptotic ESD verdict for uncoupled qubits under decay.

    At v = 0 the radicand grows monotonically in w and reaches 3a at
    w = 1, so concurrence dies in finite time iff 3a > 1.
    """
    _require(p, Environment.DECAY)
    if p.v_over_rate != 0:
        raise ValueError("the ESD threshold is defined for v = 0 only")
    # 3a - 1 within a few ulps of zero is the threshold itself (a = 1/3 is
    # not representable, and neighbouring floats are how callers spell it).
    excess = 3.0 * p.a - 1.0
    if abs(excess) <= 4 * np.finfo(float).eps:
        return EsdVerdict.BOUNDARY
    return EsdVerdict.ESD_OCCURS if excess > 0 else EsdVerdict.NO_ESD


def dephasing_death_time(a: float) -> float:
    """Zero of ``e^{-2 tau} - sqrt(a (1 - a))`` (uncoupled qubits, pure dephasing)."""
    return -0.5 * math.log(math.sqrt(a * (1 - a)))
