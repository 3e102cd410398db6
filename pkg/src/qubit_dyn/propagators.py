"""Time propagation by fixed-step RK4 and by the exact superoperator exponential.

The two routes share nothing beyond ``ModelParams``: RK4 integrates the
Lindblad generator ``(G, jumps)`` while the exponential route uses the
Kronecker-built Liouvillian, so each can falsify the other.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .core import TOL_HERM, TOL_PSD, TOL_TRACE, ModelParams, state_defects, validate_density_matrix
from .errors import InvalidState, NumericalBreakdown, PositivityViolation, StepTooLarge
from .liouvillian import build_superoperator, lindblad_generator, unvec, vec


class Method(enum.Enum):
    RK4_FIXED = "rk4"
    EXP_ORACLE = "exp"


def dt_max(params: ModelParams) -> float:
    """Largest admissible RK4 step, in the program's absolute time units.

    ``0.01 / max(1, |v| / rate)`` measured in units of ``1 / rate``, where
    ``rate`` is the largest active bath rate.
    """
    return 0.01 / max(params.rate_unit, abs(params.v))


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    t_end: float
    method: Method = Method.RK4_FIXED
    sample_every: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidState(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0:
            raise InvalidState(f"t_end must be nonnegative, got {self.t_end}")
        if self.sample_every < 1:
            raise InvalidState("sample_every must be at least 1")

    @classmethod
    def for_params(cls, params: ModelParams, t_end: float, method=Method.RK4_FIXED,
                   sample_every: int = 1, refine: int = 1):
        return cls(dt_max(params) / refine, t_end, method, sample_every)

    def grid(self) -> tuple[float, np.ndarray]:
        """Effective step and the step indices that are sampled.

        The step is shrunk (never grown) so that ``t_end`` is hit exactly;
        the final step is always sampled.
        """
        n_steps = max(int(math.ceil(self.t_end / self.dt - 1e-9)), 0)
        h = self.t_end / n_steps if n_steps else self.dt
        steps = np.arange(0, n_steps + 1, self.sample_every, dtype=np.int64)
        if steps[-1] != n_steps:
            steps = np.append(steps, n_steps)
        return h, steps


@dataclass(frozen=True)
class StateTrajectory:
    times: np.ndarray
    states: np.ndarray  # (n, 4, 4)

    def __post_init__(self):
        self.times.setflags(write=False)
        self.states.setflags(write=False)

    def __len__(self):
        return len(self.times)

    def defects(self) -> dict[str, float]:
        """Worst trace, Hermiticity and positivity defects along the trajectory."""
        tr, herm, mineig = state_defects(self.states)
        return {"trace": float(tr.max()), "hermiticity": float(herm.max()),
                "min_eigenvalue": float(mineig.min())}


def check_trajectory(traj: StateTrajectory, tol_herm=TOL_HERM, tol_trace=TOL_TRACE,
                     tol_psd=TOL_PSD) -> StateTrajectory:
    finite = np.isfinite(traj.states).all(axis=(1, 2))
    if not finite.all():
        k = int(np.argmin(finite))
        raise NumericalBreakdown(f"non-finite state at t={traj.times[k]:.6g}")
    tr, herm, mineig = state_defects(traj.states)
    k = int(np.argmin(mineig))
    if mineig[k] < -tol_psd:
        raise PositivityViolation(
            f"min eigenvalue {mineig[k]:.3e} at t={traj.times[k]:.6g}")
    for name, err, tol in (("trace", tr, tol_trace), ("Hermiticity", herm, tol_herm)):
        k = int(np.argmax(err))
        if err[k] > tol:
            raise InvalidState(f"{name} drift {err[k]:.3e} at t={traj.times[k]:.6g}")
    return traj


def integrate_rk(rho0, params: ModelParams, cfg: IntegratorConfig) -> StateTrajectory:
    """Classical fixed-step RK4 on the selected master equation."""
    rho0 = validate_density_matrix(np.asarray(rho0, dtype=complex))
    limit = dt_max(params)
    if cfg.dt > limit * (1 + 1e-12):
        raise StepTooLarge(f"dt={cfg.dt:g} exceeds dt_max={limit:g} for v={params.v:g}")
    h, steps = cfg.grid()
    G, jumps = lindblad_generator(params)
    states = _accel.rk4_lindblad(rho0, G, jumps, h, steps)
    return check_trajectory(StateTrajectory(steps * h, states))


def integrate_exp(rho0, params: ModelParams, cfg: IntegratorConfig) -> StateTrajectory:
    """Exact propagation ``rho(t) = unvec(expm(L t) vec(rho0))`` at the sample times."""
    rho0 = validate_density_matrix(np.asarray(rho0, dtype=complex))
    h, steps = cfg.grid()
    times = steps * h
    L = build_superoperator(params).entries
    states = unvec(_accel.exp_propagate(L, vec(rho0), times))
    return StateTrajectory(times, np.ascontiguousarray(states))


def propagate(rho0, params: ModelParams, cfg: IntegratorConfig) -> StateTrajectory:
    if cfg.method is Method.EXP_ORACLE:
        return integrate_exp(rho0, params, cfg)
    return integrate_rk(rho0, params, cfg)


def propagate_to(rho0, params: ModelParams, t: float) -> np.ndarray:
    """Single exact propagation to time ``t``."""
    L = build_superoperator(params).entries
    return unvec(_accel.expm(L * t) @ vec(np.asarray(rho0, dtype=complex)))
