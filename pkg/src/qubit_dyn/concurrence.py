"""Wootters concurrence: general path, X-state fast path, and traces."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EE, EG, GE, GG, TOL_PSD, XState, to_density_matrix
from .errors import NumericalBreakdown

_SY = np.array([[0, -1j], [1j, 0]])
SYSY = np.kron(_SY, _SY)

# Eigenvalues of rho below this (relative to its largest) are roundoff and
# are zeroed before the square root; otherwise sqrt(1e-17) ~ 3e-9 leaks in.
_EIG_FLOOR = 16 * np.finfo(float).eps
# Concurrence lies in [0, 1]; values this close to either end are rounding
# of the endpoint (a Bell state, or a pure product state with c = |<psi|Y|psi*>|).
_UNIT_SNAP = 16 * np.finfo(float).eps


@dataclass(frozen=True)
class ConcurrenceValue:
    c: float
    c_tilde: float
    lambdas: tuple[float, float, float, float] | None = None


def spin_flip(rho) -> np.ndarray:
    rho = np.asarray(rho)
    return SYSY @ rho.conj() @ SYSY


def _sqrtm_psd(rho):
    w, V = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    if w[0] < -TOL_PSD:
        raise NumericalBreakdown(f"density matrix has eigenvalue {w[0]:.3e}")
    w = np.where(w > _EIG_FLOOR * max(w[-1], 0.0), w, 0.0)
    return (V * np.sqrt(w)) @ V.conj().T


def wootters_lambdas(rho) -> np.ndarray:
    """Square roots of the eigenvalues of rho * spin_flip(rho), descending.

    These are the singular values of ``sqrt(rho) Y sqrt(rho)^*`` with
    ``Y = sigma_y (x) sigma_y``: that matrix times its adjoint is the
    Hermitian ``sqrt(rho) spin_flip(rho) sqrt(rho)``, which is similar to
    ``rho spin_flip(rho)``.
    """
    S = _sqrtm_psd(np.asarray(rho, dtype=complex))
    return np.linalg.svd(S @ SYSY @ S.conj(), compute_uv=False)


def concurrence_general(rho) -> ConcurrenceValue:
    lam = wootters_lambdas(rho)
    c_tilde = float(lam[0] - lam[1] - lam[2] - lam[3])
    if c_tilde > 1.0 - _UNIT_SNAP:
        c_tilde = 1.0
    elif abs(c_tilde) < _UNIT_SNAP:
        c_tilde = 0.0
    return ConcurrenceValue(max(0.0, c_tilde), c_tilde, tuple(float(x) for x in lam))


def concurrence_x(x: XState | np.ndarray) -> ConcurrenceValue:
    """``c_tilde = 2 (|rho_23| - sqrt(rho_11 rho_44))`` read from an X state.

    Accepts an XState or a 4x4 matrix (only the X entries are read).
    """
    rho = to_density_matrix(x) if isinstance(x, XState) else np.asarray(x)
    ct = float(x_c_tilde(rho))
    return ConcurrenceValue(max(0.0, ct), ct)


def x_c_tilde(states) -> np.ndarray:
    """Vectorized X-state ``c_tilde`` over a ``(..., 4, 4)`` stack."""
    states = np.asarray(states)
    pop = np.maximum(states[..., EE, EE].real * states[..., GG, GG].real, 0.0)
    return 2.0 * (np.abs(states[..., EG, GE]) - np.sqrt(pop))


@dataclass(frozen=True)
class ConcurrenceTrace:
    times: np.ndarray
    c: np.ndarray
    c_tilde: np.ndarray
    source: str  # "numeric", "exponential-oracle" or "analytic"


def trace_from_states(times, states, source: str, path: str = "x") -> ConcurrenceTrace:
    """Concurrence along a trajectory via the X fast path or the general path."""
    if path == "x":
        ct = x_c_tilde(states)
    elif path == "general":
        ct = np.array([concurrence_general(s).c_tilde for s in states])
    else:
        raise ValueError(f"unknown concurrence path {path!r}")
    return ConcurrenceTrace(np.asarray(times), np.maximum(ct, 0.0), ct, source)
