"""Basis convention, state parameterizations and physical parameters.

Two-qubit product basis, fixed everywhere in the package (0-based indices)::

    0: |e>_A |e>_B      1: |e>_A |g>_B
    2: |g>_A |e>_B      3: |g>_A |g>_B

Density matrices are plain ``(4, 4)`` complex numpy arrays in this order.
Single-qubit operators use ``|e> = (1, 0)`` and ``|g> = (0, 1)``, so the
first Kronecker factor is qubit A.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidState

EE, EG, GE, GG = 0, 1, 2, 3
BASIS_LABELS = ("ee", "eg", "ge", "gg")

# Tolerances for states produced by integration vs. built directly.
TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-8
TOL_EXACT = 1e-14

# Boolean mask of the entries an X state may populate: the diagonal and
# the |eg><ge| coherence pair.
X_MASK = np.eye(4, dtype=bool)
X_MASK[EG, GE] = X_MASK[GE, EG] = True


class Environment(enum.Enum):
    DECAY = "decay"
    DEPHASING = "dephasing"


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the two-qubit model (hbar = 1).

    ``gamma_*`` are spontaneous decay rates, ``Gamma_*`` pure dephasing
    rates. Only the rates of the selected environment may be nonzero.
    """

    omega0: float = 0.0
    v: float = 0.0
    gamma_A: float = 0.0
    gamma_B: float = 0.0
    Gamma_A: float = 0.0
    Gamma_B: float = 0.0
    environment: Environment = Environment.DECAY

    def __post_init__(self):
        rates = (self.gamma_A, self.gamma_B, self.Gamma_A, self.Gamma_B)
        if self.omega0 < 0 or any(r < 0 for r in rates):
            raise InvalidState("omega0 and all rates must be nonnegative")
        if not all(math.isfinite(x) for x in (self.omega0, self.v) + rates):
            raise InvalidState("model parameters must be finite")
        if self.environment is Environment.DECAY and (self.Gamma_A or self.Gamma_B):
            raise InvalidState("dephasing rates must be zero in the decay model")
        if self.environment is Environment.DEPHASING and (self.gamma_A or self.gamma_B):
            raise InvalidState("decay rates must be zero in the dephasing model")

    @classmethod
    def decay(cls, v=0.0, gamma=1.0, gamma_B=None, omega0=0.0):
        return cls(omega0=omega0, v=v, gamma_A=gamma,
                   gamma_B=gamma if gamma_B is None else gamma_B,
                   environment=Environment.DECAY)

    @classmethod
    def dephasing(cls, v=0.0, Gamma=1.0, Gamma_B=None, omega0=0.0):
        return cls(omega0=omega0, v=v, Gamma_A=Gamma,
                   Gamma_B=Gamma if Gamma_B is None else Gamma_B,
                   environment=Environment.DEPHASING)

    @property
    def rates(self) -> tuple[float, float]:
        """Bath rates (qubit A, qubit B) of the active environment."""
        if self.environment is Environment.DECAY:
            return self.gamma_A, self.gamma_B
        return self.Gamma_A, self.Gamma_B

    @property
    def rate_unit(self) -> float:
        """Largest active bath rate, or 1 for a closed system."""
        r = max(self.rates)
        return r if r > 0 else 1.0


@dataclass(frozen=True)
class XState:
    """X-form state ``normalization * [[a,0,0,0],[0,b,z,0],[0,z*,c,0],[0,0,0,d]]``."""

    a: float
    b: float
    c: float
    d: float
    z: complex = 0j
    normalization: float = 1.0

    def __post_init__(self):
        weights = (self.a, self.b, self.c, self.d)
        if any(w < 0 for w in weights):
            raise InvalidState(f"negative population weight in {weights}")
        if abs(self.z) ** 2 > self.b * self.c * (1 + TOL_EXACT) + TOL_EXACT:
            raise InvalidState("|z|^2 exceeds b*c: inner block is not positive")
        if abs(self.normalization * sum(weights) - 1.0) > TOL_TRACE:
            raise InvalidState("normalization * (a+b+c+d) must equal 1")


@dataclass(frozen=True)
class WernerFamilyInit:
    """One-parameter family: weights (a, 1, 1, 1-a), z = exp(i chi), scale 1/3."""

    a: float
    chi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise InvalidState(f"a must lie in [0, 1], got {self.a}")

    def to_xstate(self) -> XState:
        return XState(self.a, 1.0, 1.0, 1.0 - self.a,
                      complex(math.cos(self.chi), math.sin(self.chi)), 1.0 / 3.0)


def to_density_matrix(x: XState | WernerFamilyInit) -> np.ndarray:
    if isinstance(x, WernerFamilyInit):
        x = x.to_xstate()
    rho = np.zeros((4, 4), dtype=complex)
    n = x.normalization
    rho[EE, EE] = n * x.a
    rho[EG, EG] = n * x.b
    rho[GE, GE] = n * x.c
    rho[GG, GG] = n * x.d
    rho[EG, GE] = n * x.z
    rho[GE, EG] = n * np.conj(x.z)
    return rho


def project_to_x_form(rho) -> tuple[XState, float]:
    """Read the X-pattern entries of ``rho``.

    Returns the X state built from those entries (with ``normalization``
    absorbing the trace) and the largest magnitude found outside the X
    pattern. Populations and ``|z|`` are clipped only at the rounding level
    needed to construct a valid XState.
    """
    rho = np.asarray(rho)
    residual = float(np.abs(rho[~X_MASK]).max())
    a, b, c, d = (max(float(p), 0.0) for p in rho.diagonal().real)
    z = complex(rho[EG, GE])
    if abs(z) ** 2 > b * c:
        z *= math.sqrt(b * c) / abs(z)
    return XState(a, b, c, d, z, 1.0 / (a + b + c + d)), residual


def off_x_residual(states) -> np.ndarray:
    """Largest off-X magnitude of each matrix in a ``(..., 4, 4)`` stack."""
    states = np.asarray(states)
    return np.abs(states[..., ~X_MASK]).max(axis=-1)


def state_defects(states) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Trace error, Hermiticity error and minimum eigenvalue per matrix."""
    states = np.asarray(states)
    trace_err = np.abs(np.trace(states, axis1=-2, axis2=-1) - 1.0)
    herm_err = np.abs(states - np.conj(np.swapaxes(states, -1, -2))).max(axis=(-2, -1))
    hermitian_part = 0.5 * (states + np.conj(np.swapaxes(states, -1, -2)))
    min_eig = np.linalg.eigvalsh(hermitian_part)[..., 0]
    return trace_err, herm_err, min_eig


def validate_density_matrix(rho, tol_herm=TOL_HERM, tol_trace=TOL_TRACE, tol_psd=TOL_PSD):
    """Raise InvalidState unless ``rho`` is a 4x4 Hermitian, unit-trace PSD matrix."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise InvalidState(f"expected a 4x4 matrix, got shape {rho.shape}")
    trace_err, herm_err, min_eig = (float(q) for q in state_defects(rho))
    if herm_err > tol_herm:
        raise InvalidState(f"not Hermitian (asymmetry {herm_err:.3e})")
    if trace_err > tol_trace:
        raise InvalidState(f"trace differs from 1 by {trace_err:.3e}")
    if min_eig < -tol_psd:
        raise InvalidState(f"not positive semidefinite (min eigenvalue {min_eig:.3e})")
    return rho


def ket(*amplitudes) -> np.ndarray:
    """Normalized column vector in the product basis."""
    psi = np.asarray(amplitudes, dtype=complex)
    return psi / np.linalg.norm(psi)


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())
