"""Hamiltonian, dissipators and the vectorized Liouvillian.

Conventions: hbar = 1, S_z has eigenvalues +-1/2, and ``vec`` stacks
columns, so ``vec(A X B) = kron(B.T, A) @ vec(X)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Environment, ModelParams
from .errors import ModelMismatch

# Prefactors multiplying each rate in front of the bracket
# (X^+X rho - 2 X rho X^+ + rho X^+X). With S_z = +-1/2 a dephasing
# prefactor of 1 makes rho_23 decay at exactly Gamma_A + Gamma_B.
DECAY_PREFACTOR = 0.5
DEPHASING_PREFACTOR = 1.0

_SZ = np.diag([0.5, -0.5]).astype(complex)
_SP = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g|
_SM = _SP.T.copy()
_I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)

SZ_A, SZ_B = np.kron(_SZ, _I2), np.kron(_I2, _SZ)
SP_A, SP_B = np.kron(_SP, _I2), np.kron(_I2, _SP)
SM_A, SM_B = np.kron(_SM, _I2), np.kron(_I2, _SM)


def vec(rho) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v) -> np.ndarray:
    """Inverse of ``vec``; also accepts a stack of vectors with shape ``(..., 16)``."""
    v = np.asarray(v)
    # Row-major reshape of a column-stacked vector yields the transpose.
    return np.swapaxes(v.reshape(v.shape[:-1] + (4, 4)), -1, -2)


def hamiltonian(params: ModelParams) -> np.ndarray:
    return (params.omega0 * (SZ_A + SZ_B)
            + params.v * (SP_A @ SM_B + SP_B @ SM_A))


def bath_operators(params: ModelParams):
    """Yield ``(X, weight)`` with the dissipator ``-weight (X^+X rho - 2 X rho X^+ + rho X^+X)``."""
    if params.environment is Environment.DECAY:
        pairs, pref = ((SM_A, params.gamma_A), (SM_B, params.gamma_B)), DECAY_PREFACTOR
    else:
        pairs, pref = ((SZ_A, params.Gamma_A), (SZ_B, params.Gamma_B)), DEPHASING_PREFACTOR
    for X, rate in pairs:
        if rate:
            yield X, pref * rate


def _commutator_term(H, rho):
    return -1j * (H @ rho - rho @ H)


def decay_rhs(rho, params: ModelParams) -> np.ndarray:
    if params.environment is not Environment.DECAY:
        raise ModelMismatch("decay_rhs needs the decay model")
    rho = np.asarray(rho, dtype=complex)
    out = _commutator_term(hamiltonian(params), rho)
    pref = DECAY_PREFACTOR
    for Sp, Sm, rate in ((SP_A, SM_A, params.gamma_A), (SP_B, SM_B, params.gamma_B)):
        out -= pref * rate * (Sp @ Sm @ rho - 2 * Sm @ rho @ Sp + rho @ Sp @ Sm)
    return out


def dephasing_rhs(rho, params: ModelParams) -> np.ndarray:
    if params.environment is not Environment.DEPHASING:
        raise ModelMismatch("dephasing_rhs needs the dephasing model")
    rho = np.asarray(rho, dtype=complex)
    out = _commutator_term(hamiltonian(params), rho)
    pref = DEPHASING_PREFACTOR
    for Sz, rate in ((SZ_A, params.Gamma_A), (SZ_B, params.Gamma_B)):
        out -= pref * rate * (Sz @ Sz @ rho - 2 * Sz @ rho @ Sz + rho @ Sz @ Sz)
    return out


def rhs(rho, params: ModelParams) -> np.ndarray:
    """Right-hand side for whichever environment ``params`` selects."""
    if params.environment is Environment.DECAY:
        return decay_rhs(rho, params)
    return dephasing_rhs(rho, params)


def lindblad_generator(params: ModelParams):
    """Kernel form ``(G, jumps)`` with ``rho' = G rho + rho G^+ + sum L rho L^+``.

    Each bracket term ``-w (X^+X rho - 2 X rho X^+ + rho X^+X)`` is a
    standard Lindblad term with jump operator ``sqrt(2w) X``.
    """
    G = -1j * hamiltonian(params)
    jumps = []
    for X, w in bath_operators(params):
        G = G - w * X.conj().T @ X
        jumps.append(np.sqrt(2 * w) * X)
    jumps = np.array(jumps, dtype=complex).reshape(-1, 4, 4)
    return G, jumps


@dataclass(frozen=True)
class Superoperator:
    """16x16 generator acting on column-stacked density matrices."""

    entries: np.ndarray
    model: Environment

    def __post_init__(self):
        self.entries.setflags(write=False)

    def apply(self, rho) -> np.ndarray:
        return unvec(self.entries @ vec(rho))


def build_superoperator(params: ModelParams) -> Superoperator:
    H = hamiltonian(params)
    L = -1j * (np.kron(I4, H) - np.kron(H.T, I4))
    for X, w in bath_operators(params):
        XdX = X.conj().T @ X
        # -w (X^+X rho - 2 X rho X^+ + rho X^+X)
        L = L - w * (np.kron(I4, XdX) - 2 * np.kron(X.conj(), X) + np.kron(XdX.T, I4))
    return Superoperator(np.ascontiguousarray(L), params.environment)
