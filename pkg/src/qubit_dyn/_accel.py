"""Hot kernels: fixed-step RK4 on the Lindblad form and Taylor expm.

Each kernel exists twice: a numba ``@njit`` version with explicit loops and
a vectorized numpy version. The numba path is used when numba imports and
``QUBIT_DYN_DISABLE_NUMBA`` is unset or ``0``; ``use_numba`` switches at
runtime (tests and the benchmark exercise both).
"""
import math
import os

import numpy as np

try:
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f

_ENABLED = HAS_NUMBA and os.environ.get("QUBIT_DYN_DISABLE_NUMBA", "0") in ("", "0")

# Taylor order for the scaled exponent; with ||A|| < 0.5 the truncation
# term 0.5**19 / 19! is far below double precision.
TAYLOR_ORDER = 18
EXPM_SCALED_NORM = 0.5


def use_numba(flag: bool) -> None:
    global _ENABLED
    if flag and not HAS_NUMBA:
        raise RuntimeError("numba is not installed")
    _ENABLED = bool(flag)


def numba_enabled() -> bool:
    return _ENABLED


def backend_name() -> str:
    return "numba" if _ENABLED else "numpy"


def squaring_count(norm1: float) -> int:
    if norm1 <= EXPM_SCALED_NORM:
        return 0
    return int(math.ceil(math.log2(norm1 / EXPM_SCALED_NORM)))


# ---------------------------------------------------------------- numba path


@njit(cache=True, nogil=True)
def _rhs_nb(rho, G, jumps, out):
    # out = G rho + rho G^dagger + sum_k L_k rho L_k^dagger
    n = 4
    for i in range(n):
        for j in range(n):
            acc = 0j
            for k in range(n):
                acc += G[i, k] * rho[k, j] + rho[i, k] * G[j, k].conjugate()
            out[i, j] = acc
    tmp = np.empty((n, n), dtype=np.complex128)
    for m in range(jumps.shape[0]):
        L = jumps[m]
        for i in range(n):
            for j in range(n):
                acc = 0j
                for k in range(n):
                    acc += L[i, k] * rho[k, j]
                tmp[i, j] = acc
        for i in range(n):
            for j in range(n):
                acc = 0j
                for k in range(n):
                    acc += tmp[i, k] * L[j, k].conjugate()
                out[i, j] += acc


@njit(cache=True, nogil=True)
def _rk4_nb(rho0, G, jumps, dt, sample_steps):
    n_samples = sample_steps.shape[0]
    out = np.empty((n_samples, 4, 4), dtype=np.complex128)
    rho = rho0.copy()
    k1 = np.empty((4, 4), dtype=np.complex128)
    k2 = np.empty_like(k1)
    k3 = np.empty_like(k1)
    k4 = np.empty_like(k1)
    stage = np.empty_like(k1)
    step = 0
    for s in range(n_samples):
        while step < sample_steps[s]:
            _rhs_nb(rho, G, jumps, k1)
            for i in range(4):
                for j in range(4):
                    stage[i, j] = rho[i, j] + 0.5 * dt * k1[i, j]
            _rhs_nb(stage, G, jumps, k2)
            for i in range(4):
                for j in range(4):
                    stage[i, j] = rho[i, j] + 0.5 * dt * k2[i, j]
            _rhs_nb(stage, G, jumps, k3)
            for i in range(4):
                for j in range(4):
                    stage[i, j] = rho[i, j] + dt * k3[i, j]
            _rhs_nb(stage, G, jumps, k4)
            for i in range(4):
                for j in range(4):
                    rho[i, j] += dt / 6.0 * (k1[i, j] + 2.0 * k2[i, j]
                                             + 2.0 * k3[i, j] + k4[i, j])
            step += 1
        out[s] = rho
    return out


@njit(cache=True, nogil=True)
def _matmul_nb(A, B):
    n = A.shape[0]
    C = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for k in range(n):
            a = A[i, k]
            if a != 0:
                for j in range(n):
                    C[i, j] += a * B[k, j]
    return C


@njit(cache=True, nogil=True)
def _expm_nb(A, order, max_norm):
    n = A.shape[0]
    norm1 = 0.0
    for j in range(n):
        col = 0.0
        for i in range(n):
            col += abs(A[i, j])
        norm1 = max(norm1, col)
    s = 0
    if norm1 > max_norm:
        s = int(math.ceil(math.log2(norm1 / max_norm)))
    X = A / 2.0 ** s
    E = np.eye(n, dtype=np.complex128)
    term = np.eye(n, dtype=np.complex128)
    for k in range(1, order + 1):
        term = _matmul_nb(term, X) / k
        E += term
    for _ in range(s):
        E = _matmul_nb(E, E)
    return E


@njit(cache=True, nogil=True)
def _exp_propagate_nb(L, vec0, times, order, max_norm):
    n_t = times.shape[0]
    out = np.empty((n_t, vec0.shape[0]), dtype=np.complex128)
    for k in range(n_t):
        P = _expm_nb(L * times[k], order, max_norm)
        for i in range(vec0.shape[0]):
            acc = 0j
            for j in range(vec0.shape[0]):
                acc += P[i, j] * vec0[j]
            out[k, i] = acc
    return out


# ---------------------------------------------------------------- numpy path


def _rhs_np(rho, G, jumps):
    out = G @ rho + rho @ G.conj().T
    if len(jumps):
        out = out + (jumps @ rho @ np.conj(np.swapaxes(jumps, -1, -2))).sum(axis=0)
    return out


def _rk4_np(rho0, G, jumps, dt, sample_steps):
    out = np.empty((len(sample_steps), 4, 4), dtype=complex)
    rho = rho0.copy()
    step = 0
    for s, target in enumerate(sample_steps):
        while step < target:
            k1 = _rhs_np(rho, G, jumps)
            k2 = _rhs_np(rho + 0.5 * dt * k1, G, jumps)
            k3 = _rhs_np(rho + 0.5 * dt * k2, G, jumps)
            k4 = _rhs_np(rho + dt * k3, G, jumps)
            rho = rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            step += 1
        out[s] = rho
    return out


def _expm_np(A, order=TAYLOR_ORDER, max_norm=EXPM_SCALED_NORM):
    s = squaring_count(float(np.abs(A).sum(axis=0).max()))
    X = A / 2.0 ** s
    E = np.eye(A.shape[0], dtype=complex)
    term = E.copy()
    for k in range(1, order + 1):
        term = term @ X / k
        E = E + term
    for _ in range(s):
        E = E @ E
    return E


def _exp_propagate_np(L, vec0, times, order, max_norm):
    return np.stack([_expm_np(L * t, order, max_norm) @ vec0 for t in times])


# ------------------------------------------------------------------ dispatch


def rk4_lindblad(rho0, G, jumps, dt, sample_steps):
    """Integrate ``rho' = G rho + rho G^+ + sum_k L_k rho L_k^+`` with RK4.

    Returns the state after each step count listed in ``sample_steps``
    (ascending, may start with 0).
    """
    rho0 = np.ascontiguousarray(rho0, dtype=np.complex128)
    G = np.ascontiguousarray(G, dtype=np.complex128)
    jumps = np.ascontiguousarray(jumps, dtype=np.complex128).reshape(-1, 4, 4)
    sample_steps = np.ascontiguousarray(sample_steps, dtype=np.int64)
    if _ENABLED:
        return _rk4_nb(rho0, G, jumps, float(dt), sample_steps)
    return _rk4_np(rho0, G, jumps, float(dt), sample_steps)


def expm(A):
    """Matrix exponential by Taylor scaling and squaring."""
    A = np.ascontiguousarray(A, dtype=np.complex128)
    if _ENABLED:
        return _expm_nb(A, TAYLOR_ORDER, EXPM_SCALED_NORM)
    return _expm_np(A)


def exp_propagate(L, vec0, times):
    """Rows ``expm(L * t) @ vec0`` for each ``t`` in ``times``."""
    L = np.ascontiguousarray(L, dtype=np.complex128)
    vec0 = np.ascontiguousarray(vec0, dtype=np.complex128)
    times = np.ascontiguousarray(times, dtype=np.float64)
    if _ENABLED:
        return _exp_propagate_nb(L, vec0, times, TAYLOR_ORDER, EXPM_SCALED_NORM)
    return _exp_propagate_np(L, vec0, times, TAYLOR_ORDER, EXPM_SCALED_NORM)
