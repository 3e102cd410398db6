import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qubit_dyn.concurrence import (concurrence_general, concurrence_x, spin_flip,
                                   trace_from_states, wootters_lambdas)
from qubit_dyn.core import WernerFamilyInit, XState, ket, projector, to_density_matrix
from qubit_dyn.errors import NumericalBreakdown
from qubit_dyn.verification import random_density_matrix, random_xstate

BELL = projector(ket(0, 1, 1, 0))


def literal_wootters(rho):
    """Eigenvalues of the non-Hermitian rho * rho_tilde, as first written down."""
    lam = np.sort(np.abs(np.linalg.eigvals(rho @ spin_flip(rho)).real))[::-1]
    s = np.sqrt(lam)
    return max(0.0, s[0] - s[1] - s[2] - s[3])


def test_spin_flip_examples():
    np.testing.assert_allclose(spin_flip(BELL), BELL, atol=1e-15)
    np.testing.assert_allclose(spin_flip(projector(ket(1, 0, 0, 0))), projector(ket(0, 0, 0, 1)),
                               atol=1e-15)


def test_spin_flip_involution(rng):
    for _ in range(20):
        rho = random_density_matrix(rng)
        np.testing.assert_allclose(spin_flip(spin_flip(rho)), rho, atol=1e-15)


def test_bell_and_product_exact():
    assert concurrence_general(BELL).c == 1.0
    assert concurrence_general(projector(ket(0, 0, 0, 1))).c == 0.0
    assert concurrence_general(np.eye(4) / 4).c == 0.0


def test_werner_t0_value():
    # (2/3)(1 - sqrt(0.24)), evaluated to 30 digits with mpmath
    rho = to_density_matrix(WernerFamilyInit(0.4, 0.0))
    assert concurrence_general(rho).c == pytest.approx(0.340068034295576253573695456706, abs=1e-14)
    assert concurrence_x(WernerFamilyInit(0.4).to_xstate()).c == pytest.approx(
        0.340068034295576253573695456706, abs=1e-15)


def test_x_fast_path_examples():
    for chi in (0.0, 1.0, math.pi / 2):
        assert concurrence_x(WernerFamilyInit(0.0, chi).to_xstate()).c_tilde == pytest.approx(2 / 3)
    sep = concurrence_x(XState(0.25, 0.25, 0.25, 0.25, 0j))
    assert sep.c_tilde < 0 and sep.c == 0


def test_path_equivalence_random(rng):
    worst = max(abs(concurrence_general(to_density_matrix(x)).c - concurrence_x(x).c)
                for x in (random_xstate(rng) for _ in range(1000)))
    assert worst <= 1e-10


def test_general_matches_literal_form(rng):
    for _ in range(200):
        rho = random_density_matrix(rng)
        assert concurrence_general(rho).c == pytest.approx(literal_wootters(rho), abs=1e-7)


def test_lambdas_descending_nonnegative(rng):
    lam = wootters_lambdas(random_density_matrix(rng))
    assert np.all(lam >= 0) and np.all(np.diff(lam) <= 0)


def test_breakdown_on_negative_state():
    with pytest.raises(NumericalBreakdown):
        concurrence_general(np.diag([0.6, 0.5, 0.0, -0.1]).astype(complex))


phases = st.floats(0, 2 * math.pi)


@given(st.floats(0, 1), phases, phases, phases)
@settings(max_examples=100, deadline=None)
def test_local_phase_invariance(a, chi, th1, th2):
    rho = to_density_matrix(WernerFamilyInit(a, chi))
    U = np.kron(np.diag([np.exp(1j * th1), 1]), np.diag([np.exp(1j * th2), 1]))
    c0 = concurrence_general(rho).c
    assert abs(concurrence_general(U @ rho @ U.conj().T).c - c0) <= 1e-12


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=50, deadline=None)
def test_range_and_clamp(seed):
    rng = np.random.default_rng(seed)
    cv = concurrence_general(random_density_matrix(rng))
    assert 0 <= cv.c <= 1
    assert cv.c_tilde <= cv.c
    x = concurrence_x(random_xstate(rng))
    assert x.c == max(0.0, x.c_tilde)


def test_monotone_in_mixedness():
    c = {a: concurrence_general(to_density_matrix(WernerFamilyInit(a))).c for a in (0.1, 0.3, 0.5)}
    assert c[0.5] <= c[0.3] <= c[0.1]


def test_trace_paths_agree(rng):
    states = np.stack([to_density_matrix(random_xstate(rng)) for _ in range(30)])
    t = np.arange(30.0)
    x = trace_from_states(t, states, "numeric")
    g = trace_from_states(t, states, "numeric", path="general")
    assert np.abs(x.c - g.c).max() <= 1e-10
    assert x.source == "numeric"
    with pytest.raises(ValueError):
        trace_from_states(t, states, "numeric", path="bogus")
