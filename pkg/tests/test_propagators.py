import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from qubit_dyn.core import (EE, GG, ModelParams, WernerFamilyInit, ket, off_x_residual,
                            projector, to_density_matrix)
from qubit_dyn.errors import NumericalBreakdown, PositivityViolation, StepTooLarge
from qubit_dyn.liouvillian import rhs
from qubit_dyn.propagators import (IntegratorConfig, Method, StateTrajectory, check_trajectory,
                                   dt_max, integrate_exp, integrate_rk, propagate_to)

FIG2A = ModelParams.decay(v=5.0)
WERNER = to_density_matrix(WernerFamilyInit(0.4, math.pi / 2))


def test_dt_max_rule():
    assert dt_max(ModelParams.decay(v=0.0)) == pytest.approx(0.01)
    assert dt_max(ModelParams.decay(v=5.0)) == pytest.approx(0.002)
    assert dt_max(ModelParams.dephasing(v=10.0)) == pytest.approx(0.001)
    assert dt_max(ModelParams.decay(v=1.0, gamma=2.0)) == pytest.approx(0.005)


def test_step_too_large():
    with pytest.raises(StepTooLarge):
        integrate_rk(WERNER, FIG2A, IntegratorConfig(0.01, 1.0))


def test_grid_hits_t_end_exactly():
    h, steps = IntegratorConfig(0.003, 1.0, sample_every=7).grid()
    assert steps[-1] * h == pytest.approx(1.0, abs=1e-15)
    assert h <= 0.003
    assert np.all(np.diff(steps) > 0)
    h0, steps0 = IntegratorConfig(0.01, 0.0).grid()
    assert list(steps0) == [0]


def test_ground_state_is_constant(backend):
    rho0 = projector(ket(0, 0, 0, 1))
    traj = integrate_rk(rho0, FIG2A, IntegratorConfig(0.002, 1.0, sample_every=50))
    assert np.abs(traj.states - rho0).max() == 0


def test_excited_population_closed_form(backend):
    cfg = IntegratorConfig.for_params(FIG2A, 5.0, sample_every=25)
    for traj in (integrate_rk(WERNER, FIG2A, cfg), integrate_exp(WERNER, FIG2A, cfg)):
        np.testing.assert_allclose(traj.states[:, EE, EE].real, 0.4 / 3 * np.exp(-2 * traj.times),
                                   atol=1e-10, rtol=0)


def test_exp_uncoupled_excited_decay(backend):
    p = ModelParams.decay(v=0.0)
    traj = integrate_exp(projector(ket(1, 0, 0, 0)), p, IntegratorConfig(0.1, 3.0))
    np.testing.assert_allclose(traj.states[:, EE, EE].real, np.exp(-2 * traj.times), atol=1e-13)
    np.testing.assert_array_equal(traj.states[0], projector(ket(1, 0, 0, 0)))


def test_semigroup(backend):
    for params in (FIG2A, ModelParams.dephasing(v=4.0)):
        half = propagate_to(WERNER, params, 1.3)
        assert np.abs(propagate_to(half, params, 1.3) - propagate_to(WERNER, params, 2.6)).max() <= 1e-10


def test_rk_vs_exp_fig2a(backend):
    for chi in (0.0, math.pi / 2):
        for v in (0.0, 5.0):
            p = ModelParams.decay(v=v)
            rho0 = to_density_matrix(WernerFamilyInit(0.4, chi))
            cfg = IntegratorConfig.for_params(p, 5.0, sample_every=10)
            rk, ex = integrate_rk(rho0, p, cfg), integrate_exp(rho0, p, cfg)
            np.testing.assert_array_equal(rk.times, ex.times)
            assert np.abs(rk.states - ex.states).max() <= 1e-8


def test_exp_vs_independent_ode_solver():
    # scipy's adaptive DOP853 on the literal right-hand side: shares no code
    # with either propagator beyond the rhs definition.
    for params in (FIG2A, ModelParams.dephasing(v=4.0, Gamma=1.0, Gamma_B=0.5)):
        f = lambda t, y: rhs(y.reshape(4, 4), params).ravel()
        times = np.linspace(0, 3, 7)
        sol = solve_ivp(f, (0, 3), WERNER.ravel(), method="DOP853", t_eval=times,
                        rtol=1e-12, atol=1e-13)
        ex = integrate_exp(WERNER, params, IntegratorConfig(0.5, 3.0))
        assert np.abs(sol.y.T.reshape(-1, 4, 4) - ex.states).max() <= 1e-10


@pytest.mark.parametrize("method", list(Method))
def test_structural_invariants(backend, method):
    for params in (FIG2A, ModelParams.dephasing(v=10.0), ModelParams.decay(v=2.0, gamma=1.0, gamma_B=0.3)):
        cfg = IntegratorConfig.for_params(params, 3.0, method, sample_every=20)
        traj = integrate_rk(WERNER, params, cfg) if method is Method.RK4_FIXED else \
            integrate_exp(WERNER, params, cfg)
        d = traj.defects()
        assert d["trace"] <= (1e-10 if method is Method.RK4_FIXED else 1e-12)
        assert d["hermiticity"] <= 1e-10
        assert d["min_eigenvalue"] >= -1e-8
        assert off_x_residual(traj.states).max() <= 1e-10


def test_dephasing_populations(backend):
    rho0 = to_density_matrix(WernerFamilyInit(0.4, 1.0))
    p0 = ModelParams.dephasing(v=0.0)
    traj = integrate_rk(rho0, p0, IntegratorConfig.for_params(p0, 5.0, sample_every=10))
    diag = np.einsum("kii->ki", traj.states).real
    assert np.abs(diag - diag[0]).max() <= 1e-10
    p = ModelParams.dephasing(v=4.0)
    traj = integrate_rk(rho0, p, IntegratorConfig.for_params(p, 5.0, sample_every=10))
    diag = np.einsum("kii->ki", traj.states).real
    assert np.abs(diag[:, [EE, GG]] - diag[0, [EE, GG]]).max() <= 1e-10
    assert np.ptp(diag[:, 1]) > 1e-3  # the flip-flop term moves rho22, rho33


def test_positivity_violation_raised():
    states = np.stack([np.eye(4) / 4, np.diag([0.5, 0.5, 0.1, -0.1])]).astype(complex)
    with pytest.raises(PositivityViolation):
        check_trajectory(StateTrajectory(np.array([0.0, 1.0]), states))


def test_non_finite_state_raised():
    states = np.stack([np.eye(4) / 4, np.full((4, 4), np.nan)]).astype(complex)
    with pytest.raises(NumericalBreakdown):
        check_trajectory(StateTrajectory(np.array([0.0, 1.0]), states))
