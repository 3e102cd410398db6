"""Self-check suite run by ``qubit-dyn verify``.

Every check reports a measured residual against a fixed tolerance. The
quick level covers construction, generators and concurrence; the full
level adds the analytic-vs-numeric cross-validation grid, RK4 order and
timeline consistency.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _accel, analytics, liouvillian, timeline
from .concurrence import concurrence_general, concurrence_x, x_c_tilde
from .core import (Environment, ModelParams, WernerFamilyInit, XState, ket, off_x_residual,
                   project_to_x_form, projector, state_defects, to_density_matrix)
from .propagators import (IntegratorConfig, Method, dt_max, integrate_exp, integrate_rk,
                          propagate_to)

PI = math.pi


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<48s} residual={self.residual:.3e}  tol={self.tol:.1e}"


def random_density_matrix(rng, n=4):
    G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_xstate(rng) -> XState:
    a, b, c, d = rng.random(4)
    z = math.sqrt(b * c) * rng.random() * np.exp(1j * rng.uniform(0, 2 * PI))
    return XState(a, b, c, d, complex(z), 1.0 / (a + b + c + d))


def family_params(model: Environment, v: float, rate: float = 1.0, omega0: float = 0.0):
    if model is Environment.DECAY:
        return ModelParams.decay(v=v, gamma=rate, omega0=omega0)
    return ModelParams.dephasing(v=v, Gamma=rate, omega0=omega0)


def cross_path_error(a, chi, v, model, method, t_end=5.0, sample_every=1):
    """Max |c_tilde analytic - c_tilde numeric| over a trajectory, plus the trajectory."""
    params = family_params(model, v)
    rho0 = to_density_matrix(WernerFamilyInit(a, chi))
    cfg = IntegratorConfig.for_params(params, t_end, method, sample_every)
    traj = integrate_rk(rho0, params, cfg) if method is Method.RK4_FIXED else \
        integrate_exp(rho0, params, cfg)
    ap = analytics.AnalyticParams(a, chi, v, model)
    err = float(np.abs(x_c_tilde(traj.states) - analytics.c_tilde(ap, traj.times)).max())
    return err, traj


# ------------------------------------------------------------------ quick


def _construction_checks(rng):
    worst = 0.0
    for a, chi in itertools.product((0.0, 0.2, 0.4, 1.0), (0.0, PI / 4, PI / 2)):
        rho = to_density_matrix(WernerFamilyInit(a, chi))
        x, res = project_to_x_form(rho)
        worst = max(worst, res, np.abs(to_density_matrix(x) - rho).max())
    yield Check("X-state round trip", worst, 1e-14)
    spec_err = 0.0
    for a in np.linspace(0, 1, 11):
        ev = np.linalg.eigvalsh(to_density_matrix(WernerFamilyInit(a, 0.7)))
        spec_err = max(spec_err, np.abs(ev - np.sort([a / 3, (1 - a) / 3, 2 / 3, 0])).max())
    yield Check("Werner-family spectrum", spec_err, 1e-12)


def _generator_checks(rng):
    models = (ModelParams.decay(v=1.3, gamma=0.8, gamma_B=1.1, omega0=0.6),
              ModelParams.dephasing(v=2.1, Gamma=0.7, Gamma_B=0.4, omega0=0.6))
    tr = herm = cons = 0.0
    for params in models:
        L = liouvillian.build_superoperator(params)
        for _ in range(50):
            rho = random_density_matrix(rng)
            d = liouvillian.rhs(rho, params)
            tr = max(tr, abs(np.trace(d)))
            herm = max(herm, np.abs(d - d.conj().T).max())
            cons = max(cons, np.abs(L.apply(rho) - d).max())
    yield Check("rhs trace annihilation", tr, 1e-13)
    yield Check("rhs Hermiticity preservation", herm, 1e-13)
    yield Check("superoperator matches rhs", cons, 1e-12)

    closure = 0.0
    for params in models:
        for _ in range(20):
            closure = max(closure, off_x_residual(liouvillian.rhs(
                to_density_matrix(random_xstate(rng)), params)))
    yield Check("X-form closure of rhs", float(closure), 1e-13)

    # Coherence decay rate under dephasing must be Gamma_A + Gamma_B.
    p = ModelParams.dephasing(v=0.0, Gamma=0.7, Gamma_B=0.4)
    rho = to_density_matrix(WernerFamilyInit(0.3, 1.1))
    d = liouvillian.dephasing_rhs(rho, p)
    rate = -(d[1, 2] / rho[1, 2])
    yield Check("dephasing coherence decay = Gamma_A+Gamma_B",
                abs(rate - (p.Gamma_A + p.Gamma_B)), 1e-13)
    pops = np.abs(np.diag(d)).max()
    yield Check("dephasing leaves populations fixed", float(pops), 1e-15)

    p = ModelParams.decay(v=3.0, gamma=1.0)
    d = liouvillian.decay_rhs(projector(ket(1, 0, 0, 0)), p)
    want = np.diag([-2.0, 1.0, 1.0, 0.0])
    yield Check("decay population rates from |ee>", float(np.abs(d - want).max()), 1e-14)


def _concurrence_checks(rng, n):
    worst = 0.0
    for _ in range(n):
        x = random_xstate(rng)
        worst = max(worst, abs(concurrence_general(to_density_matrix(x)).c - concurrence_x(x).c))
    yield Check(f"general vs X concurrence ({n} states)", worst, 1e-10)
    bell = concurrence_general(projector(ket(0, 1, 1, 0))).c
    product = concurrence_general(projector(ket(0, 0, 0, 1))).c
    yield Check("Bell state -> 1, product -> 0", abs(bell - 1.0) + abs(product), 0.0)


def _propagator_checks():
    p = ModelParams.decay(v=5.0)
    rho0 = to_density_matrix(WernerFamilyInit(0.4, PI / 2))
    r1 = propagate_to(propagate_to(rho0, p, 0.7), p, 0.7)
    r2 = propagate_to(rho0, p, 1.4)
    yield Check("exp propagator semigroup", float(np.abs(r1 - r2).max()), 1e-10)
    for model, v in ((Environment.DECAY, 5.0), (Environment.DEPHASING, 4.0)):
        err, _ = cross_path_error(0.4, PI / 2, v, model, Method.EXP_ORACLE, sample_every=5)
        yield Check(f"analytic vs exp ({model.value}, v={v:g})", err, 1e-8)
    death = timeline.extract_timeline(
        timeline.analytic_evaluator(analytics.AnalyticParams(0.5, 0.0, 0.0, Environment.DEPHASING)),
        2.0).esd_time
    yield Check("dephasing death time a=0.5", abs(death - analytics.dephasing_death_time(0.5)), 1e-6)


# ------------------------------------------------------------------- full


def cross_validation_grid():
    for a, chi in itertools.product((0.0, 0.2, 0.4, 1.0), (0.0, PI / 4, PI / 2)):
        for v in (0.0, 5.0):
            yield a, chi, v, Environment.DECAY
        for v in (0.0, 0.3, 1.0, 4.0, 10.0):
            yield a, chi, v, Environment.DEPHASING


def _cross_validation_checks():
    worst = {m: 0.0 for m in Method}
    defects = np.zeros(4)
    for a, chi, v, model in cross_validation_grid():
        for method in Method:
            err, traj = cross_path_error(a, chi, v, model, method)
            worst[method] = max(worst[method], err)
            tr, herm, mineig = state_defects(traj.states)
            defects = np.maximum(defects, [tr.max(), herm.max(), -mineig.min(),
                                           off_x_residual(traj.states).max()])
    yield Check("analytic vs RK4 over grid", worst[Method.RK4_FIXED], 1e-8)
    yield Check("analytic vs exp over grid", worst[Method.EXP_ORACLE], 1e-8)
    yield Check("trajectory trace drift", defects[0], 1e-10)
    yield Check("trajectory Hermiticity drift", defects[1], 1e-10)
    yield Check("trajectory negativity", defects[2], 1e-8)
    yield Check("trajectory off-X residual", defects[3], 1e-10)


def rk4_order(a=0.4, chi=PI / 2, v=5.0, t_end=5.0, refinements=(1, 2), dt0=None):
    """Convergence exponent of RK4 against the exponential oracle.

    ``dt0`` is the base step (default ``dt_max``). It goes straight to the
    kernel, so a base step above ``dt_max`` is allowed here: the measurement
    needs truncation error well clear of roundoff, which the step policy does
    not guarantee for curves that barely move on the ``1/v`` scale.
    """
    params = ModelParams.decay(v=v)
    rho0 = to_density_matrix(WernerFamilyInit(a, chi))
    G, jumps = liouvillian.lindblad_generator(params)
    dt0 = dt_max(params) if dt0 is None else dt0
    errs = []
    for r in refinements:
        cfg = IntegratorConfig(dt0 / r, t_end, sample_every=r)
        h, steps = cfg.grid()
        rk = _accel.rk4_lindblad(rho0, G, jumps, h, steps)
        ex = integrate_exp(rho0, params, cfg)
        errs.append(float(np.abs(rk - ex.states).max()))
    ratios = [math.log2(e0 / e1) / math.log2(r1 / r0)
              for (e0, r0), (e1, r1) in zip(zip(errs, refinements), zip(errs[1:], refinements[1:]))]
    return ratios, errs


def _full_checks():
    yield from _cross_validation_checks()
    ratios, _ = rk4_order()
    yield Check("RK4 convergence exponent |p-4|", max(abs(r - 4.0) for r in ratios), 0.3)

    p0, p1 = ModelParams.decay(v=5.0), ModelParams.decay(v=5.0, omega0=100.0)
    rho0 = to_density_matrix(WernerFamilyInit(0.4, PI / 2))
    cfg = IntegratorConfig.for_params(p1, 2.0, Method.EXP_ORACLE, sample_every=10)
    c0 = x_c_tilde(integrate_exp(rho0, p0, cfg).states)
    c1 = x_c_tilde(integrate_exp(rho0, p1, cfg).states)
    yield Check("omega0 drops out of concurrence", float(np.abs(c0 - c1).max()), 1e-10)

    spread = 0.0
    t = np.linspace(0, 5, 501)
    for model in Environment:
        curves = [analytics.c_tilde(analytics.AnalyticParams(0.4, chi, 0.0, model), t)
                  for chi in (0.0, PI / 6, PI / 4, PI / 2)]
        spread = max(spread, np.ptp(np.array(curves), axis=0).max())
    yield Check("chi-independence at v=0", float(spread), 1e-12)

    ap = analytics.AnalyticParams(0.4, PI / 2, 5.0)
    grid_n = timeline.default_grid_n(10.0, 5.0)
    tl_a = timeline.extract_timeline(timeline.analytic_evaluator(ap), 10.0, grid_n)
    tl_n = timeline.extract_timeline(timeline.NumericEvaluator(rho0, p0), 10.0, grid_n)
    if len(tl_a.boundaries) == len(tl_n.boundaries):
        gap = float(np.abs(np.subtract(tl_a.boundaries, tl_n.boundaries)).max())
    else:
        gap = math.inf
    yield Check("timeline analytic vs numeric boundaries", gap, 1e-4)
    resid = max(abs(analytics.c_tilde_decay(ap, t)) for t in tl_a.boundaries)
    yield Check("timeline boundary residual", resid, 1e-6)


def run(level: str = "quick", seed: int = 1234) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    checks += _construction_checks(rng)
    checks += _generator_checks(rng)
    checks += _concurrence_checks(rng, 200 if level == "quick" else 1000)
    checks += _propagator_checks()
    if level == "full":
        checks += _full_checks()
    return checks
