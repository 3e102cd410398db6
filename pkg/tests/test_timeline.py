import math

import numpy as np
import pytest

from qubit_dyn import analytics as an
from qubit_dyn import timeline as tl
from qubit_dyn.core import Environment, ModelParams, WernerFamilyInit, to_density_matrix
from qubit_dyn.errors import GridTooCoarse

PI = math.pi
FIG2A = an.AnalyticParams(0.4, PI / 2, 5.0)


def dense_counts(f, horizon, n=10 ** 6):
    """Independent oracle: interval count and final sign from a dense grid."""
    values = np.asarray(f(np.linspace(0, horizon, n + 1)))
    changes = tl.sign_change_count(values)
    return changes + 1, values[-1] > 0


def assert_well_formed(timeline, f):
    ivs = timeline.intervals
    assert ivs[0].t_start == 0.0 and ivs[-1].t_end == timeline.horizon
    for prev, cur in zip(ivs, ivs[1:]):
        assert prev.t_end == cur.t_start
        assert prev.kind is not cur.kind
    for iv in ivs:
        inner = np.linspace(iv.t_start, iv.t_end, 102)[1:-1]
        vals = np.asarray(f(inner))
        if iv.kind is tl.Kind.BRIGHT:
            assert np.all(vals > -1e-9)
        else:
            assert np.all(np.maximum(vals, 0.0) == 0.0)


def test_monotone_decay_single_bright():
    f = tl.analytic_evaluator(an.AnalyticParams(0.2, PI / 2, 0.0))
    out = tl.extract_timeline(f, 10.0)
    assert [iv.kind for iv in out.intervals] == [tl.Kind.BRIGHT]
    assert out.esd_time is None
    assert tl.revival_count(out) == 0 and tl.dark_fraction(out) == 0.0


def test_constant_negative():
    out = tl.extract_timeline(lambda t: -np.ones_like(np.asarray(t, dtype=float)), 10.0)
    assert len(out.intervals) == 1 and out.intervals[0].kind is tl.Kind.DARK
    assert out.esd_time == 0.0 and tl.dark_fraction(out) == 1.0


def test_fig2a_bright_dark_then_esd():
    f = tl.analytic_evaluator(FIG2A)
    out = tl.extract_timeline(f, 10.0, tl.default_grid_n(10.0, 5.0))
    n_oracle, last_bright = dense_counts(f, 10.0)
    assert len(out.intervals) == n_oracle
    assert not last_bright and out.intervals[-1].kind is tl.Kind.DARK
    assert out.esd_time == out.intervals[-1].t_start
    assert tl.revival_count(out) >= 2
    assert 0 < tl.dark_fraction(out) < 1
    assert_well_formed(out, f)
    for t in out.boundaries:
        assert abs(an.c_tilde_decay(FIG2A, t)) <= 1e-6
        assert an.dark_condition_decay(FIG2A, t - 1e-6) != an.dark_condition_decay(FIG2A, t + 1e-6)


def test_deterministic():
    f = tl.analytic_evaluator(FIG2A)
    assert tl.extract_timeline(f, 10.0, 5000) == tl.extract_timeline(f, 10.0, 5000)


def test_revivals_grow_with_coupling():
    counts = {}
    for v in (4.0, 10.0):
        p = an.AnalyticParams(0.4, PI / 2, v, Environment.DEPHASING)
        f = tl.analytic_evaluator(p)
        out = tl.extract_timeline(f, 5.0, tl.default_grid_n(5.0, v))
        n_oracle, _ = dense_counts(f, 5.0)
        assert len(out.intervals) == n_oracle
        counts[v] = tl.revival_count(out)
    assert counts[10.0] > counts[4.0]


def test_numeric_and_analytic_boundaries_agree():
    rho0 = to_density_matrix(WernerFamilyInit(0.4, PI / 2))
    for params, ap, horizon in (
            (ModelParams.decay(v=5.0), FIG2A, 10.0),
            (ModelParams.dephasing(v=4.0), an.AnalyticParams(0.4, PI / 2, 4.0, Environment.DEPHASING), 5.0)):
        grid_n = tl.default_grid_n(horizon, ap.v_over_rate)
        a = tl.extract_timeline(tl.analytic_evaluator(ap), horizon, grid_n)
        n = tl.extract_timeline(tl.NumericEvaluator(rho0, params), horizon, grid_n)
        assert len(a.boundaries) == len(n.boundaries)
        assert np.abs(np.subtract(a.boundaries, n.boundaries)).max() <= 1e-4


def test_numeric_evaluator_scalar_and_array():
    ev = tl.NumericEvaluator(to_density_matrix(WernerFamilyInit(0.4, 0.3)), ModelParams.decay(v=1.0))
    assert isinstance(ev(0.5), float)
    assert ev(np.array([0.0, 0.5])).shape == (2,)
    assert ev(0.0) == pytest.approx(2 / 3 * (1 - math.sqrt(0.24)))


def test_tangency_does_not_split():
    # (t - 1)^2 touches zero at t = 1 without crossing.
    out = tl.extract_timeline(lambda t: (np.asarray(t) - 1.0) ** 2, 2.0, 1000)
    assert [iv.kind for iv in out.intervals] == [tl.Kind.BRIGHT]


def test_grid_too_coarse():
    f = lambda t: np.cos(2 * PI * 1500 * np.asarray(t) + 0.3)  # noqa: E731
    with pytest.raises(GridTooCoarse):
        tl.extract_timeline(f, 1.0, 1000)


def test_grid_n_minimum():
    with pytest.raises(ValueError):
        tl.extract_timeline(lambda t: t, 1.0, 10)


def test_default_grid_n():
    assert tl.default_grid_n(10.0) == 4096
    assert tl.default_grid_n(10.0, 10.0) == 40960
    assert tl.default_grid_n(0.1) == 1000
