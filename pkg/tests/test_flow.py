import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from secondkind import flow
from secondkind.errors import EmptySample, IntegrationUnstable, InvalidInput, Undefined
from secondkind.flow import FlowConfig, FlowState, integrate, monotone_quantities, ode_rhs, preservation_experiment
from secondkind.spectra import lambda_pm

unit_triples = st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3).map(sorted)


@pytest.mark.parametrize("abc,expected", [
    ((1, 1, 1), (2, 2, 2)),
    ((0, 0, 1), (0, 0, 1)),
    ((-1, 0, 1), (1, -1, 1)),
])
def test_ode_rhs(abc, expected):
    assert ode_rhs(abc) == expected
    assert ode_rhs(FlowState(0.0, *abc)) == expected


@given(unit_triples)
def test_scalar_derivative_is_ricci_norm(abc):
    # dS/dt = 2 (a' + b' + c') and |Ric|^2 = (a+b)^2 + (a+c)^2 + (b+c)^2
    a, b, c = abc
    ric2 = (a + b) ** 2 + (a + c) ** 2 + (b + c) ** 2
    assert math.isclose(2 * sum(ode_rhs(abc)), ric2, abs_tol=1e-14)


def test_round_sphere_closed_form():
    tr = integrate((1, 1, 1), FlowConfig(h=1e-4, t_max=0.45))
    assert tr.halt_reason == "t_max" and tr.t[-1] == pytest.approx(0.45)
    exact = 1 / (1 - 2 * tr.t)
    assert np.abs(tr.abc - exact[:, None]).max() < 1e-6


def test_cylinder_closed_form():
    # a = b = 0 stays fixed and c' = c^2
    tr = integrate((0, 0, 1), FlowConfig(h=1e-4, t_max=0.9))
    assert not np.any(tr.abc[:, :2])
    np.testing.assert_allclose(tr.abc[:, 2], 1 / (1 - tr.t), rtol=1e-8)


def test_cylinder_a_over_S_monotone():
    tr = integrate((0, 0, 1), FlowConfig(h=1e-4, t_max=0.9))
    assert tr.worst_decrease(tr.columns()["a_over_S"]) >= -1e-8
    assert flow.trace_is_monotone(tr)


def test_fixed_point():
    tr = integrate((0, 0, 0), FlowConfig(t_max=1.0))
    assert tr.halt_reason == "t_max"
    assert not np.any(tr.abc)
    assert tr.t[-1] == pytest.approx(1.0)


def test_blowup_halts_inside_cap():
    cfg = FlowConfig(h=1e-3, t_max=10.0, blowup_cap=1e6)
    tr = integrate((1, 1, 1), cfg)
    assert tr.halt_reason == "blowup"
    assert np.abs(tr.abc).max() <= cfg.blowup_cap
    # exact blowup time is 1/2; RK4 stays finite for a step or two beyond it
    assert 0.45 < tr.t[-1] <= 0.5 + 2 * cfg.h


def test_sampling_keeps_final_state():
    full = integrate((0.1, 0.2, 0.3), FlowConfig(h=1e-2, t_max=1.0))
    thin = integrate((0.1, 0.2, 0.3), FlowConfig(h=1e-2, t_max=1.0, sample_every=7))
    np.testing.assert_array_equal(thin.abc[-1], full.abc[-1])
    np.testing.assert_array_equal(thin.abc[1], full.abc[7])
    assert thin.t[-1] == full.t[-1] == pytest.approx(1.0)


def test_ordering_loss_raises():
    with pytest.raises(IntegrationUnstable):
        integrate((-2.5, -1.8, -0.6), FlowConfig(h=0.6, t_max=3))


def test_bad_inputs():
    with pytest.raises(InvalidInput):
        integrate((1, 0, 2))
    for kwargs in ({"h": 0}, {"h": -1e-3}, {"t_max": -1}, {"blowup_cap": 0}, {"sample_every": 0}):
        with pytest.raises(InvalidInput):
            FlowConfig(**kwargs)


def test_quantities_sphere():
    q = monotone_quantities((1, 1, 1))
    assert q.a_over_S == pytest.approx(1 / 6) and q.lm_over_S == pytest.approx(1 / 6)


def test_quantities_cylinder():
    q = monotone_quantities((0, 0, 1))
    assert q.a_over_S == 0 and q.S == 2
    assert q.lm_over_S == pytest.approx(-1 / 6) and q.neg_lp_over_S == pytest.approx(-1 / 2)


def test_quantities_example_four():
    assert monotone_quantities((-1, 1, 1)).lm_over_S == pytest.approx(-1 / 2)


def test_quantities_undefined():
    with pytest.raises(Undefined):
        monotone_quantities((-1, 0, 1))


@given(unit_triples)
def test_lambda_over_S_identity(abc):
    assume(sum(abc) > 1e-3)
    q = monotone_quantities(abc)
    lm, lp = lambda_pm(abc)
    assert math.isclose(q.lm_over_S, lm / q.S, abs_tol=1e-9)
    assert math.isclose(q.lm_over_S, q.lm_over_S_identity, abs_tol=1e-6)
    assert math.isclose(-q.neg_lp_over_S, q.lp_over_S_identity, abs_tol=1e-6)


def test_samples_view():
    tr = integrate((-0.5, 0.1, 0.2), FlowConfig(h=0.1, t_max=0.3))
    (state, q), *_ = tr.samples
    assert state.abc == (-0.5, 0.1, 0.2) and q is None


def test_a_over_S_derivative_closed_form():
    # d/dt (a/S) = (a' S - a S') / S^2, checked against central differences of the trace
    tr = integrate((-0.2, 0.3, 0.8), FlowConfig(h=1e-4, t_max=0.2))
    a, b, c = tr.abc.T
    S = 2 * (a + b + c)
    da = a * a + b * c
    dS = 2 * (a * a + b * b + c * c + a * b + a * c + b * c)
    exact = (da * S - a * dS) / S**2
    fd = (tr.columns()["a_over_S"][2:] - tr.columns()["a_over_S"][:-2]) / (2e-4)
    np.testing.assert_allclose(fd, exact[1:-1], atol=1e-7)
    assert exact.min() >= 0


@given(unit_triples)
def test_monotone_quantities_along_trace(abc):
    assume(sum(abc) > 0.05)
    tr = integrate(abc, FlowConfig(h=1e-3, t_max=1e3))
    assert tr.halt_reason == "blowup"
    assert tr.worst_decrease(tr.quantity_matrix()) >= -1e-8


def test_preservation_alpha_five_is_constant():
    rep = preservation_experiment(5, 20, FlowConfig(t_max=1e3), seed=3)
    assert rep.passed and abs(rep.worst_drop) < 1e-12


def test_preservation_ten_thirds_seed_42():
    rep = preservation_experiment(10 / 3, 200, FlowConfig(h=1e-3, t_max=1e3), seed=42)
    assert rep.passed and rep.n_samples == 200


def test_alpha_one_boundary_trace():
    tr = integrate((0.0, 0.0, 3.0), FlowConfig(h=1e-4, t_max=0.3))
    series = tr.functional_over_S(1)
    assert series[0] == pytest.approx(-1 / 6)
    assert tr.worst_decrease(series) >= -1e-12


def test_preservation_is_deterministic():
    cfg = FlowConfig(t_max=1e3)
    assert preservation_experiment(2, 15, cfg, seed=9) == preservation_experiment(2, 15, cfg, seed=9)


def test_preservation_h_kind_and_errors():
    assert preservation_experiment(2, 10, FlowConfig(t_max=1e3), seed=1, kind="h").passed
    with pytest.raises(InvalidInput):
        preservation_experiment(4, 10, kind="h")
    with pytest.raises(InvalidInput):
        preservation_experiment(2, 10, kind="g")
    with pytest.raises(EmptySample):
        preservation_experiment(1, 1, FlowConfig(), seed=0, max_attempts=0)


def test_ds_dt_second_order():
    rep = flow.ds_dt_convergence((0.1, 0.3, 0.5), h=1e-3, t_end=0.1)
    assert rep.err_half < rep.err_h
    assert round(rep.order, 2) >= 2.0
