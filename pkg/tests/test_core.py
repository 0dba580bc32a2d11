import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from impulse_front.core import (
    BevertonHoltMap,
    Field,
    GaussianKernel,
    LinearGrowth,
    LinearMap,
    LogisticGrowth,
    ModelParams,
    PointMass,
    QuadraticGrowth,
    RickerMap,
    SkellamMap,
    clamp_pi1,
    eval_growth,
    eval_map,
    kernel_mass,
    net_growth,
    require_valid,
    validate,
)
from impulse_front.exceptions import MonotoneRangeWarning, ValidationError

MAPS = [LinearMap(0.9), RickerMap(2.0), RickerMap(0.5), BevertonHoltMap(1.0), BevertonHoltMap(3.0),
        SkellamMap(2.0, 1.5)]


def fisher(**kw):
    return ModelParams.isotropic(1.0, LogisticGrowth(1.0), LinearMap(1.0), **kw)


# --- validation -------------------------------------------------------------


def test_valid_configuration_has_no_violations():
    assert validate(ModelParams.isotropic(1.0, LogisticGrowth(1.0), LinearMap(0.9))) == []


def test_ricker_equilibrium_beyond_monotone_range_is_reported():
    p = ModelParams.isotropic(1.0, LogisticGrowth(1.0), RickerMap(2.0))
    msgs = validate(p, pi1=1.0)
    assert any(m.startswith("monotone-range") for m in msgs)
    assert validate(p, pi1=0.4) == []


def test_asymmetric_diffusion_is_reported():
    p = ModelParams([[1.0, 0.5], [0.4, 1.0]], [0.0, 0.0], LogisticGrowth(1.0), LinearMap(1.0))
    assert any(m.startswith("symmetry") for m in validate(p))


def test_indefinite_diffusion_and_bad_kernel_are_reported():
    p = ModelParams([[1.0, 2.0], [2.0, 1.0]], [0, 0], LogisticGrowth(1.0), LinearMap(1.0))
    assert any("positive-definite" in m for m in validate(p))
    p = ModelParams.isotropic(1.0, LogisticGrowth(1.0), LinearMap(1.0),
                              kernel=GaussianKernel([0.0, 0.0], np.eye(2)))
    assert any(m.startswith("kernel") for m in validate(p))


def test_zero_growth_rate_and_positive_quadratic_violate_F0():
    assert any(m.startswith("F0") for m in validate(ModelParams.isotropic(1.0, LinearGrowth(0.0), LinearMap(2.0))))
    assert any(m.startswith("F0") for m in validate(ModelParams.isotropic(1.0, QuadraticGrowth(1.0, 0.5), LinearMap(1.0))))


def test_require_valid_raises_validation_error():
    p = ModelParams([[1.0, 0.5], [0.4, 1.0]], [0.0, 0.0], LogisticGrowth(1.0), LinearMap(1.0))
    with pytest.raises(ValidationError, match="symmetry"):
        require_valid(p)


def test_negative_growth_rate_is_allowed():
    # mortality-only seasons are legitimate as long as the map compensates
    assert validate(ModelParams.isotropic(0.5, LinearGrowth(-0.1), BevertonHoltMap(math.expm1(1.1)))) == []


# --- net growth --------------------------------------------------------------


def test_net_growth_examples():
    assert net_growth(fisher()) == (1.0, False)
    stream = ModelParams.isotropic(0.5, LinearGrowth(-0.1), BevertonHoltMap(math.expm1(1.1)))
    assert net_growth(stream).rho == pytest.approx(1.0, abs=1e-14)
    bad = ModelParams.isotropic(1.0, LinearGrowth(0.2), LinearMap(0.5))
    rho, extinct = net_growth(bad)
    assert rho == pytest.approx(0.2 + math.log(0.5), abs=1e-12)
    assert round(rho, 4) == -0.4931 and extinct


# --- maps and growth laws ----------------------------------------------------


def test_map_point_values():
    assert float(eval_map(RickerMap(1.0), 1.0)) == pytest.approx(1.0, abs=1e-15)
    assert float(eval_map(BevertonHoltMap(1.0), 1.0)) == pytest.approx(1.0, abs=1e-15)
    g = SkellamMap(2.0, 1.5)
    s = 1e-7
    assert float(g(s)) / s == pytest.approx(3.0, rel=1e-6)
    assert g.gp0 == 3.0


@pytest.mark.parametrize("g", MAPS, ids=repr)
def test_map_slope_at_zero_matches_finite_difference(g):
    s = 1e-8
    assert float(g(s)) / s == pytest.approx(g.gp0, rel=1e-6)


@pytest.mark.parametrize("g", MAPS, ids=repr)
def test_g_over_s_nonincreasing_on_monotone_range(g):
    top = g.monotone_bound if math.isfinite(g.monotone_bound) else 100.0
    s = np.logspace(-6, math.log10(top), 1000)
    ratio = g(s) / s
    assert np.all(np.diff(ratio) <= 1e-12 * np.abs(ratio[1:]))
    assert np.all(np.diff(g(s)) >= -1e-12)


@pytest.mark.parametrize("g", MAPS, ids=repr)
def test_pi_plus_is_an_upper_bound_of_the_map(g):
    if not math.isfinite(g.pi_plus):
        return
    s = np.linspace(0.0, 50.0, 20001)
    assert np.max(g(s)) <= g.pi_plus * (1 + 1e-12)


def test_pi_plus_defaults():
    assert LinearMap(0.5).pi_plus == math.inf
    assert RickerMap(2.0).pi_plus == pytest.approx(math.exp(1.0) / 2.0)
    assert BevertonHoltMap(1.0).pi_plus == 2.0
    assert SkellamMap(2.0, 1.5).pi_plus == 2.0


def test_negative_density_rejected():
    with pytest.raises(ValueError):
        eval_map(LinearMap(1.0), -0.1)
    with pytest.raises(ValueError):
        eval_growth(LogisticGrowth(1.0), [0.1, -1e-3])


@pytest.mark.parametrize("f", [LogisticGrowth(1.0), QuadraticGrowth(0.7, -0.3), QuadraticGrowth(-0.4, -1.0)], ids=repr)
def test_f1_nonpositive_on_0_2(f):
    s = np.linspace(0.0, 2.0, 2001)
    assert np.all(f(s) - f.fp0 * s <= 1e-15)


@pytest.mark.parametrize(
    "f", [LinearGrowth(0.8), LinearGrowth(-0.3), LogisticGrowth(1.0), LogisticGrowth(2.5),
          QuadraticGrowth(0.7, -0.3), QuadraticGrowth(-0.4, -1.0)], ids=repr)
@pytest.mark.parametrize("u0", [0.0, 1e-6, 0.3, 1.0, 2.5])
def test_exact_flow_matches_ode_integration(f, u0):
    sol = solve_ivp(lambda t, u: f(u), (0.0, 1.0), [u0], rtol=1e-12, atol=1e-15, method="DOP853")
    assert float(f.flow(u0, 1.0)) == pytest.approx(sol.y[0, -1], rel=1e-9, abs=1e-14)


def test_clamp_pi1_warns_and_caps():
    with pytest.warns(MonotoneRangeWarning):
        assert clamp_pi1(RickerMap(2.0), 1.0) == 0.5
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert clamp_pi1(RickerMap(2.0), 0.3) == 0.3


# --- kernels -----------------------------------------------------------------


@pytest.mark.parametrize("kernel", [GaussianKernel([0.5], [[0.5]]), GaussianKernel([0.2, -0.1], [[0.5, 0.1], [0.1, 0.3]])],
                         ids=["1d", "2d"])
def test_gaussian_kernel_integrates_to_one(kernel):
    assert kernel_mass(kernel) == pytest.approx(1.0, abs=1e-10)


def test_kernel_statistical_covariance_is_twice_B():
    K = GaussianKernel([0.3], [[0.4]])
    x = np.linspace(-20, 20, 400001)
    w = K.density(x) * (x[1] - x[0])
    mean = np.sum(w * x)
    assert mean == pytest.approx(0.3, abs=1e-10)
    assert np.sum(w * (x - mean) ** 2) == pytest.approx(0.8, rel=1e-9)
    np.testing.assert_allclose(K.covariance, [[0.8]])


def test_point_mass_is_accepted():
    assert validate(fisher(kernel=PointMass())) == []


# --- parameters and fields ---------------------------------------------------


def test_model_params_coerce_and_replace():
    p = fisher(q=0.5)
    assert p.n == 1 and p.A.shape == (1, 1) and p.q.tolist() == [0.5]
    p2 = p.replace(q=np.array([1.0]))
    assert p2.q.tolist() == [1.0] and p.q.tolist() == [0.5]


def test_field_rejects_negative_values_and_bad_spacing():
    with pytest.raises(ValueError):
        Field(np.array([0.0, -1.0]), (0.0,), (0.1,))
    with pytest.raises(ValueError):
        Field(np.zeros(3), (0.0,), (0.0,))


def test_field_grid_helpers():
    f = Field.on_interval(0.0, 1.0, 0.25, lambda x: x)
    np.testing.assert_allclose(f.axes()[0], [0, 0.25, 0.5, 0.75, 1.0])
    assert f.mass() == pytest.approx(0.25 * 2.5)
    g = Field(np.ones((3, 4)), (0.0, 1.0), (0.5, 0.25))
    assert g.points().shape == (3, 4, 2) and g.cell_volume == 0.125
    assert g.same_grid(g.with_values(np.zeros((3, 4))))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(0.0, 3.0))
def test_beverton_holt_properties(lam, s):
    g = BevertonHoltMap(lam)
    assert 0.0 <= float(g(s)) <= g.pi_plus
    assert float(g(s)) <= g.gp0 * s + 1e-15
