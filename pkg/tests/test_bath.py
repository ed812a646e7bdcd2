import math

from hypothesis import given, strategies as st
import numpy as np
import pytest

from brownpair import (
    BathSpec,
    DomainError,
    QuadratureConfig,
    build_kernel_table,
    coupling_attenuation,
    derive_params,
    kernel_closed_form_zero_t,
    safe_t_min,
    spectral_weight,
    thermal_kernel,
)

from oracles import kernel_quad, kernel_zero_t, omega_coth

positive = st.floats(1e-3, 1e3)


def bath(**kw):
    base = dict(eta=0.1, mass_M=1.0, omega_cutoff=5.0, beta=math.inf, k0L=1.0)
    base.update(kw)
    return BathSpec(**base)


@pytest.mark.parametrize("k0L, expected", [(0.0, 1.0), (math.log(2), 0.5), (20.0, 2.061153622438558e-9)])
def test_coupling_attenuation(k0L, expected):
    assert coupling_attenuation(k0L) == pytest.approx(expected, rel=1e-12)


def test_coupling_attenuation_rejects_negative():
    with pytest.raises(DomainError):
        coupling_attenuation(-0.1)


@pytest.mark.parametrize(
    "kw",
    [{"eta": 0.0}, {"mass_M": -1.0}, {"omega_cutoff": math.inf}, {"beta": 0.0}, {"k0L": -1.0}, {"eta": math.nan}],
)
def test_bath_spec_validation(kw):
    with pytest.raises(DomainError):
        bath(**kw)


def test_derive_params_short_distance():
    p = derive_params(BathSpec(eta=1.0, mass_M=1.0, omega_cutoff=math.pi / 4, beta=1.0, k0L=0.0))
    assert p.gamma_plus == pytest.approx(2.0)
    assert p.gamma_minus == 0.0
    assert p.omega0_sq == pytest.approx(1.0)
    assert p.omega_t_sq == pytest.approx(1.0)


def test_derive_params_long_distance_and_rate():
    p = derive_params(bath(eta=2.0, mass_M=4.0, k0L=50.0))
    assert p.gamma == 0.5
    assert p.gamma_plus == pytest.approx(0.5, rel=1e-15)
    assert p.gamma_minus == pytest.approx(0.5, rel=1e-15)
    assert p.omega_t_sq < 1e-20


@given(eta=positive, mass=positive, cutoff=positive, k0L=st.floats(0, 50))
def test_derived_invariants(eta, mass, cutoff, k0L):
    p = derive_params(BathSpec(eta, mass, cutoff, 1.0, k0L))
    assert 0 < p.D <= 1
    assert p.gamma_plus + p.gamma_minus == pytest.approx(2 * p.gamma)
    assert p.omega_t_sq <= p.omega0_sq
    assert min(p.gamma_plus, p.gamma_minus, p.omega_t_sq) >= 0
    assert safe_t_min(BathSpec(eta, mass, cutoff, 1.0, k0L)) > 0


def test_spectral_weight_examples():
    assert spectral_weight(0.0, bath(beta=2.0)) == 1.0
    assert spectral_weight(1.0, bath()) == 1.0
    # 2/beta + beta*omega^2/6 from the coth series at beta*omega/2 = 5e-4
    assert spectral_weight(0.1, bath(beta=0.01)) == pytest.approx(200.0 + 0.01 * 0.01 / 6, rel=1e-14)


def test_spectral_weight_matches_oracle():
    w = np.linspace(0, 5, 101)
    for beta in (1e-3, 0.5, 3.0, 100.0):
        assert np.allclose(spectral_weight(w, bath(beta=beta)), omega_coth(w, beta), rtol=1e-13)


@pytest.mark.parametrize("omega", [-0.1, 5.1])
def test_spectral_weight_domain(omega):
    with pytest.raises(DomainError):
        spectral_weight(omega, bath())


@given(omega=st.floats(1e-6, 5.0), b1=st.floats(1e-3, 1e3), b2=st.floats(1e-3, 1e3))
def test_spectral_weight_nonincreasing_in_beta(omega, b1, b2):
    lo, hi = sorted((b1, b2))
    assert spectral_weight(omega, bath(beta=hi)) <= spectral_weight(omega, bath(beta=lo)) * (1 + 1e-15)


def test_kernel_at_origin_zero_temperature():
    assert thermal_kernel(0.0, bath(omega_cutoff=1.0)) == pytest.approx(0.5, rel=1e-14)


@given(tau=st.floats(-50, 50), beta=st.sampled_from([math.inf, 0.1, 2.0, 30.0]))
def test_kernel_parity_exact(tau, beta):
    spec = bath(beta=beta)
    assert thermal_kernel(tau, spec) == thermal_kernel(-tau, spec)


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
def test_kernel_zero_temperature_closed_form(x):
    spec = bath()
    tau = x / spec.omega_cutoff
    exact = kernel_zero_t(tau, spec.omega_cutoff)
    assert thermal_kernel(tau, spec) == pytest.approx(exact, rel=1e-8)
    assert kernel_closed_form_zero_t(tau, spec.omega_cutoff) == pytest.approx(exact, rel=1e-12)


def test_closed_form_continuous_across_series_switch():
    x = np.array([0.1 * (1 - 1e-14), 0.1 * (1 + 1e-14)])
    v = kernel_closed_form_zero_t(x, 1.0)
    assert v[0] == pytest.approx(v[1], rel=1e-12)
    assert v[0] == pytest.approx(kernel_zero_t(0.1, 1.0), rel=1e-12)


def test_kernel_high_temperature_limit():
    spec = bath(beta=1e-3 / 5.0)
    tau = 3.0
    approx = (2 / spec.beta) * math.sin(spec.omega_cutoff * tau) / tau
    assert thermal_kernel(tau, spec) == pytest.approx(approx, rel=1e-2)


@pytest.mark.parametrize("beta", [0.05, 1.0, 20.0])
def test_kernel_finite_temperature_matches_adaptive_quadrature(beta):
    spec = bath(beta=beta)
    scale = abs(kernel_quad(0.0, 5.0, beta))
    for tau in (0.0, 0.3, 2.0, 17.0, 60.0):
        assert thermal_kernel(tau, spec) == pytest.approx(kernel_quad(tau, 5.0, beta), abs=1e-11 * scale)


def test_kernel_value_independent_of_batch():
    spec = bath(beta=2.0)
    taus = np.linspace(0, 30, 257)
    batch = thermal_kernel(taus, spec)
    assert all(thermal_kernel(t, spec) == v for t, v in zip(taus[::16], batch[::16]))


def test_table_reproduces_nodes_and_parity():
    spec = bath(beta=3.0)
    table = build_kernel_table(10.0, 200, spec)
    assert np.allclose(table(table.tau), thermal_kernel(table.tau, spec), rtol=0, atol=1e-13)
    assert np.array_equal(table(-table.tau[5:50]), table(table.tau[5:50]))
    with pytest.raises(DomainError):
        table(10.5)


def test_table_refinement():
    spec = bath(beta=3.0)
    coarse = build_kernel_table(10.0, None, spec)
    fine = build_kernel_table(10.0, 2 * coarse.tau.size - 1, spec)
    mid = 0.5 * (coarse.tau[1:] + coarse.tau[:-1])
    scale = np.abs(coarse.values).max()
    assert np.abs(coarse(mid) - fine(mid)).max() < 1e-6 * scale


def test_table_requires_valid_arguments(spec):
    with pytest.raises(DomainError):
        build_kernel_table(0.0, 10, spec)
    with pytest.raises(DomainError):
        build_kernel_table(1.0, 1, spec)
    with pytest.raises(DomainError):
        build_kernel_table(1.0, 10, None)


def test_kernel_panel_density_converges():
    spec = bath(beta=0.7)
    tau = np.array([0.5, 4.0, 25.0])
    base = thermal_kernel(tau, spec, QuadratureConfig(omega_panels=2))
    fine = thermal_kernel(tau, spec, QuadratureConfig(omega_panels=8))
    assert np.abs(base - fine).max() < 1e-10 * abs(thermal_kernel(0.0, spec))
