"""Smoke tests for the python bindings: build states, take marginals and
means, evolve, and read the negativity diagnostics."""

import math

import numpy as np
import pytest

import kinchain as kc


@pytest.fixture
def params():
    return kc.PhysicalParams(1.0, 1.0, 1.0)


def test_laguerre_values():
    assert kc.laguerre(0, 2.5) == 1.0
    assert kc.laguerre(1, 2.0) == pytest.approx(-1.0)
    assert kc.laguerre(2, 1.0) == pytest.approx(1.0 - 2.0 + 0.5)


def test_oscillator_state_normalization(params):
    for n in range(3):
        f = kc.wigner_oscillator(n, params, points=128)
        assert f.f0() == pytest.approx(1.0, abs=1e-6)
        assert f.index_set == [1, 2]
        assert f.values.shape == (128, 128)


def test_marginal_and_mean(params):
    f = kc.wigner_oscillator(0, params, points=128)
    marg = kc.marginalize(f, [2])
    assert marg.index_set == [1]
    x = np.linspace(-8 * params.sigma_x, 8 * params.sigma_x, 128)
    w = np.full(128, x[1] - x[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    var = (marg.values.ravel() * w * x**2).sum() / (marg.values.ravel() * w).sum()
    assert var == pytest.approx(params.hbar / (2 * params.mass * params.omega), rel=1e-6)

    mv = kc.mean_kinematic(f, 2)
    assert mv.order == 2
    assert np.abs(mv.values[mv.valid]).max() < 1e-12


def test_moyal_closure_is_classical_for_harmonic(params):
    f = kc.wigner_oscillator(1, params, points=96)
    mf = kc.moyal_mean(f, params, k_max=4)
    x = np.linspace(-8 * params.sigma_x, 8 * params.sigma_x, 96)
    expected = -params.omega**2 * x
    got = mf.values.reshape(96, 96)
    assert np.abs(got - expected[:, None]).max() < 1e-13


def test_evolution_conserves_mass_and_negativity(params):
    f = kc.wigner_oscillator(1, params, points=96)
    before = kc.h_function(f)
    period = 2 * math.pi / params.omega
    g = kc.step_harmonic(f, params, dt=period / 400, steps=40)
    after = kc.h_function(g)
    assert after.f0 == pytest.approx(before.f0, rel=1e-9)
    assert after.f0_minus == pytest.approx(before.f0_minus, abs=2e-3)
    assert before.f0_minus == pytest.approx(1 - 2 * math.exp(-0.5), abs=1e-3)


def test_moments_and_balances(params):
    f = kc.wigner_oscillator(0, params, points=96)
    P = kc.central_moment2(f, 2, 2, drop=[2])
    marg = kc.marginalize(f, [2]).values.ravel()
    expected = marg * params.hbar * params.omega / (2 * params.mass)
    assert np.abs(P[:, 0, 0] - expected).max() < 1e-8

    mv = kc.mean_kinematic(f, 2)
    mvv = kc.nested_average(mv, kc.marginalize(f, [2]), drop=[1])
    assert abs(mvv.values[0, 0]) < 1e-12

    g = kc.step_harmonic(f, params, dt=1e-3)
    dh, src, res = kc.h_theorem_residual(f, g, params, dt=1e-3)
    assert abs(src) < 1e-12
    assert abs(res) < 1e-3


def test_negative_region(params):
    r0 = kc.negative_region(kc.wigner_oscillator(0, params, points=96))
    r1 = kc.negative_region(kc.wigner_oscillator(1, params, points=96))
    assert r0.negative_component_count == 0
    assert r1.negative_component_count == 1
    assert r1.component_f0_minus[0] < -0.2


def test_field_from_array_and_dump_roundtrip(tmp_path, params):
    x = np.linspace(-2, 2, 33)
    v = np.linspace(-3, 3, 17)
    vals = np.exp(-0.5 * (x[:, None] ** 2 + v[None, :] ** 2))
    f = kc.field_from_array([1, 2], [(-2.0, 2.0, 33), (-3.0, 3.0, 17)], vals, time=0.25)
    assert f.f0() > 0
    path = tmp_path / "f.kgd"
    kc.write_grid_dump(f, path)
    g = kc.read_grid_dump(path)
    assert g.time == 0.25
    np.testing.assert_array_equal(g.values, f.values)


def test_guard_errors(params):
    f = kc.wigner_oscillator(0, params, points=64)
    with pytest.raises(kc.NumericalGuardError):
        kc.step_harmonic(f, params, dt=50.0)
    with pytest.raises(Exception):
        kc.laguerre(99, 0.0)
