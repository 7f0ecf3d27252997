"""Reduced-model unit tests.

The heavier cross-checks against independently derived fixed points and
bifurcation values live in test_continuation.py and test_acceptance.py; this
file covers the algebraic building blocks and the integrator.
"""

import numpy as np
import pytest

from thetanet.distributions import DegreeDistribution
from thetanet.meanfield import (GapMeanField, SynapticMeanField, build_system,
                                beta_synaptic_system, firing_rate, integrate,
                                q_expectation, q_fourier_coefficient,
                                uniform_gap_system, uniform_synaptic_system,
                                w_inverse, w_transform)

from _oracles import q_coefficient_quadrature, synaptic_rate


def test_firing_rate_known_points():
    assert firing_rate(0.0) == pytest.approx(1.0 / np.pi)
    assert firing_rate(1.0) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        firing_rate(-1.0)


def test_q_expectation_closed_form():
    # geometric-series identity: sum_m i(-1)^m (b^m - conj(b)^m)
    rng = np.random.default_rng(0)
    for _ in range(25):
        b = (rng.uniform(-0.95, 0.95) + 1j * rng.uniform(-0.95, 0.95))
        if abs(b) >= 0.98 or abs(1 + b) < 1e-3:
            continue
        terms = [1j * (-1) ** m * (b ** m - np.conj(b) ** m)
                 for m in range(1, 4000)]
        partial = np.sum(terms).real
        assert q_expectation(b) == pytest.approx(partial, abs=1e-10)


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_q_fourier_coefficients_match_quadrature(m):
    for eps in (0.5, 0.05, 0.01):
        closed = q_fourier_coefficient(m, eps)
        numeric = q_coefficient_quadrature(m, eps)
        assert closed == pytest.approx(numeric, abs=1e-10)


def test_q_fourier_limit():
    # c_m(eps) -> i(-1)^m with error ~ m sqrt(2 eps)
    for m in (1, 2, 3, 5):
        gap6 = abs(q_fourier_coefficient(m, 1e-6) - 1j * (-1) ** m)
        gap8 = abs(q_fourier_coefficient(m, 1e-8) - 1j * (-1) ** m)
        assert gap6 < 1.1 * m * np.sqrt(2e-6)
        assert gap6 / gap8 == pytest.approx(10.0, rel=0.05)


def test_w_transform_round_trip():
    rng = np.random.default_rng(1)
    b = rng.uniform(-0.9, 0.9, 64) + 1j * rng.uniform(-0.9, 0.9, 64)
    b = b[np.abs(b) < 0.95]
    phi, v = w_transform(b)
    assert np.max(np.abs(w_inverse(phi, v) - b)) < 1e-12
    # scalar path preserves types
    phi1, v1 = w_transform(0.2 + 0.1j)
    assert isinstance(phi1, float) and isinstance(v1, float)


def test_w_transform_consistency_with_rates():
    # real part of w/pi is the firing rate, imaginary part the mean voltage
    b = 0.3 - 0.25j
    phi, v = w_transform(b)
    assert phi == pytest.approx(firing_rate(b), abs=1e-14)
    assert v == pytest.approx(q_expectation(b), abs=1e-14)


def test_unit_disk_is_invariant():
    sys = uniform_synaptic_system(sigma=30.0, eta0=1.0, delta=0.05, K=-2.0,
                                  tau=1.0, count=40)
    ts, ys = integrate(sys.rhs, sys.initial_state(), t_end=30.0, dt=0.01)
    nb = sys.grid.count
    b = ys[:, :nb] + 1j * ys[:, nb:2 * nb]
    assert np.max(np.abs(b)) <= 1.0 + 1e-9


def test_synaptic_fixed_point_matches_scalar_oracle():
    # relax the reduced model where the fixed point is stable (width beyond
    # the oscillatory window), then compare s against the self-consistent
    # closed-form rate sum at the same eta0
    sys = uniform_synaptic_system(sigma=40.0, eta0=1.0, delta=0.05, K=-2.0,
                                  tau=1.0, count=100)
    ts, ys = integrate(sys.rhs, sys.initial_state(), t_end=300.0, dt=0.01)
    s_impl = ys[-1, -1]
    pts, wts = sys.grid.points, sys.grid.weights
    eta_eff = 1.0 + (-2.0) * pts * s_impl / 100.0
    s_oracle = wts @ synaptic_rate(eta_eff, 0.05)
    # time relaxation is the accuracy bottleneck here, not the oracle
    assert s_impl == pytest.approx(s_oracle, abs=1e-6)


def test_degenerate_gap_system_reduces_to_two_odes():
    # with identical degrees the coupling field equals V and the model
    # collapses to two ODEs
    two = uniform_gap_system(sigma=0.0, eta0=0.001, delta=0.01, g=0.4)
    assert two.n_states == 2
    phi, v = two.unpack(two.initial_state())
    t_field = two.coupling_field(np.array([0.37]))
    assert t_field[0] == pytest.approx(0.37, abs=1e-14)
    ts, ys = integrate(two.rhs, two.initial_state(), t_end=50.0, dt=0.01)
    assert np.all(np.isfinite(ys))


def test_gap_coupling_field_scaling_invariance():
    # T depends only on degree relative to the mean: k -> 2k leaves it fixed
    law_a = DegreeDistribution.uniform_width(100.0, 30.0)
    law_b = DegreeDistribution.uniform_width(200.0, 60.0)
    sys_a = GapMeanField(grid=law_a.discretize(50), eta0=0.1, delta=0.05, g=0.5)
    sys_b = GapMeanField(grid=law_b.discretize(50), eta0=0.1, delta=0.05, g=0.5)
    v = np.linspace(-0.3, 0.4, 50)
    assert np.allclose(sys_a.coupling_field(v), sys_b.coupling_field(v),
                       atol=1e-12)


def test_gap_field_averages_to_v_mean_times_k_over_mean():
    sys = uniform_gap_system(sigma=40.0, eta0=0.1, delta=0.05, g=0.5, count=60)
    v = np.random.default_rng(2).uniform(-0.2, 0.3, 60)
    t_field = sys.coupling_field(v)
    expect = sys.grid.points / sys.grid.mean ** 2 \
        * (sys.grid.weights @ (sys.grid.points * v))
    assert np.allclose(t_field, expect, atol=1e-13)


def test_build_system_dispatch_and_validation():
    sys = build_system("synaptic", count=20, sigma=10.0, eta0=1.0,
                       delta=0.05, K=-2.0, tau=1.0)
    assert isinstance(sys, SynapticMeanField)
    assert sys.n_states == 2 * 20 + 1
    gap = build_system("gap", count=20, sigma=10.0, eta0=0.2, delta=0.05, g=1.0)
    assert isinstance(gap, GapMeanField)
    with pytest.raises(ValueError):
        build_system("resistive", count=20, sigma=10.0)
    with pytest.raises(TypeError):
        uniform_synaptic_system(sigma=10.0, eta0=1.0, delta=0.05, K=-2.0,
                                tau=1.0, p_out_width=20.0)


def test_beta_family_uses_support_not_mean():
    sys = beta_synaptic_system(alpha=3.0, eta0=1.0, delta=0.05, K=-2.0,
                               tau=1.0, count=50)
    assert sys.grid.points[0] > 50.0 and sys.grid.points[-1] < 150.0
    assert sys.grid.mean == pytest.approx(100.0, abs=1e-9)


def test_integrator_matches_exponential_decay():
    ts, ys = integrate(lambda y: -y, np.array([1.0]), t_end=2.0, dt=0.001)
    assert ys[-1, 0] == pytest.approx(np.exp(-2.0), abs=1e-9)
    # record_every thins the output but keeps the final state
    ts2, ys2 = integrate(lambda y: -y, np.array([1.0]), t_end=2.0, dt=0.001,
                         record_every=100)
    assert ts2.size < ts.size
    assert ys2[-1, 0] == pytest.approx(ys[-1, 0], abs=1e-12)
