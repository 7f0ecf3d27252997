import numpy as np
import pytest
import scipy.sparse as sp

from thetanet.netgen import Network
from thetanet.netsim.theta import (ThetaGapSystem, ThetaSynapticSystem,
                                   simulate_theta_synaptic,
                                   single_theta_neuron)


def ring_network(directed=True):
    # 0 -> 1 -> 2 -> 0 plus a chord 0 -> 2
    a = np.zeros((3, 3))
    a[1, 0] = a[2, 1] = a[0, 2] = a[2, 0] = 1.0
    if not directed:
        a = np.maximum(a, a.T)
    return Network(directed=directed, adjacency=sp.csr_matrix(a))


def test_single_neuron_period():
    # uncoupled theta neuron at eta > 0 fires with period pi / sqrt(eta)
    sys = single_theta_neuron(4.0)
    series = sys.advance(10.0, dt=0.0005)
    gaps = np.diff(series.spikes[:, 0])
    assert gaps.size >= 5
    assert np.allclose(gaps, np.pi / 2.0, rtol=2e-3)


def test_single_neuron_excitable_below_zero():
    sys = single_theta_neuron(-0.1)
    series = sys.advance(20.0)
    assert series.spikes.shape[0] == 0
    # phase settles at the stable rest point, away from the firing phase
    assert abs(np.mod(sys.theta[0] + np.pi, 2 * np.pi) - np.pi) < np.pi / 2


def test_synaptic_variable_decays_exponentially():
    sys = ThetaSynapticSystem(ring_network(), eta=[-1.0, -1.0, -1.0],
                              K=0.0, tau=0.5)
    sys.reset(u0=[1.0, 1.0, 1.0])
    series = sys.advance(1.0, dt=0.001)
    assert series.values[0] == pytest.approx(1.0)
    # exact Euler factor, which itself approximates exp(-t/tau)
    assert series.values[-1] == pytest.approx((1 - 0.001 / 0.5) ** 1000,
                                              rel=1e-12)
    assert series.values[-1] == pytest.approx(np.exp(-2.0), rel=5e-3)


def test_spike_increments_u_by_inverse_tau():
    tau = 0.7
    sys = single_theta_neuron(1.0, tau=tau)
    series = sys.advance(3.0, dt=0.0005, record_every=1)
    assert series.spikes.shape[0] >= 1
    assert series.values.max() == pytest.approx(1.0 / tau, rel=1e-3)
    assert series.spikes[0, 1] == 0


def test_synaptic_step_order_matches_stated_rule():
    net = ring_network()
    eta = np.array([0.9, -0.2, 1.4])
    K, tau, dt = -2.0, 0.8, 0.05
    sys = ThetaSynapticSystem(net, eta, K=K, tau=tau)

    # independent transcription of the update rule, dense algebra
    a = net.adjacency.toarray()
    kmean = net.mean_degree
    theta = np.zeros(3)
    u = np.zeros(3)
    for _ in range(200):
        drive = (K / kmean) * (a @ u)
        dtheta = 1 - np.cos(theta) + (1 + np.cos(theta)) * (eta + drive)
        theta_new = theta + dt * dtheta
        fired = (theta < np.pi) & (theta_new >= np.pi)
        u = u - dt * u / tau
        u[fired] += 1.0 / tau
        theta = np.mod(theta_new, 2 * np.pi)

    sys.advance(200 * dt, dt=dt)
    assert np.allclose(sys.theta, theta, atol=1e-12)
    assert np.allclose(sys.u, u, atol=1e-12)


def test_gap_step_matches_stated_rule():
    net = ring_network(directed=False)
    eta = np.array([0.3, -0.1, 0.6])
    g, eps, dt = 0.5, 0.01, 0.02
    sys = ThetaGapSystem(net, eta, g=g, eps_reg=eps)

    a = net.adjacency.toarray()
    deg = a.sum(axis=1)
    kmean = deg.mean()
    theta = np.zeros(3)
    for _ in range(300):
        q = np.sin(theta) / (1 + np.cos(theta) + eps)
        dtheta = (1 - np.cos(theta) - (g / kmean) * deg * np.sin(theta)
                  + (1 + np.cos(theta)) * (eta + (g / kmean) * (a @ q)))
        theta = np.mod(theta + dt * dtheta, 2 * np.pi)

    sys.advance(300 * dt, dt=dt)
    assert np.allclose(sys.theta, theta, atol=1e-12)


def test_advance_carries_state_across_calls():
    net = ring_network()
    eta = [1.1, 0.4, 0.9]
    one = ThetaSynapticSystem(net, eta, K=-2.0, tau=1.0)
    two = ThetaSynapticSystem(net, eta, K=-2.0, tau=1.0)
    one.advance(2.0)
    one.advance(3.0)
    two.advance(5.0)
    assert np.allclose(one.theta, two.theta, atol=1e-12)
    assert np.allclose(one.u, two.u, atol=1e-12)
    assert one.time == pytest.approx(two.time)


def test_observables_and_labels():
    syn = ThetaSynapticSystem(ring_network(), [0.0, 0.0, 0.0], K=0.0, tau=2.0)
    syn.reset(u0=[0.3, 0.6, 0.9])
    assert syn.observable() == pytest.approx(0.6)
    assert syn.advance(0.01).label == "s_hat"
    gap = ThetaGapSystem(ring_network(directed=False), [0.0, 0.0, 0.0], g=0.0)
    gap.reset(theta0=[0.5, 0.5, 0.5])
    q = np.sin(0.5) / (1 + np.cos(0.5) + 0.01)
    assert gap.observable() == pytest.approx(q)
    assert gap.advance(0.01).label == "q_hat"


def test_gap_regularization_keeps_q_finite():
    gap = ThetaGapSystem(ring_network(directed=False), [0.0, 0.0, 0.0], g=0.1)
    gap.reset(theta0=[np.pi, np.pi - 1e-9, np.pi + 1e-9])
    assert np.all(np.isfinite(gap.q_values()))
    assert np.max(np.abs(gap.q_values())) < 2.0 / 0.01


def test_constructor_validation():
    net = ring_network()
    with pytest.raises(ValueError):
        ThetaSynapticSystem(net, [0.0, 0.0], K=1.0, tau=1.0)  # wrong eta length
    with pytest.raises(ValueError):
        ThetaSynapticSystem(net, [0.0] * 3, K=1.0, tau=0.0)
    with pytest.raises(ValueError):
        ThetaGapSystem(net, [0.0] * 3, g=0.5)  # gap coupling needs undirected
    undirected = ring_network(directed=False)
    with pytest.raises(ValueError):
        ThetaGapSystem(undirected, [0.0] * 3, g=-0.5)
    with pytest.raises(ValueError):
        ThetaGapSystem(undirected, [0.0] * 3, g=0.5, eps_reg=0.0)
    sys = ThetaSynapticSystem(net, [0.0] * 3, K=0.0, tau=1.0)
    with pytest.raises(ValueError):
        sys.reset(u0=[-0.1, 0.0, 0.0])


def test_simulate_wrapper_returns_series():
    sys = ThetaSynapticSystem(ring_network(), [1.0, 1.0, 1.0], K=-2.0, tau=1.0)
    series = simulate_theta_synaptic(sys, 1.0, dt=0.001, record_every=10)
    assert series.t[0] == 0.0
    assert series.t[-1] == pytest.approx(1.0)
    assert series.values.shape == series.t.shape
