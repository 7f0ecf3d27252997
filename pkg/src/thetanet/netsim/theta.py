"""Euler simulators for full theta-neuron networks.

Both systems integrate the phase equations with a fixed step (default 0.001)
and detect a firing whenever a phase increases through pi within a step: the
pre-step phase is below pi and the unwrapped post-step phase at or above it
(the drift at pi is exactly 2, so the crossing is transversal). State is kept
on the object and carried across advance() calls, which is what quasistatic
sweep protocols rely on.
"""

from __future__ import annotations

import numpy as np

from ..errors import NumericalError
from ..netgen import Network
from .protocols import TimeSeries

TWO_PI = 2.0 * np.pi


def _as_eta(eta, n: int) -> np.ndarray:
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    if eta.shape != (n,):
        raise ValueError(f"need {n} excitability values, got shape {eta.shape}")
    return eta.copy()


class _EulerSystem:
    """Shared bookkeeping: recorded advance loop over a step() implementation."""

    default_dt = 0.001
    default_record_every = 10

    def advance(self, duration: float, dt: float | None = None,
                record_every: int | None = None,
                record_spikes: bool = True) -> TimeSeries:
        """Integrate for `duration` from the current state, recording as we go.

        Returns the recorded observable (see subclasses) and, optionally, all
        firing events as (time, neuron) rows. The system's clock advances.
        """
        dt = self.default_dt if dt is None else float(dt)
        stride = self.default_record_every if record_every is None else int(record_every)
        if dt <= 0 or stride < 1:
            raise ValueError("need dt > 0 and record_every >= 1")
        n_steps = int(round(duration / dt))
        times = [self.time]
        values = [self.observable()]
        spikes: list = []
        for i in range(n_steps):
            fired = self.step(dt)
            self.time += dt
            if record_spikes and fired.size:
                t = self.time
                spikes.extend((t, int(j)) for j in fired)
            if (i + 1) % stride == 0 or i + 1 == n_steps:
                obs = self.observable()
                if not np.isfinite(obs) or not self.state_finite():
                    raise NumericalError(f"non-finite state at step {i + 1}")
                if (i + 1) % stride == 0:
                    times.append(self.time)
                    values.append(obs)
        if n_steps % stride != 0:
            times.append(self.time)
            values.append(self.observable())
        spike_arr = np.array(spikes, dtype=float) if spikes else np.empty((0, 2))
        return TimeSeries(np.array(times), np.array(values),
                          label=self.observable_label, spikes=spike_arr)


class ThetaSynapticSystem(_EulerSystem):
    """Theta neurons with pulsatile synapses on a directed network.

    Drive on neuron i is (K/<k>) sum_j A_ij u_j; each u_j decays with time
    constant tau and jumps by 1/tau when neuron j fires. Default initial
    condition: theta_i = u_i = 0.
    """

    observable_label = "s_hat"

    def __init__(self, net: Network, eta, K: float, tau: float,
                 mean_degree: float | None = None):
        if tau <= 0:
            raise ValueError("synaptic time constant must be positive")
        self.net = net
        self.eta = _as_eta(eta, net.n)
        self.K = float(K)
        self.tau = float(tau)
        self.mean_degree = float(net.mean_degree if mean_degree is None else mean_degree)
        if self.mean_degree <= 0 and self.K != 0:
            raise ValueError("coupled network needs a positive mean degree")
        self._adj = net.adjacency
        self.reset()

    @property
    def n(self) -> int:
        return self.net.n

    def reset(self, theta0=None, u0=None) -> None:
        n = self.n
        self.theta = np.zeros(n) if theta0 is None else np.array(theta0, dtype=float)
        self.u = np.zeros(n) if u0 is None else np.array(u0, dtype=float)
        if np.any(self.u < 0):
            raise ValueError("synaptic variables must be nonnegative")
        self.time = 0.0

    def drive(self) -> np.ndarray:
        if self.K == 0.0:
            return np.zeros(self.n)
        return (self.K / self.mean_degree) * (self._adj @ self.u)

    def observable(self) -> float:
        return float(self.u.mean())

    def state_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.theta)) and np.all(np.isfinite(self.u)))

    def step(self, dt: float) -> np.ndarray:
        cos_t = np.cos(self.theta)
        dtheta = 1.0 - cos_t + (1.0 + cos_t) * (self.eta + self.drive())
        theta_new = self.theta + dt * dtheta
        fired = np.where((self.theta < np.pi) & (theta_new >= np.pi))[0]
        self.u -= dt * self.u / self.tau
        if fired.size:
            self.u[fired] += 1.0 / self.tau
        self.theta = np.mod(theta_new, TWO_PI)
        return fired


class ThetaGapSystem(_EulerSystem):
    """Theta neurons with gap junctions on an undirected network.

    The voltage coupling tan(theta/2) is regularized to
    q(theta) = sin(theta) / (1 + cos(theta) + eps_reg); the per-neuron leak
    -(g k_j/<k>) sin(theta_j) keeps the exact sine. Records the mean of q.
    """

    observable_label = "q_hat"

    def __init__(self, net: Network, eta, g: float, eps_reg: float = 0.01,
                 mean_degree: float | None = None):
        if net.directed:
            raise ValueError("gap junctions need an undirected network")
        if g < 0:
            raise ValueError("gap coupling strength must be nonnegative")
        if eps_reg <= 0:
            raise ValueError("regularization must be positive")
        self.net = net
        self.eta = _as_eta(eta, net.n)
        self.g = float(g)
        self.eps_reg = float(eps_reg)
        self.mean_degree = float(net.mean_degree if mean_degree is None else mean_degree)
        if self.mean_degree <= 0 and self.g != 0:
            raise ValueError("coupled network needs a positive mean degree")
        self._adj = net.adjacency
        self._deg = net.in_degrees.astype(float)
        self.reset()

    @property
    def n(self) -> int:
        return self.net.n

    def reset(self, theta0=None) -> None:
        self.theta = (np.zeros(self.n) if theta0 is None
                      else np.array(theta0, dtype=float))
        self.time = 0.0

    def q_values(self) -> np.ndarray:
        cos_t = np.cos(self.theta)
        return np.sin(self.theta) / (1.0 + cos_t + self.eps_reg)

    def observable(self) -> float:
        return float(self.q_values().mean())

    def state_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.theta)))

    def step(self, dt: float) -> np.ndarray:
        cos_t = np.cos(self.theta)
        sin_t = np.sin(self.theta)
        if self.g != 0.0:
            gk = self.g / self.mean_degree
            drive = self.eta + gk * (self._adj @ self.q_values())
            leak = gk * self._deg * sin_t
        else:
            drive = self.eta
            leak = 0.0
        theta_new = self.theta + dt * (1.0 - cos_t - leak + (1.0 + cos_t) * drive)
        fired = np.where((self.theta < np.pi) & (theta_new >= np.pi))[0]
        self.theta = np.mod(theta_new, TWO_PI)
        return fired


def single_theta_neuron(eta: float, kind: str = "synaptic", **kwargs):
    """Uncoupled single neuron (an edgeless 1-node network), for anchors."""
    import scipy.sparse as sp

    net = Network(directed=(kind == "synaptic"),
                  adjacency=sp.csr_matrix((1, 1)))
    if kind == "synaptic":
        return ThetaSynapticSystem(net, [eta], K=0.0,
                                   tau=kwargs.pop("tau", 1.0), **kwargs)
    if kind == "gap":
        return ThetaGapSystem(net, [eta], g=0.0, **kwargs)
    raise ValueError(f"unknown single-neuron kind {kind!r}")


def simulate_theta_synaptic(system: ThetaSynapticSystem, t_end: float,
                            dt: float = 0.001, record_every: int = 10,
                            record_spikes: bool = True) -> TimeSeries:
    """Advance a synaptic theta network and record s_hat plus firing times."""
    return system.advance(t_end, dt=dt, record_every=record_every,
                          record_spikes=record_spikes)


def simulate_theta_gap(system: ThetaGapSystem, t_end: float, dt: float = 0.001,
                       record_every: int = 10,
                       record_spikes: bool = True) -> TimeSeries:
    """Advance a gap-junction theta network and record q_hat plus firing times."""
    return system.advance(t_end, dt=dt, record_every=record_every,
                          record_spikes=record_spikes)
