"""Morris-Lecar network simulators (synaptic and gap coupling).

Conductance-based Type-I neurons; the single cell undergoes a SNIC as the
drive current increases, with firing threshold I0 ~= 39.6935. Time is in
milliseconds, voltages in mV; the default Euler step is 0.01 ms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..netgen import Network
from .theta import _EulerSystem


@dataclass(frozen=True)
class MLParams:
    """Cell parameters; conductances in mS/cm^2, capacitance in uF/cm^2."""

    C: float = 20.0
    g_L: float = 2.0
    g_Ca: float = 4.0
    g_K: float = 8.0
    V_L: float = -60.0
    V_Ca: float = 120.0
    V_K: float = -80.0
    V1: float = -1.2
    V2: float = 18.0
    V3: float = 12.0
    V4: float = 17.4
    lambda0: float = 1.0 / 15.0

    def m_inf(self, v):
        return 0.5 * (1.0 + np.tanh((v - self.V1) / self.V2))

    def w_inf(self, v):
        return 0.5 * (1.0 + np.tanh((v - self.V3) / self.V4))

    def tau_n(self, v):
        return 1.0 / np.cosh((v - self.V3) / (2.0 * self.V4))

    def s_inf(self, v):
        return 1.0 + np.tanh(v / 10.0)

    def membrane_current(self, v, n):
        return (self.g_L * (self.V_L - v)
                + self.g_Ca * self.m_inf(v) * (self.V_Ca - v)
                + self.g_K * n * (self.V_K - v))


DEFAULT_PARAMS = MLParams()
REST_V0 = -40.0


class MorrisLecarSystem(_EulerSystem):
    """Morris-Lecar network with synaptic or gap coupling.

    Synaptic: drive (eps/<k>) sum_j A_ij s_j with tau ds_i/dt = s_inf(V_i)-s_i;
    records s_hat. Gap: drive (eps/<k>) sum_j A_ij (V_j - V_i); records V_hat.
    A firing is an upward crossing of V = 0 mV within a step.
    """

    default_dt = 0.01          # milliseconds
    default_record_every = 100

    def __init__(self, net: Network, I_het, I0: float, eps: float,
                 coupling: str = "synaptic", tau: float = 20.0,
                 params: MLParams = DEFAULT_PARAMS,
                 mean_degree: float | None = None):
        if coupling not in ("synaptic", "gap"):
            raise ValueError(f"unknown coupling {coupling!r}")
        if coupling == "gap" and net.directed:
            raise ValueError("gap junctions need an undirected network")
        if tau <= 0:
            raise ValueError("synaptic time constant must be positive")
        self.net = net
        self.coupling = coupling
        self.I_het = np.broadcast_to(np.asarray(I_het, dtype=float),
                                     (net.n,)).copy()
        self.I0 = float(I0)
        self.eps = float(eps)
        self.tau = float(tau)
        self.params = params
        self.mean_degree = float(net.mean_degree if mean_degree is None else mean_degree)
        if self.mean_degree <= 0 and self.eps != 0:
            raise ValueError("coupled network needs a positive mean degree")
        self._adj = net.adjacency
        self._deg = net.in_degrees.astype(float)
        self.observable_label = "s_hat" if coupling == "synaptic" else "V_hat"
        self.reset()

    @property
    def n(self) -> int:
        return self.net.n

    def reset(self, V0=None, n0=None, s0=None) -> None:
        n = self.n
        self.V = (np.full(n, REST_V0) if V0 is None
                  else np.broadcast_to(np.asarray(V0, float), (n,)).copy())
        self.gate = (self.params.w_inf(self.V).copy() if n0 is None
                     else np.broadcast_to(np.asarray(n0, float), (n,)).copy())
        self.s = (np.zeros(n) if s0 is None
                  else np.broadcast_to(np.asarray(s0, float), (n,)).copy())
        self.time = 0.0

    def coupling_current(self) -> np.ndarray:
        if self.eps == 0.0:
            return np.zeros(self.n)
        scale = self.eps / self.mean_degree
        if self.coupling == "synaptic":
            return scale * (self._adj @ self.s)
        return scale * (self._adj @ self.V - self._deg * self.V)

    def observable(self) -> float:
        return float(self.s.mean() if self.coupling == "synaptic"
                     else self.V.mean())

    def state_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.V)) and np.all(np.isfinite(self.gate))
                    and np.all(np.isfinite(self.s)))

    def step(self, dt: float) -> np.ndarray:
        p = self.params
        dv = (p.membrane_current(self.V, self.gate) + self.I0 + self.I_het
              + self.coupling_current()) / p.C
        dn = p.lambda0 * (p.w_inf(self.V) - self.gate) / p.tau_n(self.V)
        v_new = self.V + dt * dv
        fired = np.where((self.V < 0.0) & (v_new >= 0.0))[0]
        self.gate += dt * dn
        if self.coupling == "synaptic":
            self.s += dt * (p.s_inf(self.V) - self.s) / self.tau
        self.V = v_new
        return fired


def simulate_morris_lecar(system: MorrisLecarSystem, t_end_ms: float,
                          dt_ms: float = 0.01, record_every: int = 100,
                          record_spikes: bool = True):
    """Advance a Morris-Lecar network, recording s_hat (synaptic) or V_hat (gap)."""
    return system.advance(t_end_ms, dt=dt_ms, record_every=record_every,
                          record_spikes=record_spikes)


def single_neuron_fires(I0: float, t_end_ms: float, dt: float = 0.01,
                        settle_ms: float = 500.0,
                        params: MLParams = DEFAULT_PARAMS) -> bool:
    """Does one uncoupled cell cross V = 0 upward after the settle time?

    Scalar arithmetic on purpose: the bisection horizons run to tens of
    seconds of model time, where per-step array overhead would dominate.
    """
    tanh, cosh = math.tanh, math.cosh
    p = params
    v = REST_V0
    n = 0.5 * (1.0 + tanh((v - p.V3) / p.V4))
    n_steps = int(t_end_ms / dt)
    for i in range(n_steps):
        m_inf = 0.5 * (1.0 + tanh((v - p.V1) / p.V2))
        w_inf = 0.5 * (1.0 + tanh((v - p.V3) / p.V4))
        tau_n = 1.0 / cosh((v - p.V3) / (2.0 * p.V4))
        dv = (p.g_L * (p.V_L - v) + p.g_Ca * m_inf * (p.V_Ca - v)
              + p.g_K * n * (p.V_K - v) + I0) / p.C
        v_new = v + dt * dv
        n += dt * p.lambda0 * (w_inf - n) / tau_n
        if i * dt > settle_ms and v < 0.0 <= v_new:
            return True
        v = v_new
    return False


def single_neuron_threshold(lo: float = 39.0, hi: float = 40.5,
                            tol: float = 1e-4, dt: float = 0.01,
                            settle_ms: float = 500.0,
                            params: MLParams = DEFAULT_PARAMS) -> float:
    """Firing threshold of one cell by bisection on fires/rests.

    The integration horizon grows as the bracket tightens
    (t_end = settle + 700/sqrt(bracket width) ms) because the firing latency
    diverges like an inverse square root at the threshold; a fixed horizon
    misclassifies super-threshold currents near the end of the bisection.
    """
    if single_neuron_fires(lo, settle_ms + 700.0 / math.sqrt(hi - lo),
                           dt, settle_ms, params):
        raise ValueError(f"already firing at the lower bracket {lo:g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        t_end = settle_ms + 700.0 / math.sqrt(max(hi - lo, 1e-6))
        if single_neuron_fires(mid, t_end, dt, settle_ms, params):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
