"""Degree-indexed mean-field reductions for Type-I neuron networks.

Two reduced systems over a discretized in-degree (or degree) grid:

* synaptic: one complex order parameter b per degree class plus the scalar
  synaptic drive s, with firing-rate flux F(b) closing the loop;
* gap junction: real pairs (phi, V) per degree class (firing rate and mean
  voltage), coupled through the degree-weighted voltage average T.

Only the in-degree law enters either construction; out-degrees drop out of the
reduction and have no parameter here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import DegreeDistribution, DegreeGrid
from .errors import NumericalError

PI = np.pi
SINGULAR_TOL = 1e-12


def _guard_not_minus_one(b) -> None:
    if np.any(np.abs(1.0 + np.asarray(b)) < SINGULAR_TOL):
        raise ValueError("order parameter at the singular point b = -1")


def firing_rate(b):
    """Flux of phase density through the firing phase: (1-|b|^2) / (pi |1+b|^2)."""
    b = np.asarray(b, dtype=complex)
    _guard_not_minus_one(b)
    out = (1.0 - np.abs(b) ** 2) / (PI * np.abs(1.0 + b) ** 2)
    return out if out.ndim else float(out)


def q_expectation(b):
    """Expected regularized voltage q over the phase density: 2 Im(b) / |1+b|^2."""
    b = np.asarray(b, dtype=complex)
    _guard_not_minus_one(b)
    out = 2.0 * b.imag / np.abs(1.0 + b) ** 2
    return out if out.ndim else float(out)


def q_fourier_coefficient(m: int, eps: float) -> complex:
    """Coefficient of e^{i m theta} in the Fourier series of q(theta).

    q(theta) = sin(theta) / (1 + cos(theta) + eps); the coefficients tend to
    i(-1)^m as eps -> 0+.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    if not eps > 0:
        raise ValueError("need eps > 0")
    r = np.sqrt(2.0 * eps + eps * eps)
    a = r - 1.0 - eps
    return 1j * (a ** (m + 1) - a ** (m - 1)) / (2.0 * r)


def w_transform(b) -> tuple:
    """Map b to (phi, V) via w = (1 - conj(b)) / (1 + conj(b)) = pi phi + i V."""
    b = np.asarray(b, dtype=complex)
    _guard_not_minus_one(b)
    w = (1.0 - np.conj(b)) / (1.0 + np.conj(b))
    phi, v = w.real / PI, w.imag
    if phi.ndim:
        return phi, v
    return float(phi), float(v)


def w_inverse(phi, v):
    """Inverse of w_transform: b = (1 - conj(w)) / (1 + conj(w))."""
    w = np.asarray(phi, dtype=float) * PI + 1j * np.asarray(v, dtype=float)
    if np.any(np.abs(1.0 + w) < SINGULAR_TOL):
        raise ValueError("(phi, V) at the singular point w = -1")
    b = (1.0 - np.conj(w)) / (1.0 + np.conj(w))
    return b if b.ndim else complex(b)


@dataclass(frozen=True)
class SynapticMeanField:
    """Reduced synaptic system: complex b per in-degree class plus scalar s.

    State layout for the real-vector interface: [Re b, Im b, s].
    """

    grid: DegreeGrid
    eta0: float
    delta: float
    K: float
    tau: float
    mean_degree: float | None = None

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("heterogeneity half-width must be nonnegative")
        if self.tau <= 0:
            raise ValueError("synaptic time constant must be positive")
        if self.mean_degree is None:
            object.__setattr__(self, "mean_degree", self.grid.mean)

    @property
    def n_states(self) -> int:
        return 2 * self.grid.count + 1

    def initial_state(self) -> np.ndarray:
        # all mass at theta = 0 and no synaptic drive
        return self.pack(np.ones(self.grid.count, dtype=complex), 0.0)

    def pack(self, b: np.ndarray, s: float) -> np.ndarray:
        return np.concatenate([np.real(b), np.imag(b), [s]])

    def unpack(self, y: np.ndarray) -> tuple[np.ndarray, float]:
        m = self.grid.count
        return y[:m] + 1j * y[m:2 * m], float(y[2 * m])

    def rhs_complex(self, b: np.ndarray, s: float) -> tuple[np.ndarray, float]:
        drive = self.eta0 + self.K * self.grid.points * s / self.mean_degree
        db = (-0.5j * (b - 1.0) ** 2
              + 0.5 * (b + 1.0) ** 2 * (-self.delta + 1j * drive))
        ds = (self.grid.weights @ firing_rate(b) - s) / self.tau
        return db, ds

    def rhs(self, y: np.ndarray) -> np.ndarray:
        b, s = self.unpack(y)
        db, ds = self.rhs_complex(b, s)
        return self.pack(db, ds)


@dataclass(frozen=True)
class GapMeanField:
    """Reduced gap-junction system: real (phi, V) per degree class.

    State layout for the real-vector interface: [phi, V]. The coupling field
    is T(k) = k * sum_k' k' P(k') V(k') / <k>^2, so a degenerate grid gives
    T = V exactly and the system collapses to two ODEs.
    """

    grid: DegreeGrid
    eta0: float
    delta: float
    g: float
    mean_degree: float | None = None

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("heterogeneity half-width must be nonnegative")
        if self.g < 0:
            raise ValueError("gap coupling strength must be nonnegative")
        if self.mean_degree is None:
            object.__setattr__(self, "mean_degree", self.grid.mean)

    @property
    def n_states(self) -> int:
        return 2 * self.grid.count

    def initial_state(self) -> np.ndarray:
        # image of b = 1 is (phi, V) = (0, 0); nudge phi off the singular point
        y = np.zeros(self.n_states)
        y[:self.grid.count] = 1e-3
        return y

    def pack(self, phi: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.concatenate([phi, v])

    def unpack(self, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        m = self.grid.count
        return y[:m], y[m:2 * m]

    def coupling_field(self, v: np.ndarray) -> np.ndarray:
        k, w = self.grid.points, self.grid.weights
        return k * float((k * w) @ v) / self.mean_degree ** 2

    def rhs_parts(self, phi: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        t = self.coupling_field(v)
        dphi = self.delta / PI + 2.0 * phi * v - self.g * phi
        dv = self.eta0 - PI ** 2 * phi ** 2 + v ** 2 + self.g * (t - v)
        return dphi, dv

    def rhs(self, y: np.ndarray) -> np.ndarray:
        phi, v = self.unpack(y)
        dphi, dv = self.rhs_parts(phi, v)
        return self.pack(dphi, dv)

    def rhs_b(self, b: np.ndarray) -> np.ndarray:
        """Equivalent dynamics of the complex order parameter itself.

        The coupling field uses the voltage image of b, so trajectories match
        the (phi, V) system under w_transform.
        """
        t = self.coupling_field(np.asarray(q_expectation(b)))
        return (0.5 * ((1j * self.eta0 - self.delta) * (1.0 + b) ** 2
                       - 1j * (1.0 - b) ** 2)
                + 0.5 * (1j * (1.0 + b) ** 2 * self.g * t
                         + self.g * (1.0 - b ** 2)))


def integrate(rhs, y0: np.ndarray, t_end: float, dt: float = 0.01,
              record_every: int = 1, t0: float = 0.0,
              adaptive: bool = False, tol: float = 1e-8):
    """Integrate dy/dt = rhs(y) from t0 to t0 + t_end.

    Fixed-step RK4 by default; adaptive=True switches to step-halving error
    control with local extrapolation, recording every accepted step. Returns
    (times, states) with states[i] the state at times[i]; the last row is the
    final state.
    """
    y = np.array(y0, dtype=float)
    if adaptive:
        return _integrate_adaptive(rhs, y, t_end, dt, tol, t0)
    n_steps = int(round(t_end / dt))
    times = [t0]
    states = [y.copy()]
    for i in range(n_steps):
        y = _rk4_step(rhs, y, dt)
        if not np.all(np.isfinite(y)):
            raise NumericalError(f"non-finite state at step {i + 1}")
        if (i + 1) % record_every == 0:
            times.append(t0 + (i + 1) * dt)
            states.append(y.copy())
    if times[-1] != t0 + n_steps * dt:
        times.append(t0 + n_steps * dt)
        states.append(y.copy())
    return np.array(times), np.array(states)


def _rk4_step(rhs, y, h):
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _integrate_adaptive(rhs, y, t_end, h, tol, t0):
    t = t0
    t_stop = t0 + t_end
    times = [t]
    states = [y.copy()]
    step_count = 0
    while t < t_stop - 1e-14:
        h = min(h, t_stop - t)
        big = _rk4_step(rhs, y, h)
        half = _rk4_step(rhs, y, 0.5 * h)
        two = _rk4_step(rhs, half, 0.5 * h)
        if not (np.all(np.isfinite(big)) and np.all(np.isfinite(two))):
            raise NumericalError(f"non-finite state near t = {t:.6g}")
        err = np.max(np.abs(two - big)) / 15.0
        scale = tol * max(1.0, float(np.max(np.abs(y))))
        if err <= scale:
            y = two + (two - big) / 15.0
            t += h
            times.append(t)
            states.append(y.copy())
        step_count += 1
        if step_count > 10_000_000:
            raise NumericalError("adaptive integrator exceeded its step budget")
        ratio = (scale / err) ** 0.2 if err > 0 else 5.0
        h *= min(5.0, max(0.2, 0.9 * ratio))
    return np.array(times), np.array(states)


def uniform_synaptic_system(sigma: float, eta0: float = 1.0, delta: float = 0.05,
                            K: float = -2.0, tau: float = 1.0, mean: float = 100.0,
                            count: int = 100) -> SynapticMeanField:
    grid = DegreeDistribution.uniform_width(mean, sigma).discretize(count)
    return SynapticMeanField(grid, eta0, delta, K, tau)


def beta_synaptic_system(alpha: float, eta0: float = 1.0, delta: float = 0.05,
                         K: float = -2.0, tau: float = 1.0,
                         support: tuple = (50.0, 150.0),
                         count: int = 100) -> SynapticMeanField:
    grid = DegreeDistribution.shifted_beta(alpha, support).discretize(count)
    return SynapticMeanField(grid, eta0, delta, K, tau)


def uniform_gap_system(sigma: float, eta0: float, delta: float, g: float,
                       mean: float = 100.0, count: int = 100) -> GapMeanField:
    grid = DegreeDistribution.uniform_width(mean, sigma).discretize(count)
    return GapMeanField(grid, eta0, delta, g)


def rhs_synaptic(system: SynapticMeanField, b: np.ndarray, s: float):
    """Time derivative of (b per class, s) for a synaptic mean field."""
    return system.rhs_complex(np.asarray(b, dtype=complex), float(s))


def rhs_gap(system: GapMeanField, phi: np.ndarray, v: np.ndarray):
    """Time derivative of (phi per class, V per class) for a gap mean field."""
    return system.rhs_parts(np.asarray(phi, dtype=float), np.asarray(v, dtype=float))


_SYNAPTIC_PARAMS = {"sigma", "alpha", "support", "eta0", "delta", "K", "tau", "mean"}
_GAP_PARAMS = {"sigma", "eta0", "delta", "g", "mean"}


def build_system(family: str, count: int = 100, **params):
    """Construct a mean-field system by family name and scalar parameters.

    family "synaptic" takes sigma (uniform width) or alpha (+ optional
    support) plus eta0/delta/K/tau/mean; family "gap" takes sigma plus
    eta0/delta/g/mean.
    """
    if family == "synaptic":
        unknown = set(params) - _SYNAPTIC_PARAMS
        if unknown:
            raise ValueError(f"unknown synaptic parameters: {sorted(unknown)}")
        if "alpha" in params:
            params.pop("sigma", None)
            return beta_synaptic_system(count=count, **params)
        return uniform_synaptic_system(count=count, **params)
    if family == "gap":
        unknown = set(params) - _GAP_PARAMS
        if unknown:
            raise ValueError(f"unknown gap parameters: {sorted(unknown)}")
        return uniform_gap_system(count=count, **params)
    raise ValueError(f"unknown mean-field family {family!r}")


def parameter_rhs(family: str, param: str, count: int = 100, **fixed):
    """rhs(y, p) closure for continuation in one free parameter.

    Distribution parameters (sigma, alpha) rebuild the degree grid at every
    value; the grid size stays fixed, so the state dimension does too.
    """
    cache: dict[float, object] = {}

    def system_at(p):
        p = float(p)
        if p not in cache:
            if len(cache) > 1024:
                cache.clear()
            cache[p] = build_system(family, count=count, **{param: p, **fixed})
        return cache[p]

    def rhs(y, p):
        return system_at(p).rhs(y)

    rhs.system_at = system_at
    return rhs


def parameter_rhs2(family: str, param_p: str, param_q: str, count: int = 100, **fixed):
    """rhs(y, p, q) closure for two-parameter bifurcation-curve tracing."""
    cache: dict[tuple, object] = {}

    def system_at(p, q):
        key = (float(p), float(q))
        if key not in cache:
            if len(cache) > 1024:
                cache.clear()
            cache[key] = build_system(
                family, count=count, **{param_p: key[0], param_q: key[1], **fixed})
        return cache[key]

    def rhs(y, p, q):
        return system_at(p, q).rhs(y)

    rhs.system_at = system_at
    return rhs
