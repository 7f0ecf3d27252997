"""Recorded time series, window statistics, and sweep protocols.

The sweeps mirror the experimental protocols used throughout: quasistatic
parameter paths with state carried between values (for hysteresis), and
bisection on a fires/rests classifier (for onset thresholds).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TimeSeries:
    """One recorded scalar observable plus optional firing events.

    spikes has one (time, neuron index) row per firing, in time order.
    """

    t: np.ndarray
    values: np.ndarray
    label: str = "s_hat"
    spikes: np.ndarray | None = None

    def trailing(self, window: float) -> tuple[float, float]:
        """(mean, std) of the observable over the last `window` time units."""
        mask = self.t >= self.t[-1] - window
        if not mask.any():
            raise ValueError("trailing window contains no samples")
        vals = self.values[mask]
        return float(vals.mean()), float(vals.std())

    def spike_count(self, t_min: float = -np.inf) -> int:
        if self.spikes is None or self.spikes.size == 0:
            return 0
        return int((self.spikes[:, 0] >= t_min).sum())

    def spiking_fraction(self, n: int, t_min: float = -np.inf) -> float:
        """Fraction of the n neurons that fire at least once after t_min."""
        if self.spikes is None or self.spikes.size == 0:
            return 0.0
        hot = self.spikes[self.spikes[:, 0] >= t_min, 1]
        return np.unique(hot.astype(int)).size / n


def trailing_stats(t: np.ndarray, values: np.ndarray,
                   window: float) -> tuple[float, float]:
    return TimeSeries(np.asarray(t), np.asarray(values)).trailing(window)


@dataclass(frozen=True)
class SummaryStats:
    """Trailing-window statistics of the order parameter at one sweep value."""

    param: float
    mean: float
    std: float
    window: float
    series: TimeSeries | None = None


def quasistatic_sweep(system, param: str, values, t_per_value: float,
                      stats_window: float, dt: float | None = None,
                      record_every: int | None = None,
                      keep_series: bool = False) -> list:
    """Advance a simulation along a parameter path without state resets.

    `param` names a scalar attribute of the system (e.g. "I0", "K", "g").
    Returns one SummaryStats per path value, in path order; up-then-down paths
    expose hysteresis because the state is carried over.
    """
    if not hasattr(system, param):
        raise AttributeError(f"system has no parameter {param!r}")
    out = []
    for value in values:
        setattr(system, param, float(value))
        series = system.advance(t_per_value, dt=dt, record_every=record_every,
                                record_spikes=False)
        mean, std = series.trailing(stats_window)
        out.append(SummaryStats(float(value), mean, std, stats_window,
                                series if keep_series else None))
    return out


def up_down_path(lo: float, hi: float, step: float) -> np.ndarray:
    """Quasistatic path lo -> hi -> lo inclusive, with the peak not repeated."""
    if not (hi > lo and step > 0):
        raise ValueError("need hi > lo and step > 0")
    up = np.arange(lo, hi + step / 2, step)
    return np.concatenate([up, up[-2::-1]])


@dataclass(frozen=True)
class HysteresisInterval:
    up_jump: float
    down_jump: float

    @property
    def width(self) -> float:
        return self.up_jump - self.down_jump


def hysteresis_interval(up_stats: list, down_stats: list,
                        level: float) -> HysteresisInterval:
    """Jump locations from an up sweep and a down sweep of SummaryStats.

    The up jump is the first path value whose trailing mean reaches `level`;
    the down jump is the smallest value on the way down that still holds it.
    """
    up_on = [s.param for s in up_stats if s.mean >= level]
    down_on = [s.param for s in down_stats if s.mean >= level]
    if not up_on or not down_on:
        raise ValueError("order parameter never reaches the level on one sweep")
    return HysteresisInterval(up_jump=min(up_on), down_jump=min(down_on))


def bisection_onset(system, param: str, lo: float, hi: float, t_run: float,
                    tol: float = 1e-3, dt: float | None = None,
                    settle: float = 0.0, classify=None,
                    firing_fraction: float = 0.5) -> float:
    """Bisect on a fires/rests classifier between parameter values lo and hi.

    Each trial resets the system to its initial state, so trials are
    independent. The default classifier calls the run "firing" when more than
    `firing_fraction` of the neurons spike after the settle time. Requires
    rest at lo and firing at hi.
    """
    if classify is None:
        def classify(series, sys):
            t_min = series.t[0] + settle
            return series.spiking_fraction(sys.n, t_min) > firing_fraction

    def fires(value) -> bool:
        system.reset()
        setattr(system, param, float(value))
        series = system.advance(t_run, dt=dt, record_spikes=True)
        return bool(classify(series, system))

    if fires(lo):
        raise ValueError(f"already firing at the lower bracket {lo:g}")
    if not fires(hi):
        raise ValueError(f"still at rest at the upper bracket {hi:g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fires(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def estimate_period(t: np.ndarray, values: np.ndarray,
                    window: float | None = None) -> float:
    """Oscillation period by autocorrelation peak with parabolic refinement.

    Uses the trailing `window` (whole series if None); the first maximum after
    the autocorrelation's first zero crossing sets the period. Raises if the
    signal has no oscillation to measure.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(values, dtype=float)
    if window is not None:
        mask = t >= t[-1] - window
        t, x = t[mask], x[mask]
    if t.size < 8:
        raise ValueError("too few samples for a period estimate")
    dt_rec = float(np.median(np.diff(t)))
    x = x - x.mean()
    power = float(x @ x)
    if power <= 0 or np.sqrt(power / x.size) < 1e-12:
        raise ValueError("signal is constant; no period")
    r = np.correlate(x, x, mode="full")[x.size - 1:]
    r /= r[0]
    below = np.where(r < 0)[0]
    if below.size == 0:
        raise ValueError("autocorrelation never decays; no period found")
    start = below[0]
    lag = start + int(np.argmax(r[start:]))
    if lag <= 0 or lag >= r.size - 1:
        raise ValueError("autocorrelation peak at the window edge")
    denom = r[lag - 1] - 2.0 * r[lag] + r[lag + 1]
    shift = 0.5 * (r[lag - 1] - r[lag + 1]) / denom if denom != 0 else 0.0
    return float((lag + shift) * dt_rec)


def circular_variance(theta: np.ndarray) -> float:
    """1 - |mean resultant| of phases; 0 for perfect synchrony."""
    return float(1.0 - np.abs(np.exp(1j * np.asarray(theta)).mean()))
