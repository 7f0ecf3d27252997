"""Full spiking-network simulators and sweep protocols."""

from .morris_lecar import (
    DEFAULT_PARAMS,
    MLParams,
    MorrisLecarSystem,
    simulate_morris_lecar,
    single_neuron_fires,
    single_neuron_threshold,
)
from .protocols import (
    HysteresisInterval,
    SummaryStats,
    TimeSeries,
    bisection_onset,
    circular_variance,
    estimate_period,
    hysteresis_interval,
    quasistatic_sweep,
    trailing_stats,
    up_down_path,
)
from .theta import (
    ThetaGapSystem,
    ThetaSynapticSystem,
    simulate_theta_gap,
    simulate_theta_synaptic,
    single_theta_neuron,
)

__all__ = [
    "DEFAULT_PARAMS",
    "HysteresisInterval",
    "MLParams",
    "MorrisLecarSystem",
    "SummaryStats",
    "ThetaGapSystem",
    "ThetaSynapticSystem",
    "TimeSeries",
    "bisection_onset",
    "circular_variance",
    "estimate_period",
    "hysteresis_interval",
    "quasistatic_sweep",
    "simulate_morris_lecar",
    "simulate_theta_gap",
    "simulate_theta_synaptic",
    "single_neuron_fires",
    "single_neuron_threshold",
    "single_theta_neuron",
    "trailing_stats",
    "up_down_path",
]
