"""Reference parameter sets for the bundled figure recipes.

Frozen in one place so a table test can assert that recipe defaults use
them unchanged. Keys mirror config-file keys where one exists. Values
here are the source of truth; recipes read them, never restate them.
"""

from __future__ import annotations

from types import MappingProxyType

# single Morris-Lecar neuron fires for I0 above this (bisection, dt=0.01 ms)
ML_SINGLE_NEURON_THRESHOLD = 39.693455

THETA_EULER_DT = 0.001
ML_EULER_DT_MS = 0.01
MF_GRID_COUNT = 100

_REFERENCE = {
    # s(t) for reduced vs full synaptic model; oscillation at sigma=5,
    # steady state at sigma=50; out-degree width must not matter
    "fig1": {
        "eta0": 1.0, "delta": 0.05, "tau": 1.0, "K": -2.0,
        "mean_degree": 100.0, "n": 500,
        "sigma_narrow": 5.0, "sigma_wide": 50.0,
        "out_supports": ((10.0, 190.0), (50.0, 150.0), (90.0, 110.0)),
        "theta0": 0.0, "u0": 0.0, "dt": THETA_EULER_DT,
    },
    # Hopf curve in (sigma, tau) for the uniform in-degree family
    "fig2": {
        "eta0": 1.0, "delta": 0.05, "K": -2.0, "mean_degree": 100.0,
        "hopf_sigma_at_tau_1": 31.4,
    },
    # Hopf curve in (alpha, tau) for the shifted-beta in-degree family
    "fig3": {
        "eta0": 1.0, "delta": 0.05, "K": -2.0, "mean_degree": 100.0,
        "support": (50.0, 150.0), "inset_alphas": (3.0, 20.0),
    },
    # inhibitory Morris-Lecar grid: std of s_hat over (tau, sigma)
    "fig4": {
        "eps": -1.0, "I0": 41.0, "het_delta": 0.01, "n": 500,
        "out_support": (50.0, 150.0), "mean_degree": 100.0,
        "t_end": 50.0, "stats_window": 5.0, "dt": ML_EULER_DT_MS,
    },
    # excitatory fixed-point branches vs eta0 at two in-degree widths
    "fig5": {
        "delta": 0.05, "tau": 1.0, "K": 5.0, "mean_degree": 100.0,
        "sigmas": (10.0, 90.0),
    },
    # fold curves bounding the bistable region in (eta0, sigma)
    "fig6": {
        "delta": 0.05, "tau": 1.0, "K": 5.0, "mean_degree": 100.0,
    },
    # excitatory Morris-Lecar hysteresis: I0 swept up then down
    "fig7": {
        "eps": 25.0, "tau": 20.0, "n": 500, "het_delta": 0.01,
        "mean_degree": 100.0, "out_support": (50.0, 150.0),
        "sigmas": (10.0, 90.0),
        "t_per_value": 10.0, "stats_window": 2.0,
        "single_neuron_threshold": 39.69,
    },
    # gap-junction SNIC curve: onset eta0 rises with sigma
    "gap-snic": {
        "delta": 0.01, "g": 0.4, "mean_degree": 100.0,
    },
    # gap-junction Hopf curve: onset g falls with sigma
    "gap-hopf": {
        "delta": 0.05, "eta0": 0.2, "mean_degree": 100.0,
    },
    # gap Morris-Lecar network: std of V-driven s_hat vs eps
    "ml-gap-hopf": {
        "I0": 40.0, "het_delta": 0.5, "n": 2500, "mean_degree": 100.0,
        "discard": 10.0, "stats_window": 10.0,
    },
    # gap ML onset current vs sigma under non-Lorentzian heterogeneity
    "gap-snic-hetero": {
        "eps": 0.3, "n": 2500, "mean_degree": 100.0,
        "broad_uniform": (-0.5, 0.5), "broad_normal_sd": 1.0 / 3.0,
        "narrow_uniform": (-0.125, 0.125), "narrow_normal_sd": 0.1,
    },
    # gap ML Hopf onset vs sigma under Gaussian / uniform heterogeneity
    "gap-hopf-hetero": {
        "n": 2500, "mean_degree": 100.0, "uniform": (-1.0, 1.0),
        "discard": 10.0, "stats_window": 10.0, "bistable_sigma": 10.0,
    },
}

REFERENCE = MappingProxyType({k: MappingProxyType(v)
                              for k, v in _REFERENCE.items()})


def reference(recipe: str) -> dict:
    """Mutable copy of the reference parameters for one recipe."""
    return dict(REFERENCE[recipe])
