"""Networks of coupled oscillators with heterogeneous degrees.

Spiking simulations (theta and Morris-Lecar neurons, synaptic or gap
coupling), degree-resolved mean-field reductions, pseudo-arclength
continuation with bifurcation detection, configuration-model network
generation, and reproducible figure recipes.

Submodules import lazily so the command line can configure thread pools
before numpy loads; `from thetanet import <name>` works for the public API
listed in __all__.
"""

from importlib import import_module

from .errors import ConfigError, NumericalError

__version__ = "0.1.0"

_SUBMODULES = ("cli", "config", "constants", "continuation", "distributions",
               "errors", "meanfield", "netgen", "netsim", "outputs",
               "recipes")

_EXPORTS = {
    # distributions
    "DegreeGrid": "distributions",
    "DegreeDistribution": "distributions",
    "HeterogeneityLaw": "distributions",
    "parse_degree_spec": "distributions",
    "parse_heterogeneity_spec": "distributions",
    # netgen
    "Network": "netgen",
    "configuration_model": "netgen",
    "sample_degree_sequences": "netgen",
    "repair_defects": "netgen",
    "generate_network": "netgen",
    "save_edge_list": "netgen",
    "load_edge_list": "netgen",
    # meanfield
    "firing_rate": "meanfield",
    "q_expectation": "meanfield",
    "q_fourier_coefficient": "meanfield",
    "w_transform": "meanfield",
    "w_inverse": "meanfield",
    "SynapticMeanField": "meanfield",
    "GapMeanField": "meanfield",
    "integrate": "meanfield",
    "build_system": "meanfield",
    "parameter_rhs": "meanfield",
    "parameter_rhs2": "meanfield",
    "uniform_synaptic_system": "meanfield",
    "beta_synaptic_system": "meanfield",
    "uniform_gap_system": "meanfield",
    "rhs_synaptic": "meanfield",
    "rhs_gap": "meanfield",
    # continuation
    "find_fixed_point": "continuation",
    "newton_solve": "continuation",
    "fd_jacobian": "continuation",
    "eigenvalues_at": "continuation",
    "continue_branch": "continuation",
    "detect_bifurcations": "continuation",
    "locate_bifurcation": "continuation",
    "find_bifurcations": "continuation",
    "trace_codim1_curve": "continuation",
    "Branch": "continuation",
    "BranchPoint": "continuation",
    "BifurcationPoint": "continuation",
    "Codim1Curve": "continuation",
    # netsim
    "TimeSeries": "netsim",
    "SummaryStats": "netsim",
    "ThetaSynapticSystem": "netsim",
    "ThetaGapSystem": "netsim",
    "MorrisLecarSystem": "netsim",
    "MLParams": "netsim",
    "single_theta_neuron": "netsim",
    "simulate_theta_synaptic": "netsim",
    "simulate_theta_gap": "netsim",
    "simulate_morris_lecar": "netsim",
    "single_neuron_fires": "netsim",
    "single_neuron_threshold": "netsim",
    "quasistatic_sweep": "netsim",
    "up_down_path": "netsim",
    "hysteresis_interval": "netsim",
    "HysteresisInterval": "netsim",
    "bisection_onset": "netsim",
    "estimate_period": "netsim",
    "circular_variance": "netsim",
    # config / outputs / recipes
    "ExperimentConfig": "config",
    "parse_range": "config",
    "write_csv": "outputs",
    "read_csv": "outputs",
    "read_csv_columns": "outputs",
    "svg_line_plot": "outputs",
    "svg_heatmap": "outputs",
    "emit_plot": "outputs",
    "write_manifest": "outputs",
    "run_recipe": "recipes",
    "grid_sweep": "recipes",
    "available_recipes": "recipes",
    "build_full_system": "recipes",
    "build_meanfield_from_config": "recipes",
}

__all__ = ["ConfigError", "NumericalError", "__version__",
           *_EXPORTS, *_SUBMODULES]


def __getattr__(name: str):
    if name in _SUBMODULES:
        module = import_module(f".{name}", __name__)
        globals()[name] = module
        return module
    if name in _EXPORTS:
        value = getattr(import_module(f".{_EXPORTS[name]}", __name__), name)
        globals()[name] = value
        return value
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(set(globals()) | set(__all__))
