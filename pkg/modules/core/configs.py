"""
This module contains the unchanging variables used throughout the toolkit, plus the runtime settings read from the environment.

Structure:
    numerical_tolerances dictionary ->
    tolerances for orthonormality, pruning, degeneracy and passivity checks

    validity_thresholds dictionary ->
    soft and hard guards of the rotating-wave model (mode resolution, drive strength, tone matching)

    oracle_defaults, feasibility_limits, optimizer_defaults, perturbation_defaults dictionaries ->
    defaults for the analysis modules

    cli_settings dictionary ->
    unit conversion, CSV header and file naming used at the command-line boundary

    RuntimeSettings ->
    environment-driven settings (RBSKIT_THREADS, RBSKIT_LOG_LEVEL), optionally from a .env file
"""


# Standard Library Imports
import math

# Third-Party Library Imports
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


#################################################################### General Configs ###########################################################################


numerical_tolerances = {
    'orthonormality': 1e-12,
    'completeness': 1e-12,
    'prune': 1e-12,                # pattern weights below this are dropped
    'degeneracy': 1e-9,            # relative to max |omega|
    'unitarity': 1e-12,
    'hermiticity': 1e-12,
    'passivity': 1e-10,            # transfer-matrix column norms may exceed 1 by this much
    'singular_pivot': 1e-13,       # relative LU pivot floor
}

validity_thresholds = {
    'resolution_warning_fraction': 0.2,    # warn when a linewidth exceeds splitting / 5
    'drive_warning_fraction': 0.5,         # warn when eps >= half the consecutive splitting (eps >= u)
    'drive_error_fraction': 1.0,           # hard error at eps >= consecutive splitting (eps >= 2u)
    'detuning_tolerance_fraction': 0.01,   # tone within 1% of a splitting counts as resonant
    'input_tolerance_fraction': 0.01,      # input carrier within 1% of the min splitting of a mode
    'composer_overlap_linewidths': 3.0,
    'operating_point_tolerance': 1e-6,     # relative, used by NotAtGCC / NotAt5050
}


############################################################ Analysis Defaults #########################################################


oracle_defaults = {
    'duration_linewidths': 60.0,       # duration = 60 / kappa_min
    'min_duration_linewidths': 20.0,
    'rtol': 1e-9,
    'atol': 1e-12,
    'transient_fraction': 0.5,
    'method': 'RK45',
    'samples_per_fastest_period': 16,
    'min_samples': 4096,
    'min_beat_periods': 4,
    'max_attempts': 3,
}

feasibility_limits = {
    'max_search_nodes': 16,
    'triangle_free_coefficient': 1.65,
    'known_search_max_nodes': 36,
    'property1_rel_tol': 1e-8,
    'property2_abs_tol': 1e-8,
}

optimizer_defaults = {
    'starts': 10,
    'seed': 20240607,
    'residual_tolerance': 1e-10,
    'upper_bound_factor': 10.0,
    'nelder_mead_options': {'xatol': 1e-12, 'fatol': 1e-20, 'maxiter': 4000},
}

perturbation_defaults = {
    'scales': (1e-4, 1e-2),     # relative to the smallest coupling
    'scale_samples': 5,
    'slope_threshold': 1.5,
    'warning_fraction': 0.1,
    'seed': 7,
    'residual_floor': 1e-14,
}


############################################################ CLI #########################################################


cli_settings = {
    'ghz_to_rad': 2.0 * math.pi * 1e9,
    'csv_header': ['eps_ghz', 'port_in', 'port_out', 're', 'im', 'abs2'],
    'marker_suffix': '.markers.json',
    'plot_suffix': '.plot.py',
    'default_samples': 201,
}


class RuntimeSettings(BaseSettings):
    """Settings read from RBSKIT_* environment variables or a local .env file."""

    model_config = SettingsConfigDict(env_prefix='RBSKIT_', env_file='.env', extra='ignore')

    threads: int = Field(default=4, ge=1)
    log_level: str = 'INFO'


settings = RuntimeSettings()

# Global ThreadPoolExecutors (Initialized in initialize_executors)
sweep_executor = None
executor_list = []
