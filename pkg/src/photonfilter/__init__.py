"""Photon-number filtering of a cavity field by two-level atoms in flight.

A resonant atom crossing the cavity sees a coupling pulse g(t) set by the
mode profile along its path.  Detecting the atom's final state applies a
photon-number-dependent filter to the field; repeating the process sharpens
the photon statistics toward a chosen number.  This package builds the
coupling pulses, integrates the per-photon-number two-level dynamics,
applies the measurement updates, and drives the bundled experiments.
"""

from .dynamics import (BlockAmplitudes, DetunedDrive, FilterFunction,
                       FilterSource, NonConvergence, analytic_rosen_zener,
                       analytic_zero_detuning, filter_function,
                       integrate_block, norm_defect_history, read_filter,
                       rosen_zener_maxima, step_halving_change, write_filter)
from .experiments import (EXPERIMENT_KINDS, ExperimentConfig,
                          FeasibilityEstimate, RunRecord, default_config,
                          feasibility, run)
from .field import (ImpossibleOutcome, MeasurementOutcome, PhotonDistribution,
                    TruncationTooSmall, apply_measurement, apply_sequence,
                    default_n_max, poisson_distribution, read_distribution,
                    write_distribution)
from .pulses import (AreaMethod, PulseArea, PulseKind, PulseShape, area,
                     area_quadrature, edge_steepness, gaussian, lorentzian,
                     make_equal_area_suite, make_microwave, rosen_zener,
                     square_wave)
from .stats import Classification, DistributionStats, UndefinedQ, classify, moments

__version__ = "0.1.0"

__all__ = [
    "AreaMethod",
    "BlockAmplitudes",
    "Classification",
    "DetunedDrive",
    "DistributionStats",
    "EXPERIMENT_KINDS",
    "ExperimentConfig",
    "FeasibilityEstimate",
    "FilterFunction",
    "FilterSource",
    "ImpossibleOutcome",
    "MeasurementOutcome",
    "NonConvergence",
    "PhotonDistribution",
    "PulseArea",
    "PulseKind",
    "PulseShape",
    "RunRecord",
    "TruncationTooSmall",
    "UndefinedQ",
    "analytic_rosen_zener",
    "analytic_zero_detuning",
    "apply_measurement",
    "apply_sequence",
    "area",
    "area_quadrature",
    "classify",
    "default_config",
    "default_n_max",
    "edge_steepness",
    "feasibility",
    "filter_function",
    "gaussian",
    "integrate_block",
    "lorentzian",
    "make_equal_area_suite",
    "make_microwave",
    "moments",
    "norm_defect_history",
    "poisson_distribution",
    "step_halving_change",
    "read_distribution",
    "read_filter",
    "rosen_zener",
    "rosen_zener_maxima",
    "run",
    "square_wave",
    "write_distribution",
    "write_filter",
    "__version__",
]
