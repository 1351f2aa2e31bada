"""Secure precise wireless transmission simulator.

Library and CLI for building random subcarrier-to-antenna mappings
(linear/quadratic/prime index pools plus a randomization procedure),
evaluating the resulting receive-SINR surface over angle and distance,
auditing plans for coherent-combination leaks, and computing
pattern-guessing interception probabilities.
"""

__version__ = "0.1.0"

from .field import Grid, PeakReport, SinrField, compute_field, find_peaks, leakage_fraction
from .intercept import (InterceptReport, SweepRow, log10_intercept_prob, sweep_vs_ns,
                        sweep_vs_nt)
from .leaks import (LeakGeometryError, LeakReport, alignment_residual, audit_spacings,
                    detect_affine_pattern, predict_illegal_position,
                    sweep_illegal_positions)
from .model import (Position, SubcarrierPlan, SystemConfig, an_vector, bob_sinr,
                    element_distance, sinr, steering_gain, steering_phase,
                    steering_vector, to_db)
from .pools import (SubcarrierPool, build_lss, build_pool, build_pss, build_qss,
                    select_random)
from .randomize import (RpExhaustedError, RpParams, RpTrace, block_interleave, build_plan,
                        calibrate_threshold, choose_block_dims, mod_partition_order,
                        random_metric, randomize)

__all__ = [
    "__version__",
    "Grid", "PeakReport", "SinrField", "compute_field", "find_peaks", "leakage_fraction",
    "InterceptReport", "SweepRow", "log10_intercept_prob", "sweep_vs_ns", "sweep_vs_nt",
    "LeakGeometryError", "LeakReport", "alignment_residual", "audit_spacings",
    "detect_affine_pattern", "predict_illegal_position", "sweep_illegal_positions",
    "Position", "SubcarrierPlan", "SystemConfig", "an_vector", "bob_sinr",
    "element_distance", "sinr", "steering_gain", "steering_phase", "steering_vector",
    "to_db",
    "SubcarrierPool", "build_lss", "build_pool", "build_pss", "build_qss", "select_random",
    "RpExhaustedError", "RpParams", "RpTrace", "block_interleave", "build_plan",
    "calibrate_threshold", "choose_block_dims", "mod_partition_order", "random_metric",
    "randomize",
]
