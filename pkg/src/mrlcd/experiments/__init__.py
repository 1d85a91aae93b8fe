"""Seeded experiments, their configuration, reports and the command-line interface."""

from .config import ExperimentConfig, load_config
from .report import SCHEMA_VERSION, ExperimentReport
from .runners import (
    bareiss_det,
    decoupling_sides,
    replacement_ratio,
    run_decoupling_check,
    run_denominator_check,
    run_lcd,
    run_mrlcd,
    run_quadratic_smallball,
    run_replacement_check,
    run_round,
    run_singularity,
    run_structure_scan,
    run_sval_tail,
    run_tensorization_check,
    run_threshold,
    singularity_exact,
)
