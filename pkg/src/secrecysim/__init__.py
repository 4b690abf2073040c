"""Secrecy capacity and intercept probability of direct, relay, antenna-selection
and multiuser transmission over Rayleigh fading."""

from .channel import FadingParams, SeedSpec, TrialGains, db_to_linear, draw_trial_gains, mer_to_sigma_se2
from .errors import ConfigError, InsufficientResolutionError, InvalidParameterError, NoRelayError
from .estimator import (
    Estimate,
    SchemeSpec,
    direct_intercept_closed_form,
    ergodic_secrecy_capacity,
    estimate_curve,
    intercept_probability,
)
from .schemes import TrialOutcome
from .sweep import ScenarioConfig, SweepResult, emit_csv, estimate_diversity_slope, run_sweep

__version__ = "0.1.0"
