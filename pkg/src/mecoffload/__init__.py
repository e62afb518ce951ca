"""Energy-optimal multiuser MEC offloading when tasks need data held at the server."""

from .analysis import MeanTimeParams, expected_L_max, max_offloading_users, mean_total_time, rate_comparison, theta
from .bilp import BilpInstance, BilpSolution, exhaustive_solve, relaxation_bound, solve
from .channel import (
    FadingParams,
    RadioParams,
    downlink_rate,
    inversion_powers,
    sample_fading,
    uplink_rate_general,
    uplink_rate_inversion,
)
from .energy_time import DecisionVector, evaluate, linearize, total_energy, total_time
from .optimizer import SolveOutcome, brute_force, min_feasible_tau, optimize
from .simharness import SweepSpec, emit, run_sweep
from .taskmodel import OutputSizeMap, Scenario, ScenarioDistribution, SystemConfig, UserTask, output_size, sample_scenario

__version__ = "0.1.0"
