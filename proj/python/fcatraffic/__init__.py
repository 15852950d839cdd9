"""Fuzzy cellular automaton and Nagel-Schreckenberg traffic models."""

from ._core import (
    BoundPolicy,
    Calibration,
    Error,
    Model,
    PercentileSummary,
    RuleTable,
    Scenario,
    SimulationConfig,
    SignalPlan,
    TrajectoryLog,
    TriangularFuzzy,
    alpha_for_saturation,
    build_arterial,
    build_saturated_queue,
    builtin_rule,
    calibrate_alpha,
    component_travel_times,
    fuzzy_queue_saturation_flow,
    fuzzy_travel_time,
    fuzzy_vehicle_count,
    make_calibration,
    make_custom_rule,
    nasch_saturation_samples,
    parse_config,
    percentile,
    queue_discharge_trace,
    run_fuzzy,
    run_nasch,
    saturation_of_alpha,
    summarize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
