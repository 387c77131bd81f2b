"""Deterministic simulator and analytics for blockchain-enabled vehicle fleets.

The library quantifies what distributed clustering saves over full-broadcast
ledger dissemination: per-vehicle energy accounting, connectivity and
constraint models, closed-form decay/transaction analytics with numerical
oracles, an optimal-stopping cluster-head controller, and a paired
baseline/clustered simulator.
"""

from .analytics import (
    DecayParams,
    GaussianRate,
    InfeasibleRateError,
    TxCountParams,
    conservation_factor,
    energy_decay,
    energy_decay_at_rates,
    energy_decay_synchronized,
    estimate_synchronized_rate,
    invert_rate,
    peak_frequency,
    rate_frequency,
    transaction_count,
)
from .controller import (
    Candidate,
    ChDecision,
    ControllerConfig,
    FleetState,
    OstObservation,
    TraceRow,
    decide,
    ost_score,
    ost_threshold,
    pre_decay_check,
    run_controller,
)
from .energy import (
    EnergyLedger,
    EnergyParams,
    HestonParams,
    heston_step,
    ledger_update_energy,
    total_blockchain_energy,
    transmission_energy,
)
from .mobility import (
    ConnectivityParams,
    ConstraintReport,
    ConstraintSet,
    MobilityModel,
    check_constraints,
    in_range_probability,
    transfer_function,
)
from .scenario import ConfigError, Scenario, SweepAxis, expand, load_scenario
from .sim import (
    Comparison,
    RunReport,
    SimConfig,
    VehicleState,
    compare_reports,
    comparison_csv,
    paired_comparison,
    run,
    run_baseline,
    run_clustered,
    run_report_csv,
)
from .validate import ValidationReport, run_validation

__version__ = "0.1.0"

__all__ = [
    "Candidate",
    "ChDecision",
    "Comparison",
    "ConfigError",
    "ConnectivityParams",
    "ConstraintReport",
    "ConstraintSet",
    "ControllerConfig",
    "DecayParams",
    "EnergyLedger",
    "EnergyParams",
    "FleetState",
    "GaussianRate",
    "HestonParams",
    "InfeasibleRateError",
    "MobilityModel",
    "OstObservation",
    "RunReport",
    "Scenario",
    "SimConfig",
    "SweepAxis",
    "TraceRow",
    "TxCountParams",
    "ValidationReport",
    "VehicleState",
    "check_constraints",
    "compare_reports",
    "comparison_csv",
    "conservation_factor",
    "decide",
    "energy_decay",
    "energy_decay_at_rates",
    "energy_decay_synchronized",
    "estimate_synchronized_rate",
    "expand",
    "heston_step",
    "in_range_probability",
    "invert_rate",
    "ledger_update_energy",
    "load_scenario",
    "ost_score",
    "ost_threshold",
    "paired_comparison",
    "peak_frequency",
    "pre_decay_check",
    "rate_frequency",
    "run",
    "run_baseline",
    "run_clustered",
    "run_controller",
    "run_report_csv",
    "total_blockchain_energy",
    "transaction_count",
    "transfer_function",
    "transmission_energy",
]
