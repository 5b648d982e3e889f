"""Deterministic simulation of cascaded barrier-filtered inspection control.

The package simulates a servicing spacecraft holding station around a large
satellite: nominal proportional guidance is filtered through small
quadratic programs that enforce position keep-out ellipsoids and attitude
pointing cones as control barrier constraints, a nonlinear disturbance
observer compensates slowly varying disturbances, and the closed loop is
integrated with fixed-step RK4 on the full translational/attitude dynamics
in the target's orbital frame.
"""

__version__ = "1.0.0"

from .config import (  # noqa: F401
    BUILTIN_SCENARIOS,
    ConfigError,
    ScenarioConfig,
    load_builtin,
    load_config,
    parse_config,
)
from .simulate import (  # noqa: F401
    SimulationResult,
    SummaryReport,
    run,
    telemetry_columns,
    write_telemetry,
)
