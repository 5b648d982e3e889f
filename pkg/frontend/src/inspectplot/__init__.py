"""Batch figure rendering for inspection-mission telemetry CSV logs.

Consumes only the documented telemetry CSV schema (version comment line,
header row, float rows); no in-process coupling to the simulation package.
"""

from inspectplot.telemetry import (
    SCHEMA_VERSION,
    SchemaError,
    Telemetry,
    load_telemetry,
)
from inspectplot.figures import FIGURES, PlotJob, render

__version__ = "1.0.0"

__all__ = [
    "FIGURES",
    "PlotJob",
    "SCHEMA_VERSION",
    "SchemaError",
    "Telemetry",
    "load_telemetry",
    "render",
]
