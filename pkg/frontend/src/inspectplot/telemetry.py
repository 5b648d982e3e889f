"""Telemetry CSV parsing against the documented public schema.

Layout: a comment line ``# inspectsim-telemetry-schema: <version>``, a
header row of column names, then one row of floats per simulation step.
The position-barrier columns ``h_p_1 .. h_p_N`` vary in count with the
scenario's obstacle set; everything else is fixed.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass

import numpy as np

SCHEMA_VERSION = 1
_SCHEMA_RE = re.compile(r"^#\s*inspectsim-telemetry-schema:\s*(\d+)\s*$")

# every column the figures rely on, except the variable-count h_p_* group
REQUIRED_COLUMNS = (
    ["t"]
    + [f"r_{ax}" for ax in "xyz"]
    + [f"v_{ax}" for ax in "xyz"]
    + [f"omega_{ax}" for ax in "xyz"]
    + [f"omega_s_{ax}" for ax in "xyz"]
    + [f"h_a{i}" for i in range(1, 6)]
    + ["h_min", "active_mask", "checkpoint", "pointing_err_deg"]
)


class SchemaError(ValueError):
    """Telemetry file does not match the documented CSV schema."""


@dataclass(frozen=True)
class Telemetry:
    columns: tuple[str, ...]
    data: np.ndarray  # shape (n_steps, n_columns); n_steps may be 0

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    @property
    def h_p_columns(self) -> tuple[str, ...]:
        return tuple(c for c in self.columns if re.fullmatch(r"h_p_\d+", c))

    @property
    def empty(self) -> bool:
        return self.data.shape[0] == 0


def load_telemetry(path) -> Telemetry:
    """Parse a telemetry CSV, validating schema version and column set."""
    with open(path, newline="") as fh:
        first = fh.readline()
        m = _SCHEMA_RE.match(first.strip())
        if m is None:
            raise SchemaError(
                "missing schema comment line; expected "
                f"'# inspectsim-telemetry-schema: {SCHEMA_VERSION}'"
            )
        version = int(m.group(1))
        if version != SCHEMA_VERSION:
            raise SchemaError(
                f"telemetry schema version {version} not supported "
                f"(expected {SCHEMA_VERSION})"
            )
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("missing header row") from None
        columns = tuple(name.strip() for name in header)
        missing = [c for c in REQUIRED_COLUMNS if c not in columns]
        if missing:
            raise SchemaError(f"missing required columns: {', '.join(missing)}")
        rows = []
        for lineno, row in enumerate(reader, start=3):
            if not row:
                continue
            if len(row) != len(columns):
                raise SchemaError(
                    f"line {lineno}: expected {len(columns)} values, got {len(row)}"
                )
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise SchemaError(f"line {lineno}: {exc}") from None
    data = (np.array(rows, dtype=float) if rows
            else np.empty((0, len(columns)), dtype=float))
    return Telemetry(columns=columns, data=data)
