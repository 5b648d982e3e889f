"""Checkpoint sequencing: desired position/pointing per leg and arrival logic.

A checkpoint is reached once the position error and pointing error stay
below their thresholds continuously for the dwell time; the mission then
advances to the next checkpoint and completes after the last one.
"""

from dataclasses import dataclass, replace

import numpy as np

from .orbit import OrbitStateAtTime


@dataclass(frozen=True)
class Checkpoint:
    position_m: np.ndarray       # frame O
    pointing_dir_O: np.ndarray   # unit vector, frame O

    def __post_init__(self):
        object.__setattr__(self, "position_m", np.asarray(self.position_m, dtype=float))
        p = np.asarray(self.pointing_dir_O, dtype=float)
        n = np.linalg.norm(p)
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"pointing direction must be unit norm, got ||p||={n}")
        object.__setattr__(self, "pointing_dir_O", p)


@dataclass(frozen=True)
class ArrivalCriteria:
    position_tol_m: float = 0.1
    pointing_tol_deg: float = 2.0
    dwell_s: float = 30.0


@dataclass(frozen=True)
class MissionState:
    checkpoints: tuple[Checkpoint, ...]
    criteria: ArrivalCriteria = ArrivalCriteria()
    current_index: int = 0
    dwell_elapsed_s: float = 0.0
    completed: bool = False

    def __post_init__(self):
        if not self.checkpoints:
            raise ValueError("mission needs at least one checkpoint")
        if not (0 <= self.current_index < len(self.checkpoints)):
            raise ValueError("checkpoint index out of range")

    @property
    def current(self) -> Checkpoint:
        return self.checkpoints[self.current_index]


def desired_setpoint(
    mission: MissionState, orbit_state: OrbitStateAtTime
) -> tuple[np.ndarray, np.ndarray]:
    """Desired position r_d (frame O) and inertial pointing direction Gamma_I.

    The pointing direction is fixed in frame O and re-rotated to inertial
    every step as the frame turns; a completed mission holds the terminal
    setpoint.
    """
    cp = mission.current
    gamma_i = orbit_state.rot_vvlh_to_inertial @ cp.pointing_dir_O
    return cp.position_m.copy(), gamma_i


def advance(
    mission: MissionState, r_e: np.ndarray, pointing_err_deg: float, dt: float
) -> MissionState:
    """Update dwell bookkeeping and switch checkpoints when both errors have
    stayed inside tolerance for the full dwell time."""
    if mission.completed:
        return mission
    crit = mission.criteria
    inside = (float(np.linalg.norm(r_e)) <= crit.position_tol_m
              and pointing_err_deg <= crit.pointing_tol_deg)
    if not inside:
        return replace(mission, dwell_elapsed_s=0.0)
    dwell = mission.dwell_elapsed_s + dt
    if dwell < crit.dwell_s:
        return replace(mission, dwell_elapsed_s=dwell)
    if mission.current_index + 1 < len(mission.checkpoints):
        return replace(mission, current_index=mission.current_index + 1, dwell_elapsed_s=0.0)
    return replace(mission, completed=True, dwell_elapsed_s=0.0)
