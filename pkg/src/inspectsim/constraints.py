"""Position and attitude barrier functions, their gradients, and the
boolean availability composition for the two star trackers plus camera.

Labels a1..a5 are fixed: (a1, a2) = star tracker 1 vs sun/Earth,
(a3, a4) = star tracker 2 vs sun/Earth, a5 = camera vs sun.
"""

from dataclasses import dataclass, field

import numpy as np

from .dynamics import skew
from .orbit import EnvironmentVectors

CONE_LABELS = ("a1", "a2", "a3", "a4", "a5")


@dataclass(frozen=True)
class EllipsoidObstacle:
    """One keep-out ellipsoid in frame O: center and semi-axes in meters."""

    center: np.ndarray
    semi_axes: np.ndarray
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "semi_axes", np.asarray(self.semi_axes, dtype=float))
        if np.any(self.semi_axes <= 0):
            raise ValueError(f"semi-axes must be positive, got {self.semi_axes}")


@dataclass(frozen=True)
class ConeConstraint:
    """One optical-axis exclusion cone.

    h = cos(half_angle) - V_I' R P_B >= 0 keeps the body axis P_B at least
    half_angle away from the environment direction V_I.
    """

    body_axis: np.ndarray
    env_vector_id: str  # "sun" or "earth"
    cos_half_angle: float
    label: str

    def __post_init__(self):
        axis = np.asarray(self.body_axis, dtype=float)
        n = np.linalg.norm(axis)
        if abs(n - 1.0) > 1e-9:
            raise ValueError("body axis must be a unit vector")
        object.__setattr__(self, "body_axis", axis)
        if self.env_vector_id not in ("sun", "earth"):
            raise ValueError(f"unknown environment vector {self.env_vector_id!r}")
        if abs(self.cos_half_angle) > 1.0:
            raise ValueError("|cos half-angle| must be <= 1")
        if self.label not in CONE_LABELS:
            raise ValueError(f"label must be one of {CONE_LABELS}")

    def env_vector(self, env: EnvironmentVectors) -> np.ndarray:
        return env.sun_dir_inertial if self.env_vector_id == "sun" else env.earth_dir_inertial


@dataclass(frozen=True)
class ActiveSet:
    """Almost-active attitude constraints whose gradients feed the angular
    velocity filter, plus the composed minimum."""

    members: tuple[str, ...]
    h_values: np.ndarray = field(default_factory=lambda: np.zeros(5))
    h_min: float = 0.0


def position_cbf(r: np.ndarray, obs: EllipsoidObstacle) -> tuple[float, np.ndarray]:
    """Ellipsoid barrier value and its gradient row (1x3) at position r."""
    d = (np.asarray(r, dtype=float) - obs.center) / obs.semi_axes
    h = float(np.dot(d, d) - 1.0)
    grad = 2.0 * d / obs.semi_axes
    return h, grad


def position_cbf_batch(
    r: np.ndarray, centers: np.ndarray, inv_semi_sq: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized barrier values (m,) and gradients (m,3) for all obstacles.

    inv_semi_sq holds 1/l^2 per obstacle and axis, precomputed by the caller.
    """
    d = r[None, :] - centers
    h = np.sum(d * d * inv_semi_sq, axis=1) - 1.0
    grads = 2.0 * d * inv_semi_sq
    return h, grads


def attitude_cbf(
    rot: np.ndarray, cone: ConeConstraint, env: EnvironmentVectors
) -> tuple[float, np.ndarray]:
    """Cone barrier value and gradient row Y such that h' = Y omega.

    h = cos(half_angle) - V_I' R P_B, Y = V_I' R P_B^x.
    Y vanishes when the axis is exactly aligned (or anti-aligned) with the
    environment vector; that degenerate row is still reported.
    """
    v_i = cone.env_vector(env)
    h = float(cone.cos_half_angle - v_i @ rot @ cone.body_axis)
    grad = v_i @ rot @ skew(cone.body_axis)
    return h, grad


def boolean_compose(h_values: np.ndarray) -> float:
    """Composed availability barrier:
    min(max(min(h_a1, h_a2), min(h_a3, h_a4)), h_a5)."""
    h = np.asarray(h_values, dtype=float)
    tracker1 = min(h[0], h[1])
    tracker2 = min(h[2], h[3])
    return float(min(max(tracker1, tracker2), h[4]))


def almost_active_set(h_values: np.ndarray, eps: float) -> ActiveSet:
    """Constraints within eps of the composed minimum, per the min/max chain.

    h1 = min(h_a1, h_a2); h2 = min(h_a3, h_a4); h3 = max(h1, h2);
    h4 = min(h3, h_a5). If |h4 - h3| <= eps the dominating star-tracker pair
    is selected (branch 1 on ties); if |h4 - h_a5| <= eps the camera
    constraint is selected. At least one condition always holds.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    h = np.asarray(h_values, dtype=float)
    h1 = min(h[0], h[1])
    h2 = min(h[2], h[3])
    h3 = max(h1, h2)
    h4 = min(h3, h[4])
    members: list[str] = []
    if abs(h4 - h3) <= eps:
        if h3 == h1:
            members += ["a1", "a2"]
        else:
            members += ["a3", "a4"]
    if abs(h4 - h[4]) <= eps:
        members.append("a5")
    assert members, "almost-active set cannot be empty for eps > 0"
    return ActiveSet(members=tuple(members), h_values=h, h_min=boolean_compose(h))
