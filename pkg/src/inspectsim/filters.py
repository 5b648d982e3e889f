"""Safe velocity / safe angular velocity generation.

Nominal virtual controls are proportional laws; the safety filters project
them onto the constraint polytopes assembled from the barrier values and
gradients (one row per position obstacle, one row per almost-active attitude
cone), with a robustness margin gamma * ||Y|| per row covering the
disturbance estimation error.
"""

from dataclasses import dataclass

import numpy as np

from . import qp
from .constraints import ActiveSet


@dataclass(frozen=True)
class FilterParams:
    alpha_p: float = 0.55
    alpha_a: float = 0.6
    gamma_p: float = 0.01
    gamma_a: float = 0.001
    v_max: float = 0.2          # m/s, symmetric per-axis box
    omega_max_deg_s: float = 2.0  # deg/s, symmetric per-axis box
    eps: float = 0.05           # almost-active tolerance

    def __post_init__(self):
        if self.alpha_p <= 0 or self.alpha_a <= 0:
            raise ValueError("class-K gains must be positive")
        if self.gamma_p < 0 or self.gamma_a < 0:
            raise ValueError("robustness margins must be nonnegative")
        if self.v_max <= 0 or self.omega_max_deg_s <= 0:
            raise ValueError("velocity boxes must be nonempty")
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    @property
    def omega_max(self) -> float:
        return float(np.radians(self.omega_max_deg_s))


@dataclass(frozen=True)
class FilterResult:
    value: np.ndarray
    degraded: bool   # infeasible QP; value is the least-violating fallback
    kkt_residual: float


def nominal_velocity(r_e: np.ndarray, k_p1: float) -> np.ndarray:
    """Proportional virtual velocity command v_c = -k_p1 * r_e."""
    return -k_p1 * np.asarray(r_e, dtype=float)


def nominal_angular_velocity(
    rot: np.ndarray, gamma_inertial: np.ndarray, p_b3: np.ndarray, k_a1: float
) -> np.ndarray:
    """Reduced-attitude virtual rate omega_c = k_a1 * (P_B3 x Gamma).

    Gamma is the desired pointing direction expressed in the body frame.
    Rotates the boresight P_B3 toward Gamma; the anti-aligned configuration
    is a (measure-zero) stationary point. ||omega_c|| = k_a1 sin(angle).
    """
    gamma_body = rot.T @ np.asarray(gamma_inertial, dtype=float)
    return k_a1 * np.cross(np.asarray(p_b3, dtype=float), gamma_body)


def safe_velocity(
    v_c: np.ndarray,
    h_values: np.ndarray,
    gradients: np.ndarray,
    params: FilterParams,
) -> FilterResult:
    """Project v_c onto the box plus one barrier row per obstacle:
    Y_pi v >= -alpha_p h_pi + gamma_p ||Y_pi||."""
    rows = tuple(
        (gradients[i], -params.alpha_p * h_values[i]
         + params.gamma_p * float(np.linalg.norm(gradients[i])))
        for i in range(len(h_values))
    )
    problem = qp.QpProblem(
        target=v_c,
        lb=np.full(3, -params.v_max),
        ub=np.full(3, params.v_max),
        ineq_rows=rows,
    )
    sol = qp.solve(problem)
    if sol.status == qp.STATUS_OPTIMAL:
        return FilterResult(value=sol.x, degraded=False, kkt_residual=sol.kkt_residual)
    return FilterResult(value=qp.least_violating_point(problem), degraded=True,
                        kkt_residual=float("inf"))


def safe_angular_velocity(
    omega_c: np.ndarray,
    omega: np.ndarray,
    active: ActiveSet,
    cone_axes: dict[str, np.ndarray],
    cone_gradients: dict[str, np.ndarray],
    params: FilterParams,
) -> FilterResult:
    """Project omega_c onto the box plus one row per almost-active cone:
    Y_ai w >= -alpha_a h_ai + ||omega|| ||P_Bi x omega|| + gamma_a ||Y_ai||.

    The ||omega||^2 sin(theta_i) term bounds the gradient drift of the cone
    constraint and is evaluated as ||omega|| * ||P_Bi x omega||.
    """
    omega = np.asarray(omega, dtype=float)
    label_index = {"a1": 0, "a2": 1, "a3": 2, "a4": 3, "a5": 4}
    omega_norm = float(np.linalg.norm(omega))
    rows = []
    for label in active.members:
        y = cone_gradients[label]
        h = float(active.h_values[label_index[label]])
        drift = omega_norm * float(np.linalg.norm(np.cross(cone_axes[label], omega)))
        rows.append((y, -params.alpha_a * h + drift
                     + params.gamma_a * float(np.linalg.norm(y))))
    problem = qp.QpProblem(
        target=omega_c,
        lb=np.full(3, -params.omega_max),
        ub=np.full(3, params.omega_max),
        ineq_rows=tuple(rows),
    )
    sol = qp.solve(problem)
    if sol.status == qp.STATUS_OPTIMAL:
        return FilterResult(value=sol.x, degraded=False, kkt_residual=sol.kkt_residual)
    return FilterResult(value=qp.least_violating_point(problem), degraded=True,
                        kkt_residual=float("inf"))
