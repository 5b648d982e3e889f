"""Velocity-tracking force/torque laws and the runtime safety monitors.

Both controllers share the same three-term structure: dynamics feedforward,
safety correction toward the filtered velocity, and disturbance rejection
from the observer estimate. The monitors log the safety functions
B_p = Y_p v + alpha_p h_p and B_a = Y_a omega + alpha_a h_a, whose
nonnegativity certifies the barrier conditions at the dynamics level.
"""

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ControllerGains:
    k_p1: float = 0.55
    k_p2: float = 0.2
    k_a1: float = 0.2
    k_a2: float = 1.1

    def __post_init__(self):
        for name in ("k_p1", "k_p2", "k_a1", "k_a2"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def check_stability_conditions(self, alpha_p: float, kappa_1: float = 1.0) -> list[str]:
        """Sufficient-condition check (analysis constants only, never used in
        the control law). Returns human-readable notices; an empty list means
        all sufficient conditions hold."""
        notices = []
        if abs(self.k_p1 - alpha_p) > 1e-12:
            notices.append(
                f"k_p1={self.k_p1} != alpha_p={alpha_p}: the exponential-convergence "
                "analysis assumes k_p1 = alpha_p; convergence checks are skipped"
            )
        if self.k_p1 <= 0.5:
            notices.append(f"k_p1={self.k_p1} <= 1/2 violates the sufficient stability condition")
        if self.k_p2 <= (kappa_1 + 1.0) / 2.0:
            notices.append(
                f"k_p2={self.k_p2} <= (kappa_1+1)/2={(kappa_1 + 1) / 2}: sufficient "
                "(not necessary) convergence condition violated"
            )
        return notices

    def warn_if_unstable(self, alpha_p: float) -> None:
        for notice in self.check_stability_conditions(alpha_p):
            warnings.warn(notice, stacklevel=2)


@dataclass(frozen=True)
class ForceBreakdown:
    """Per-term controller telemetry: F = m * (feedforward + correction + rejection)."""

    total: np.ndarray
    feedforward: np.ndarray
    safety_correction: np.ndarray
    disturbance_rejection: np.ndarray


@dataclass(frozen=True)
class SafetyMonitorSample:
    b_p: np.ndarray           # one per obstacle
    b_a: np.ndarray           # one per active cone
    h_p_min: float
    h_min_attitude: float
    filter_degraded: bool

    @property
    def any_negative(self) -> bool:
        b_a_min = float(np.min(self.b_a)) if self.b_a.size else 0.0
        b_p_min = float(np.min(self.b_p)) if self.b_p.size else 0.0
        return min(b_p_min, b_a_min, self.h_p_min, self.h_min_attitude) < 0.0


def position_control(
    r: np.ndarray,
    v: np.ndarray,
    v_s: np.ndarray,
    c_o: np.ndarray,
    d_o: np.ndarray,
    g: np.ndarray,
    d_hat_f: np.ndarray,
    mass_model: float,
    gains: ControllerGains,
    alpha_p: float,
) -> ForceBreakdown:
    """F = m [C_o v + D_o r - g - (alpha_p + k_p2) v + k_p2 v_s - d_hat_f]."""
    feedforward = c_o @ v + d_o @ r - g
    correction = -(alpha_p + gains.k_p2) * v + gains.k_p2 * v_s
    rejection = -np.asarray(d_hat_f, dtype=float)
    total = mass_model * (feedforward + correction + rejection)
    return ForceBreakdown(
        total=total,
        feedforward=mass_model * feedforward,
        safety_correction=mass_model * correction,
        disturbance_rejection=mass_model * rejection,
    )


def attitude_control(
    omega: np.ndarray,
    omega_s: np.ndarray,
    d_hat_t: np.ndarray,
    inertia_model: np.ndarray,
    gains: ControllerGains,
    alpha_a: float,
) -> np.ndarray:
    """T = omega x (J omega) + J [-(alpha_a + k_a2) omega + k_a2 omega_s - d_hat_t]."""
    j = np.asarray(inertia_model, dtype=float)
    correction = -(alpha_a + gains.k_a2) * omega + gains.k_a2 * omega_s
    return np.cross(omega, j @ omega) + j @ (correction - np.asarray(d_hat_t, float))


def safety_monitors(
    v: np.ndarray,
    omega: np.ndarray,
    h_p: np.ndarray,
    grad_p: np.ndarray,
    active_h: np.ndarray,
    active_grad: np.ndarray,
    h_min_attitude: float,
    alpha_p: float,
    alpha_a: float,
    filter_degraded: bool = False,
) -> SafetyMonitorSample:
    """Evaluate B_pi for every obstacle and B_ai for the active cones."""
    h_p = np.asarray(h_p, dtype=float)
    b_p = (grad_p @ v + alpha_p * h_p) if h_p.size else np.zeros(0)
    active_h = np.asarray(active_h, dtype=float)
    b_a = (np.asarray(active_grad) @ omega + alpha_a * active_h) if active_h.size else np.zeros(0)
    return SafetyMonitorSample(
        b_p=b_p,
        b_a=b_a,
        h_p_min=float(np.min(h_p)) if h_p.size else float("inf"),
        h_min_attitude=h_min_attitude,
        filter_degraded=filter_degraded,
    )
