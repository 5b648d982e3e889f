"""True plant: relative translational motion and rigid-body attitude under disturbance.

The translational state lives in frame O (m, m/s); attitude is the full
rotation matrix body->inertial plus body angular velocity. Both are stepped
together by a classical fixed-step RK4 with re-orthonormalization of R.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix: skew(v) @ u == v x u."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


@dataclass
class TranslationalState:
    r: np.ndarray  # m, frame O
    v: np.ndarray  # m/s, frame O

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if not (np.all(np.isfinite(self.r)) and np.all(np.isfinite(self.v))):
            raise ValueError("translational state must be finite")


@dataclass
class AttitudeState:
    R: np.ndarray      # rotation body -> inertial
    omega: np.ndarray  # rad/s, body frame

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=float)
        self.omega = np.asarray(self.omega, dtype=float)
        err = np.linalg.norm(self.R.T @ self.R - np.eye(3))
        if err > 1e-6:
            raise ValueError(f"R is not orthonormal (||R'R - I|| = {err:.2e})")


@dataclass(frozen=True)
class PlantParams:
    """True plant parameters plus the (possibly mismatched) controller-side copies."""

    mass_true: float
    inertia_true: np.ndarray
    mass_model: float
    inertia_model: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "inertia_true", np.asarray(self.inertia_true, dtype=float))
        object.__setattr__(self, "inertia_model", np.asarray(self.inertia_model, dtype=float))
        if self.mass_true <= 0 or self.mass_model <= 0:
            raise ValueError("masses must be positive")
        for j in (self.inertia_true, self.inertia_model):
            if not np.allclose(j, j.T):
                raise ValueError("inertia matrix must be symmetric")
            if np.any(np.linalg.eigvalsh(j) <= 0):
                raise ValueError("inertia matrix must be positive definite")


@dataclass(frozen=True)
class DisturbanceProfile:
    """Per-axis sinusoidal external force [N] and torque [N m] profiles.

    Each axis i evolves as amp_i * trig(freq_i * t + phase_i); a phase of
    pi/2 turns the sine into a cosine, which is how the mixed sin/cos
    profiles are encoded.
    """

    force_amp: np.ndarray
    force_freq: np.ndarray
    force_phase: np.ndarray
    torque_amp: np.ndarray
    torque_freq: np.ndarray
    torque_phase: np.ndarray

    def __post_init__(self):
        for name in ("force_amp", "force_freq", "force_phase",
                     "torque_amp", "torque_freq", "torque_phase"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (3,) or not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, arr)

    @classmethod
    def sinusoidal_default(cls) -> "DisturbanceProfile":
        """F_d = [0.01 sin 0.02t, 0.02 cos 0.01t, 0.01 sin 0.03t] N,
        T_d = [0.001 sin 0.03t, 0.002 sin 0.02t, 0.001 cos 0.03t] N m."""
        half_pi = np.pi / 2.0
        return cls(
            force_amp=[0.01, 0.02, 0.01],
            force_freq=[0.02, 0.01, 0.03],
            force_phase=[0.0, half_pi, 0.0],
            torque_amp=[0.001, 0.002, 0.001],
            torque_freq=[0.03, 0.02, 0.03],
            torque_phase=[0.0, 0.0, half_pi],
        )

    @classmethod
    def zero(cls) -> "DisturbanceProfile":
        z = [0.0, 0.0, 0.0]
        return cls(z, z, z, z, z, z)

    def scaled(self, factor: float) -> "DisturbanceProfile":
        return DisturbanceProfile(
            self.force_amp * factor, self.force_freq, self.force_phase,
            self.torque_amp * factor, self.torque_freq, self.torque_phase,
        )

    def force_torque_at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Raw disturbance force [N] and torque [N m] at time t."""
        f = self.force_amp * np.sin(self.force_freq * t + self.force_phase)
        tq = self.torque_amp * np.sin(self.torque_freq * t + self.torque_phase)
        return f, tq

    def derivative_bound(self, mass: float, inertia: np.ndarray) -> float:
        """Analytic bound delta on ||d/dt [d_f; d_t]|| of the acceleration-level
        lumped disturbance, using |amp * freq| per axis."""
        df_amp = self.force_amp * self.force_freq / mass
        raw_dt_amp = self.torque_amp * self.torque_freq
        j_inv_norm = np.linalg.norm(np.linalg.inv(np.asarray(inertia, float)), 2)
        return float(np.sqrt(np.sum(df_amp**2) + j_inv_norm**2 * np.sum(raw_dt_amp**2)))


def disturbance_at(
    profile: DisturbanceProfile, t: float, mass: float, inertia: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Acceleration-level disturbances (d_f [m/s^2], d_t [rad/s^2]) at time t,
    converted with the true mass and inertia."""
    f, tq = profile.force_torque_at(t)
    return f / mass, np.linalg.solve(np.asarray(inertia, float), tq)


def translational_derivative(
    state: TranslationalState,
    c_o: np.ndarray,
    d_o: np.ndarray,
    g: np.ndarray,
    force: np.ndarray,
    d_f: np.ndarray,
    mass: float,
) -> tuple[np.ndarray, np.ndarray]:
    """r' = v; v' = -C_o v - D_o r + g + F/m + d_f."""
    if mass <= 0:
        raise ValueError("mass must be positive")
    v_dot = -c_o @ state.v - d_o @ state.r + g + force / mass + d_f
    if not np.all(np.isfinite(v_dot)):
        raise ValueError("non-finite translational derivative")
    return state.v.copy(), v_dot


def attitude_derivative(
    state: AttitudeState,
    torque: np.ndarray,
    d_t: np.ndarray,
    inertia: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """R' = R omega^x; omega' = J^-1 (-omega x (J omega) + T) + d_t."""
    j = np.asarray(inertia, dtype=float)
    omega = state.omega
    r_dot = state.R @ skew(omega)
    omega_dot = np.linalg.solve(j, -np.cross(omega, j @ omega) + np.asarray(torque, float)) + d_t
    if not np.all(np.isfinite(omega_dot)):
        raise ValueError("non-finite attitude derivative")
    return r_dot, omega_dot


def orthonormalize(rot: np.ndarray) -> np.ndarray:
    """One Newton step toward the polar-decomposition orthonormal factor."""
    return rot @ (3.0 * np.eye(3) - rot.T @ rot) / 2.0


# Derivative callback signature: f(t, r, v, R, omega) ->
#   (r_dot, v_dot, R_dot, omega_dot)
FullDerivative = Callable[
    [float, np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
]


def rk4_step(
    t: float,
    r: np.ndarray,
    v: np.ndarray,
    rot: np.ndarray,
    omega: np.ndarray,
    deriv: FullDerivative,
    dt: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Classical RK4 over the coupled 18-dimensional state (r, v, R, omega).

    R is re-orthonormalized after the step. Raises on non-finite output.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    k1 = deriv(t, r, v, rot, omega)
    k2 = deriv(t + dt / 2, r + dt / 2 * k1[0], v + dt / 2 * k1[1],
               rot + dt / 2 * k1[2], omega + dt / 2 * k1[3])
    k3 = deriv(t + dt / 2, r + dt / 2 * k2[0], v + dt / 2 * k2[1],
               rot + dt / 2 * k2[2], omega + dt / 2 * k2[3])
    k4 = deriv(t + dt, r + dt * k3[0], v + dt * k3[1],
               rot + dt * k3[2], omega + dt * k3[3])
    out = []
    for i, x in enumerate((r, v, rot, omega)):
        out.append(x + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
    r_n, v_n, rot_n, omega_n = out
    rot_n = orthonormalize(rot_n)
    for x in (r_n, v_n, rot_n, omega_n):
        if not np.all(np.isfinite(x)):
            raise FloatingPointError("non-finite state after RK4 step")
    return r_n, v_n, rot_n, omega_n
