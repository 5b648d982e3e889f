"""Nonlinear disturbance observer on the stacked velocity state x = [v; omega].

Estimates the lumped disturbance d = [d_f; d_t] (accelerations) including
whatever plant/model mismatch the controller-side drift terms fail to
capture. Internal state z obeys

    z' = -L z - L (L x + M + N u),   d_hat = z + L x

with L positive definite. The estimation error then follows
e' = -L e + d', which is uniformly ultimately bounded for bounded d'.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_GAIN_DIAG = (0.1, 0.1, 0.1, 0.2, 0.2, 0.2)


@dataclass(frozen=True)
class ObserverState:
    z: np.ndarray  # 6-vector internal state
    L: np.ndarray  # 6x6 positive definite gain

    def __post_init__(self):
        object.__setattr__(self, "z", np.asarray(self.z, dtype=float))
        object.__setattr__(self, "L", np.asarray(self.L, dtype=float))
        if self.z.shape != (6,) or self.L.shape != (6, 6):
            raise ValueError("observer state must be 6-dimensional")
        if np.any(np.linalg.eigvalsh((self.L + self.L.T) / 2) <= 0):
            raise ValueError("observer gain must be positive definite")

    def d_hat(self, x: np.ndarray) -> np.ndarray:
        """Disturbance estimate at the current velocity state."""
        return self.z + self.L @ np.asarray(x, dtype=float)

    @property
    def lambda_min(self) -> float:
        return float(np.min(np.linalg.eigvalsh((self.L + self.L.T) / 2)))


def initial_state(x0: np.ndarray, gain_diag=DEFAULT_GAIN_DIAG) -> ObserverState:
    """Observer initialized so that d_hat(x0) = 0 (no prior knowledge)."""
    L = np.diag(np.asarray(gain_diag, dtype=float))
    return ObserverState(z=-L @ np.asarray(x0, dtype=float), L=L)


def observer_step(
    obs: ObserverState,
    x: np.ndarray,
    drift: np.ndarray,
    control_effect: np.ndarray,
    dt: float,
) -> ObserverState:
    """Advance z by one RK4 step of z' = -L z - L(L x + M + N u).

    x, the drift M and the control effect N u are held over the step
    (zero-order hold, same cadence as the control loop). M and N u must be
    computed with the controller's model parameters.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    L = obs.L
    forcing = -L @ (L @ np.asarray(x, float) + np.asarray(drift, float)
                    + np.asarray(control_effect, float))

    def zdot(z):
        return -L @ z + forcing

    z = obs.z
    k1 = zdot(z)
    k2 = zdot(z + dt / 2 * k1)
    k3 = zdot(z + dt / 2 * k2)
    k4 = zdot(z + dt * k3)
    z_next = z + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(z_next)):
        raise FloatingPointError("non-finite observer state")
    return ObserverState(z=z_next, L=L)


def uub_bound(obs: ObserverState, delta: float) -> float:
    """Ultimate bound on ||e||: delta / sqrt(mu (lambda_min - mu/2)) with the
    Young-inequality constant fixed to mu = lambda_min (maximizes the
    guaranteed margin product under lambda_min > mu/2)."""
    lam = obs.lambda_min
    mu = lam
    return float(delta / np.sqrt(mu * (lam - mu / 2.0)))
