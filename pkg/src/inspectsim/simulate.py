"""Closed-loop mission simulation and telemetry.

One control step is: propagate target orbit -> evaluate barriers ->
disturbance estimate -> nominal virtual controls -> QP safety filters ->
force/torque laws -> RK4 plant step -> observer update -> telemetry row ->
checkpoint logic. The loop runs until mission completion or the configured
maximum duration.
"""

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import control, filters, observer
from .config import ScenarioConfig
from .constraints import almost_active_set, boolean_compose
from .dynamics import orthonormalize, skew
from .orbit import (
    MU_EARTH_KM3_S2,
    propagate_target,
)

TELEMETRY_SCHEMA_VERSION = 1

EXIT_COMPLETE = 0
EXIT_INCOMPLETE = 1
EXIT_SAFETY_VIOLATION = 2
EXIT_NUMERICAL_FAILURE = 3
EXIT_CONFIG_ERROR = 4

_H_FLOOR = -1e-6  # tolerance on barrier nonnegativity when counting violations


@dataclass
class SummaryReport:
    exit_status: int
    completed: bool
    completion_time_s: Optional[float]
    min_h_p: Optional[float]
    min_h_min: Optional[float]
    max_abs_v: float
    max_abs_omega: float
    violations: int
    degraded_steps: int
    steps: int
    wall_time_s: float
    final_position_error_m: float
    message: str = ""

    def as_dict(self) -> dict:
        return {
            "exit_status": self.exit_status,
            "completed": self.completed,
            "completion_time_s": self.completion_time_s,
            "min_h_p": self.min_h_p,
            "min_h_min": self.min_h_min,
            "max_abs_v": self.max_abs_v,
            "max_abs_omega": self.max_abs_omega,
            "violations": self.violations,
            "degraded_steps": self.degraded_steps,
            "steps": self.steps,
            "wall_time_s": self.wall_time_s,
            "final_position_error_m": self.final_position_error_m,
            "message": self.message,
        }


@dataclass
class SimulationResult:
    summary: SummaryReport
    telemetry: np.ndarray  # (steps, n_columns)
    columns: tuple[str, ...]

    def column(self, name: str) -> np.ndarray:
        return self.telemetry[:, self.columns.index(name)]


def telemetry_columns(n_obstacles: int) -> tuple[str, ...]:
    cols = ["t"]
    cols += [f"r_{ax}" for ax in "xyz"]
    cols += [f"v_{ax}" for ax in "xyz"]
    cols += [f"R_{i}{j}" for i in range(1, 4) for j in range(1, 4)]
    cols += [f"omega_{ax}" for ax in "xyz"]
    cols += [f"v_s_{ax}" for ax in "xyz"]
    cols += [f"omega_s_{ax}" for ax in "xyz"]
    cols += [f"F_{ax}" for ax in "xyz"]
    cols += [f"T_{ax}" for ax in "xyz"]
    cols += [f"d_hat_{i}" for i in range(1, 7)]
    cols += [f"d_true_{i}" for i in range(1, 7)]
    cols += [f"h_p_{i}" for i in range(1, n_obstacles + 1)]
    cols += [f"h_a{i}" for i in range(1, 6)]
    cols += ["h_min", "B_p_min", "B_a_min", "active_mask", "checkpoint",
             "filter_degraded", "pointing_err_deg", "V_a2"]
    return tuple(cols)


class SafetyAbort(RuntimeError):
    """Barrier went negative while running in strict mode."""


def run(config: ScenarioConfig) -> SimulationResult:
    """Run the closed-loop simulation described by the scenario config."""
    t_wall = time.perf_counter()
    dt = config.dt
    n_steps_max = int(np.floor(config.max_duration / dt)) + 1

    # --- constant precomputation -------------------------------------------
    plant = config.plant
    j_true = plant.inertia_true
    j_true_inv = np.linalg.inv(j_true)
    j_model = plant.inertia_model
    j_model_inv = np.linalg.inv(j_model)
    m_true = plant.mass_true
    m_model = plant.mass_model
    gains = config.gains
    fp = config.filter_params
    profile = config.disturbance

    n_obs = len(config.obstacles)
    if n_obs:
        centers = np.array([o.center for o in config.obstacles])
        inv_semi_sq = np.array([1.0 / o.semi_axes**2 for o in config.obstacles])
    have_cones = bool(config.cones)
    if have_cones:
        cone_axes = np.array([c.body_axis for c in config.cones])
        cone_skews = np.array([skew(a) for a in cone_axes])
        cone_cos = np.array([c.cos_half_angle for c in config.cones])
        cone_is_sun = np.array([c.env_vector_id == "sun" for c in config.cones])
        axes_by_label = {c.label: c.body_axis for c in config.cones}
    camera_axis = config.camera_axis
    omega_box = fp.omega_max

    from .mission import MissionState, desired_setpoint, advance
    mission = MissionState(checkpoints=config.checkpoints, criteria=config.arrival)

    # --- state -------------------------------------------------------------
    r = config.r0.copy()
    v = config.v0.copy()
    rot = config.R0.copy()
    omega = config.omega0.copy()
    obs_state = observer.initial_state(
        np.concatenate([v, omega]), config.observer_gain_diag
    )
    L = obs_state.L

    columns = telemetry_columns(n_obs)
    buf = np.empty((n_steps_max, len(columns)))
    n_rows = 0
    violations = 0
    degraded_steps = 0
    completion_time = None
    exit_status = EXIT_INCOMPLETE
    message = ""

    sun_dir = config.sun_dir_inertial / np.linalg.norm(config.sun_dir_inertial)

    try:
        t = 0.0
        for _ in range(n_steps_max):
            orbit_state = propagate_target(config.orbit, t)
            rot_oi = orbit_state.rot_vvlh_to_inertial
            c_o_mat, d_o_mat = _frame_matrices(orbit_state.f_dot, orbit_state.f_ddot)
            r_t_i = orbit_state.target_pos_inertial_km
            g_now = _gravity(r_t_i, rot_oi, r)

            r_d, gamma_i = desired_setpoint(mission, orbit_state)
            r_e = r - r_d

            # barriers
            if n_obs:
                d_rel = r[None, :] - centers
                h_p = np.sum(d_rel * d_rel * inv_semi_sq, axis=1) - 1.0
                grad_p = 2.0 * d_rel * inv_semi_sq
            else:
                h_p = np.zeros(0)
                grad_p = np.zeros((0, 3))

            if have_cones:
                r_s_i = r_t_i + rot_oi @ (r / 1000.0)
                earth_dir = -r_s_i / np.linalg.norm(r_s_i)
                env_mat = np.where(cone_is_sun[:, None], sun_dir, earth_dir)
                vr = env_mat @ rot  # (5,3): V_Ii' R
                h_a = cone_cos - np.einsum("ij,ij->i", vr, cone_axes)
                grad_a = np.einsum("ij,ijk->ik", vr, cone_skews)
                h_min_att = boolean_compose(h_a)
                active = almost_active_set(h_a, fp.eps)
            else:
                h_a = np.full(5, np.nan)
                h_min_att = np.nan
                active = None

            # disturbance estimate at the current velocity state
            x_vel = np.concatenate([v, omega])
            d_hat = obs_state.z + L @ x_vel
            d_hat_f, d_hat_t = d_hat[:3], d_hat[3:]

            # safe velocity
            v_c = -gains.k_p1 * r_e
            res_v = filters.safe_velocity(v_c, h_p, grad_p, fp)
            v_s = res_v.value
            degraded = res_v.degraded

            # safe angular velocity
            gamma_body = rot.T @ gamma_i
            omega_c = gains.k_a1 * np.cross(camera_axis, gamma_body)
            if have_cones:
                grads_by_label = {c.label: grad_a[i] for i, c in enumerate(config.cones)}
                res_w = filters.safe_angular_velocity(
                    omega_c, omega, active, axes_by_label, grads_by_label, fp
                )
                omega_s = res_w.value
                degraded = degraded or res_w.degraded
            else:
                omega_s = np.clip(omega_c, -omega_box, omega_box)
            if degraded:
                degraded_steps += 1

            # controllers
            force = control.position_control(
                r, v, v_s, c_o_mat, d_o_mat, g_now, d_hat_f,
                m_model, gains, fp.alpha_p,
            ).total
            torque = control.attitude_control(
                omega, omega_s, d_hat_t, j_model, gains, fp.alpha_a,
            )

            # monitors
            b_p = grad_p @ v + fp.alpha_p * h_p if n_obs else np.zeros(0)
            b_p_min = float(np.min(b_p)) if n_obs else np.nan
            if have_cones and active.members:
                label_idx = {"a1": 0, "a2": 1, "a3": 2, "a4": 3, "a5": 4}
                idx = [label_idx[m] for m in active.members]
                b_a_vals = grad_a[idx] @ omega + fp.alpha_a * h_a[idx]
                b_a_min = float(np.min(b_a_vals))
                active_mask = sum(1 << i for i in idx)
            else:
                b_a_min = np.nan
                active_mask = 0

            h_p_min_now = float(np.min(h_p)) if n_obs else np.inf
            h_att_now = h_min_att if have_cones else np.inf
            if min(h_p_min_now, h_att_now) < _H_FLOOR:
                violations += 1
                if config.strict:
                    raise SafetyAbort(
                        f"barrier negative at t={t:.1f}s "
                        f"(min h_p={h_p_min_now:.3e}, h_min={h_att_now:.3e})"
                    )

            # pointing diagnostics
            boresight_i = rot @ camera_axis
            cos_err = float(np.clip(boresight_i @ gamma_i, -1.0, 1.0))
            pointing_err_deg = float(np.degrees(np.arccos(cos_err)))
            v_a2 = (1.0 - float(camera_axis @ gamma_body)
                    + 0.5 * float(np.dot(omega - omega_c, omega - omega_c)))

            d_f_true, d_t_true = _true_disturbance(profile, t, m_true, j_true_inv)

            # telemetry row
            row = buf[n_rows]
            row[0] = t
            row[1:4] = r
            row[4:7] = v
            row[7:16] = rot.reshape(-1)
            row[16:19] = omega
            row[19:22] = v_s
            row[22:25] = omega_s
            row[25:28] = force
            row[28:31] = torque
            row[31:37] = d_hat
            row[37:40] = d_f_true
            row[40:43] = d_t_true
            row[43:43 + n_obs] = h_p
            base = 43 + n_obs
            row[base:base + 5] = h_a
            row[base + 5] = h_min_att
            row[base + 6] = b_p_min
            row[base + 7] = b_a_min
            row[base + 8] = active_mask
            row[base + 9] = mission.current_index
            row[base + 10] = 1.0 if degraded else 0.0
            row[base + 11] = pointing_err_deg
            row[base + 12] = v_a2
            n_rows += 1

            # mission bookkeeping (uses the errors just logged)
            mission = advance(mission, r_e, pointing_err_deg, dt)
            if mission.completed:
                completion_time = t
                break

            # plant step
            r, v, rot, omega = _plant_step(
                t, r, v, rot, omega, dt, c_o_mat, d_o_mat, r_t_i, rot_oi,
                force, torque, m_true, j_true, j_true_inv, profile,
            )

            # observer update (zero-order hold on x, drift and control effect)
            drift = np.concatenate([
                -c_o_mat @ x_vel[:3] - d_o_mat @ row[1:4] + g_now,
                -j_model_inv @ np.cross(x_vel[3:], j_model @ x_vel[3:]),
            ])
            control_effect = np.concatenate([force / m_model, j_model_inv @ torque])
            obs_state = observer.observer_step(obs_state, x_vel, drift, control_effect, dt)

            t += dt
    except SafetyAbort as exc:
        exit_status = EXIT_SAFETY_VIOLATION
        message = str(exc)
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        exit_status = EXIT_NUMERICAL_FAILURE
        message = f"numerical failure: {exc}"
    else:
        if mission.completed:
            exit_status = EXIT_COMPLETE
        else:
            message = "mission incomplete at maximum duration"

    telemetry = buf[:n_rows].copy()
    cols = telemetry_columns(n_obs)

    def _col(name):
        return telemetry[:, cols.index(name)]

    if n_rows:
        min_h_p = float(np.min(telemetry[:, 43:43 + n_obs])) if n_obs else None
        h_min_col = _col("h_min")
        min_h_min = float(np.nanmin(h_min_col)) if have_cones else None
        max_abs_v = float(np.max(np.abs(telemetry[:, 4:7])))
        max_abs_omega = float(np.max(np.abs(telemetry[:, 16:19])))
        final_err = float(np.linalg.norm(
            telemetry[-1, 1:4] - config.checkpoints[-1].position_m
        ))
    else:
        min_h_p = min_h_min = None
        max_abs_v = max_abs_omega = final_err = float("nan")

    summary = SummaryReport(
        exit_status=exit_status,
        completed=completion_time is not None,
        completion_time_s=completion_time,
        min_h_p=min_h_p,
        min_h_min=min_h_min,
        max_abs_v=max_abs_v,
        max_abs_omega=max_abs_omega,
        violations=violations,
        degraded_steps=degraded_steps,
        steps=n_rows,
        wall_time_s=time.perf_counter() - t_wall,
        final_position_error_m=final_err,
        message=message,
    )
    return SimulationResult(summary=summary, telemetry=telemetry, columns=cols)


def _frame_matrices(f_dot, f_ddot):
    c_o = np.array([
        [0.0, 2.0 * f_dot, 0.0],
        [-2.0 * f_dot, 0.0, 0.0],
        [0.0, 0.0, 0.0],
    ])
    d_o = np.array([
        [-f_dot**2, f_ddot, 0.0],
        [-f_ddot, -f_dot**2, 0.0],
        [0.0, 0.0, 0.0],
    ])
    return c_o, d_o


def _gravity(r_t_i_km, rot_oi, r_rel_m):
    """Differential gravity at relative position r [m], in frame O [m/s^2]."""
    r_s = r_t_i_km + rot_oi @ (r_rel_m / 1000.0)
    nt = np.sqrt(r_t_i_km @ r_t_i_km)
    ns = np.sqrt(r_s @ r_s)
    g_i = MU_EARTH_KM3_S2 * (r_t_i_km / nt**3 - r_s / ns**3)
    return (g_i @ rot_oi) * 1000.0


def _true_disturbance(profile, t, m_true, j_true_inv):
    f = profile.force_amp * np.sin(profile.force_freq * t + profile.force_phase)
    tq = profile.torque_amp * np.sin(profile.torque_freq * t + profile.torque_phase)
    return f / m_true, j_true_inv @ tq


def _plant_step(t, r, v, rot, omega, dt, c_o, d_o, r_t_i, rot_oi,
                force, torque, m_true, j_true, j_true_inv, profile):
    """One RK4 step of the true plant with the frame matrices and the target
    inertial position held over the step (their variation over one control
    period is negligible); gravity and the disturbances are re-evaluated at
    every stage."""

    def deriv(ts, rs, vs, rots, omegas):
        d_f, d_t = _true_disturbance(profile, ts, m_true, j_true_inv)
        g = _gravity(r_t_i, rot_oi, rs)
        v_dot = -c_o @ vs - d_o @ rs + g + force / m_true + d_f
        rot_dot = rots @ skew(omegas)
        omega_dot = j_true_inv @ (-np.cross(omegas, j_true @ omegas) + torque) + d_t
        return vs, v_dot, rot_dot, omega_dot

    k1 = deriv(t, r, v, rot, omega)
    half = dt / 2.0
    k1r, k1v, k1R, k1w = v, k1[1], k1[2], k1[3]
    s2 = deriv(t + half, r + half * k1r, v + half * k1v, rot + half * k1R, omega + half * k1w)
    k2r, k2v, k2R, k2w = s2[0], s2[1], s2[2], s2[3]
    s3 = deriv(t + half, r + half * k2r, v + half * k2v, rot + half * k2R, omega + half * k2w)
    k3r, k3v, k3R, k3w = s3[0], s3[1], s3[2], s3[3]
    s4 = deriv(t + dt, r + dt * k3r, v + dt * k3v, rot + dt * k3R, omega + dt * k3w)
    k4r, k4v, k4R, k4w = s4[0], s4[1], s4[2], s4[3]
    sixth = dt / 6.0
    r_n = r + sixth * (k1r + 2 * k2r + 2 * k3r + k4r)
    v_n = v + sixth * (k1v + 2 * k2v + 2 * k3v + k4v)
    rot_n = orthonormalize(rot + sixth * (k1R + 2 * k2R + 2 * k3R + k4R))
    w_n = omega + sixth * (k1w + 2 * k2w + 2 * k3w + k4w)
    if not (np.all(np.isfinite(r_n)) and np.all(np.isfinite(v_n))
            and np.all(np.isfinite(rot_n)) and np.all(np.isfinite(w_n))):
        raise FloatingPointError(f"non-finite plant state after step at t={t}")
    return r_n, v_n, rot_n, w_n


def write_telemetry(result: SimulationResult, path) -> None:
    """Write telemetry as CSV: schema comment, header row, one row per step,
    full double precision so a parse round-trips bit-exactly."""
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# inspectsim-telemetry-schema: {TELEMETRY_SCHEMA_VERSION}\n")
        fh.write(",".join(result.columns) + "\n")
        for row in result.telemetry:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
