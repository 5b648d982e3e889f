"""Acceptance gate: one test per release criterion, at the stated tolerances.

Criteria 1-2, 7 and 9 share the session-scoped full-mission run; the
convergence and bound criteria use purpose-built scenario variants.
"""

import dataclasses

import numpy as np
import pytest

import inspectsim
from conftest import exact_model, rotation_about
from inspectsim import orbit
from inspectsim.dynamics import DisturbanceProfile
from inspectsim.mission import ArrivalCriteria, Checkpoint
from inspectsim.simulate import write_telemetry

H_FLOOR = -1e-6


def _col(res, name):
    return res.column(name)


class TestCriterion1PositionSafety:
    """Full mission: all checkpoints reached, position barriers nonnegative,
    within the wall-clock budget."""

    def test_mission_completes_all_checkpoints(self, intelsat_result):
        cfg, res = intelsat_result
        assert res.summary.completed, res.summary.message
        assert int(_col(res, "checkpoint").max()) == len(cfg.checkpoints) - 1

    def test_position_barriers_nonnegative(self, intelsat_result):
        _, res = intelsat_result
        assert res.summary.min_h_p >= H_FLOOR

    def test_wall_clock_budget(self, intelsat_result):
        cfg, res = intelsat_result
        assert cfg.max_duration == 12000.0 and cfg.dt == 0.1
        assert res.summary.wall_time_s <= 60.0


class TestCriterion2AttitudeSafety:
    def test_composed_barrier_nonnegative(self, intelsat_result):
        _, res = intelsat_result
        assert res.summary.min_h_min >= H_FLOOR

    def test_one_tracker_always_available(self, intelsat_result):
        _, res = intelsat_result
        t1 = np.minimum(_col(res, "h_a1"), _col(res, "h_a2"))
        t2 = np.minimum(_col(res, "h_a3"), _col(res, "h_a4"))
        assert np.min(np.maximum(t1, t2)) >= H_FLOOR


class TestCriterion3VelocityBounds:
    def test_filtered_outputs_within_box_exactly(self, intelsat_result):
        cfg, res = intelsat_result
        v_s = np.column_stack([_col(res, f"v_s_{a}") for a in "xyz"])
        w_s = np.column_stack([_col(res, f"omega_s_{a}") for a in "xyz"])
        assert np.max(np.abs(v_s)) <= cfg.filter_params.v_max
        assert np.max(np.abs(w_s)) <= cfg.filter_params.omega_max

    def test_realized_rates_bounded(self, intelsat_result):
        cfg, res = intelsat_result
        assert res.summary.max_abs_v <= cfg.filter_params.v_max
        assert res.summary.max_abs_omega <= cfg.filter_params.omega_max * 1.05

    def test_velocity_loop_equilibrium_scaling(self):
        # constant safe velocity, exact estimate, decoupled axes:
        # v' = -(alpha_p + k_p2) v + k_p2 v_s  =>  v_ss = 0.2667 v_s
        alpha_p, k_p2 = 0.55, 0.2
        v_s = np.array([0.1, -0.04, 0.02])
        v = np.zeros(3)
        dt = 0.1
        for _ in range(2000):
            def f(vv):
                return -(alpha_p + k_p2) * vv + k_p2 * v_s
            k1 = f(v)
            k2 = f(v + dt / 2 * k1)
            k3 = f(v + dt / 2 * k2)
            k4 = f(v + dt * k3)
            v = v + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        expected = k_p2 / (k_p2 + alpha_p) * v_s
        assert np.linalg.norm(v - expected) <= 0.02 * np.linalg.norm(expected)


class TestCriterion4ObserverBound:
    def test_estimation_error_within_analytic_bound(self):
        # exact model parameters (the bound assumes a matched drift model);
        # the 20%-mismatch bias case is covered by the margin design, not
        # by this bound
        cfg = exact_model(inspectsim.load_builtin("freespace"))
        cfg = dataclasses.replace(cfg, max_duration=800.0,
                                  arrival=ArrivalCriteria(position_tol_m=1e-6,
                                                          pointing_tol_deg=1e-3,
                                                          dwell_s=1e6))
        res = inspectsim.run(cfg)
        d_hat = res.telemetry[:, 31:37]
        d_true = res.telemetry[:, 37:43]
        err = np.linalg.norm(d_hat - d_true, axis=1)
        lam = float(np.min(cfg.observer_gain_diag))
        delta = cfg.disturbance.derivative_bound(cfg.plant.mass_true,
                                                 cfg.plant.inertia_true)
        bound = delta / np.sqrt(lam * (lam - lam / 2.0))
        post = err[_col(res, "t") > 5.0 / lam]
        assert np.max(post) <= bound * 1.10


class TestCriterion5PositionConvergence:
    def test_converges_and_remains(self, freespace_result):
        _, res = freespace_result
        t = _col(res, "t")
        r = np.linalg.norm(res.telemetry[:, 1:4], axis=1)
        assert np.any((t <= 600.0) & (r <= 0.01))
        first = int(np.argmax(r <= 0.01))
        assert np.max(r[first:]) <= 0.01

    def test_residual_shrinks_with_disturbance(self, freespace_result):
        cfg, res = freespace_result
        half = dataclasses.replace(cfg,
                                   disturbance=cfg.disturbance.scaled(0.5))
        res_half = inspectsim.run(half)
        def post_sup(r):
            t = _col(r, "t")
            rr = np.linalg.norm(r.telemetry[:, 1:4], axis=1)
            return float(np.max(rr[t > 600.0]))
        assert post_sup(res_half) < post_sup(res)


class TestCriterion6AttitudeConvergence:
    @pytest.fixture(scope="class")
    def pointing_run(self):
        # constraint-free pure pointing maneuver from 90 deg initial error,
        # no disturbance, exact model
        cfg = exact_model(inspectsim.load_builtin("freespace"))
        r0 = np.array([0.0, 0.0, 0.0])
        # align the body with the orbital frame, then roll the boresight
        # 90 degrees off the commanded direction
        rot_oi = orbit.propagate_target(cfg.orbit, 0.0).rot_vvlh_to_inertial
        r0_att = rot_oi @ rotation_about([0.0, 1.0, 0.0], np.radians(90.0))
        cfg = dataclasses.replace(
            cfg,
            disturbance=DisturbanceProfile.zero(),
            r0=r0, v0=np.zeros(3),
            R0=r0_att,
            checkpoints=(Checkpoint(position_m=r0,
                                    pointing_dir_O=[1.0, 0.0, 0.0]),),
            arrival=ArrivalCriteria(position_tol_m=1e-6,
                                    pointing_tol_deg=1e-3, dwell_s=1e6),
            max_duration=400.0,
        )
        return cfg, inspectsim.run(cfg)

    def test_initial_error_is_90_deg(self, pointing_run):
        _, res = pointing_run
        assert _col(res, "pointing_err_deg")[0] == pytest.approx(90.0, abs=0.5)

    def test_pointing_error_below_half_degree_in_300s(self, pointing_run):
        _, res = pointing_run
        t = _col(res, "t")
        err = _col(res, "pointing_err_deg")
        assert np.min(err[t <= 300.0]) < 0.5
        assert err[np.argmax(t >= 300.0)] < 0.5

    def test_lyapunov_sample_decreases(self, pointing_run):
        # monotone decay checked where the rate tracks its command and the
        # estimation error is negligible
        _, res = pointing_run
        v_a2 = _col(res, "V_a2")
        omega = res.telemetry[:, 16:19]
        omega_s = res.telemetry[:, 22:25]
        est_err = np.linalg.norm(res.telemetry[:, 31:37]
                                 - res.telemetry[:, 37:43], axis=1)
        # the loop equilibrates at a scaled command (ratio k_a2/(k_a2+alpha_a))
        # plus the small constant rate needed to track the rotating orbital
        # frame, so the rate never matches its command exactly; a 1e-4 rad/s
        # window captures the settled phase
        mask = (np.linalg.norm(omega - omega_s, axis=1) < 1e-4) & (est_err < 1e-5)
        idx = np.flatnonzero(mask[:-1] & mask[1:])
        assert idx.size > 0
        assert np.all(np.diff(v_a2)[idx] <= 1e-6)


class TestCriterion7DifferentialInequalities:
    def test_position_monitor_chain(self, intelsat_result):
        cfg, res = intelsat_result
        dt = cfg.dt
        k_p2, alpha_p = cfg.gains.k_p2, cfg.filter_params.alpha_p
        r = res.telemetry[:, 1:4]
        v = res.telemetry[:, 4:7]
        centers = np.array([o.center for o in cfg.obstacles])
        inv = np.array([1.0 / o.semi_axes**2 for o in cfg.obstacles])
        d = r[:, None, :] - centers[None, :, :]
        h = np.sum(d * d * inv[None], axis=2) - 1.0
        grad = 2.0 * d * inv[None]
        b = np.einsum("nmi,ni->nm", grad, v) + alpha_p * h
        b_dot = (b[2:] - b[:-2]) / (2 * dt)
        ok = b_dot >= -k_p2 * b[1:-1] - 1e-4
        assert np.mean(ok) >= 0.999

    def test_attitude_monitor_chain(self, intelsat_result):
        cfg, res = intelsat_result
        dt = cfg.dt
        k_a2, alpha_a = cfg.gains.k_a2, cfg.filter_params.alpha_a
        n = res.telemetry.shape[0]
        rot = res.telemetry[:, 7:16].reshape(n, 3, 3)
        omega = res.telemetry[:, 16:19]
        h_a = np.column_stack([_col(res, f"h_a{i}") for i in range(1, 6)])
        sun = cfg.sun_dir_inertial / np.linalg.norm(cfg.sun_dir_inertial)
        axes = np.array([c.body_axis for c in cfg.cones])
        skews = np.array([
            [[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]]
            for a in axes
        ])
        is_sun = np.array([c.env_vector_id == "sun" for c in cfg.cones])
        t = _col(res, "t")
        earth = np.empty((n, 3))
        for k in range(n):
            s = orbit.propagate_target(cfg.orbit, float(t[k]))
            r_s = orbit.service_pos_inertial_km(s, res.telemetry[k, 1:4])
            earth[k] = -r_s / np.linalg.norm(r_s)
        env = np.where(is_sun[None, :, None], sun[None, None, :],
                       earth[:, None, :])
        vr = np.einsum("nci,nij->ncj", env, rot)
        y = np.einsum("ncj,cjk->nck", vr, skews)
        b = np.einsum("nck,nk->nc", y, omega) + alpha_a * h_a
        mask = _col(res, "active_mask").astype(int)
        active = ((mask[:, None] >> np.arange(5)[None, :]) & 1).astype(bool)
        both = active[1:-1] & active[:-2] & active[2:]
        b_dot = (b[2:] - b[:-2]) / (2 * dt)
        viol = (b_dot < -k_a2 * b[1:-1] - 1e-4) & both
        checked = int(np.sum(both))
        assert checked > 0
        assert 1.0 - np.sum(viol) / checked >= 0.999


class TestCriterion8OracleSuites:
    """The four oracle suites run as dedicated test modules; this records
    their presence at the acceptance level and re-runs the cheap CW case."""

    def test_suites_present(self):
        import test_constraints
        import test_qp
        assert hasattr(test_qp.TestOracleAgreement,
                       "test_10k_random_feasible_problems")
        assert hasattr(test_constraints.TestPositionCbf,
                       "test_gradient_finite_difference_500_cases")
        assert hasattr(test_constraints.TestAttitudeCbf,
                       "test_gradient_finite_difference_500_cases")
        assert hasattr(test_constraints.TestBooleanCompose,
                       "test_exhaustive_truth_table")

    def test_free_drift_matches_clohessy_wiltshire(self):
        # circular orbit, no control/disturbance: nonlinear propagation in
        # the rotating frame must match the linearized closed form to 1e-6 m
        # over 100 s
        elements = orbit.OrbitElements(semimajor_axis_km=42139.0,
                                       eccentricity=0.0)
        nmo = elements.mean_motion_rad_s
        r = np.array([15.0, 2.0, -3.0])
        v = np.array([0.003, -0.002, 0.001])
        dt = 0.1
        c_o, d_o = orbit.coriolis_centrifugal(nmo, 0.0)
        t = 0.0
        state_r, state_v = r.copy(), v.copy()
        s0 = orbit.propagate_target(elements, 0.0)

        def deriv(ts, rr, vv):
            s = orbit.propagate_target(elements, ts)
            r_s = orbit.service_pos_inertial_km(s, rr)
            g = orbit.differential_gravity(s.target_pos_inertial_km, r_s,
                                           s.rot_vvlh_to_inertial)
            return vv, -c_o @ vv - d_o @ rr + g

        for k in range(1000):
            k1 = deriv(t, state_r, state_v)
            k2 = deriv(t + dt / 2, state_r + dt / 2 * k1[0], state_v + dt / 2 * k1[1])
            k3 = deriv(t + dt / 2, state_r + dt / 2 * k2[0], state_v + dt / 2 * k2[1])
            k4 = deriv(t + dt, state_r + dt * k3[0], state_v + dt * k3[1])
            state_r = state_r + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            state_v = state_v + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            t += dt

        # closed form in the classic frame (x radial, y along-track,
        # z orbit-normal); our frame is (along-track, radial, -normal)
        x0, y0, z0 = r[1], r[0], -r[2]
        vx0, vy0, vz0 = v[1], v[0], -v[2]
        n_ = nmo
        tt = 100.0
        snt, cnt = np.sin(n_ * tt), np.cos(n_ * tt)
        x = (4 - 3 * cnt) * x0 + snt / n_ * vx0 + 2 / n_ * (1 - cnt) * vy0
        y = (6 * (snt - n_ * tt) * x0 + y0 - 2 / n_ * (1 - cnt) * vx0
             + (4 * snt - 3 * n_ * tt) / n_ * vy0)
        z = z0 * cnt + vz0 / n_ * snt
        expected = np.array([y, x, -z])
        assert np.linalg.norm(state_r - expected) <= 1e-6


class TestCriterion9Determinism:
    def test_byte_identical_telemetry(self, tmp_path):
        cfg = inspectsim.load_builtin("freespace")
        paths = []
        for i in range(2):
            res = inspectsim.run(cfg)
            p = tmp_path / f"run{i}.csv"
            write_telemetry(res, p)
            paths.append(p)
        assert paths[0].read_bytes() == paths[1].read_bytes()
