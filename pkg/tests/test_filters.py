"""Safety filters: nominal laws, QP assembly, fallback and margin behavior."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rotation_about
from inspectsim import filters
from inspectsim.constraints import ActiveSet
from inspectsim.filters import (
    FilterParams,
    nominal_angular_velocity,
    nominal_velocity,
    safe_angular_velocity,
    safe_velocity,
)

P = FilterParams()


class TestParams:
    def test_defaults(self):
        assert P.alpha_p == 0.55 and P.alpha_a == 0.6
        assert P.gamma_p == 0.01 and P.gamma_a == 0.001
        assert P.omega_max == pytest.approx(np.radians(2.0))

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            FilterParams(alpha_p=0.0)
        with pytest.raises(ValueError):
            FilterParams(v_max=-1.0)
        with pytest.raises(ValueError):
            FilterParams(eps=0.0)


class TestNominalVelocity:
    def test_zero_error(self):
        assert np.allclose(nominal_velocity(np.zeros(3), 0.55), 0.0)

    def test_proportional(self):
        assert np.allclose(nominal_velocity(np.array([1.0, 0, 0]), 0.55),
                           [-0.55, 0.0, 0.0])

    def test_linearity(self):
        r = np.array([0.3, -1.2, 0.7])
        assert np.allclose(nominal_velocity(2 * r, 0.55),
                           2 * nominal_velocity(r, 0.55))


class TestNominalAngularVelocity:
    def test_aligned_zero(self):
        w = nominal_angular_velocity(np.eye(3), [1.0, 0, 0], [1.0, 0, 0], 0.2)
        assert np.allclose(w, 0.0)

    def test_orthogonal_norm(self):
        w = nominal_angular_velocity(np.eye(3), [0.0, 1.0, 0], [1.0, 0, 0], 0.2)
        assert np.linalg.norm(w) == pytest.approx(0.2)

    def test_antialigned_degenerate(self):
        w = nominal_angular_velocity(np.eye(3), [-1.0, 0, 0], [1.0, 0, 0], 0.2)
        assert np.allclose(w, 0.0)

    @given(st.integers(0, 10_000))
    @settings(max_examples=200, deadline=None)
    def test_norm_bounded_by_gain(self, seed):
        rng = np.random.default_rng(seed)
        rot = rotation_about(rng.normal(size=3), rng.uniform(0, np.pi))
        gamma = rng.normal(size=3)
        gamma /= np.linalg.norm(gamma)
        w = nominal_angular_velocity(rot, gamma, [1.0, 0.0, 0.0], 0.2)
        assert np.linalg.norm(w) <= 0.2 + 1e-12


class TestSafeVelocity:
    def test_unconstrained_passthrough(self):
        v_c = np.array([0.05, -0.1, 0.0])
        res = safe_velocity(v_c, np.array([50.0]), np.array([[1.0, 0, 0]]), P)
        assert np.allclose(res.value, v_c)
        assert not res.degraded

    def test_hand_kkt_single_row(self):
        # row: 4 v_x >= -0.55*0.5 + 0.01*4  =>  v_x >= -0.05875
        res = safe_velocity(np.array([-0.2, 0.0, 0.0]),
                            np.array([0.5]), np.array([[4.0, 0.0, 0.0]]), P)
        assert res.value[0] == pytest.approx(-0.05875, abs=1e-9)
        assert np.allclose(res.value[1:], 0.0, atol=1e-9)

    def test_zero_margin_relaxes_constraint(self):
        p0 = FilterParams(gamma_p=0.0)
        res = safe_velocity(np.array([-0.2, 0.0, 0.0]),
                            np.array([0.5]), np.array([[4.0, 0.0, 0.0]]), p0)
        assert res.value[0] == pytest.approx(-0.275 / 4.0, abs=1e-9)

    def test_empty_constraint_list_box_clamp(self):
        res = safe_velocity(np.array([0.5, 0.0, 0.0]), np.zeros(0),
                            np.zeros((0, 3)), P)
        assert np.allclose(res.value, [0.2, 0.0, 0.0])

    def test_idempotent_on_safe_input(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            h = rng.uniform(0.2, 5.0, size=4)
            grads = rng.normal(size=(4, 3))
            v_c = rng.uniform(-P.v_max, P.v_max, size=3)
            ok = all(grads[i] @ v_c >= -P.alpha_p * h[i]
                     + P.gamma_p * np.linalg.norm(grads[i]) for i in range(4))
            if not ok:
                continue
            res = safe_velocity(v_c, h, grads, P)
            assert np.allclose(res.value, v_c, atol=1e-8)

    def test_output_always_in_box(self):
        rng = np.random.default_rng(22)
        for _ in range(300):
            h = rng.uniform(-0.5, 2.0, size=3)
            grads = rng.normal(size=(3, 3))
            v_c = rng.uniform(-0.5, 0.5, size=3)
            res = safe_velocity(v_c, h, grads, P)
            assert np.all(np.abs(res.value) <= P.v_max + 1e-12)

    def test_monotone_margin(self):
        # growing gamma_p never decreases the worst row slack
        rng = np.random.default_rng(23)
        for _ in range(50):
            h = rng.uniform(0.1, 1.0, size=3)
            grads = rng.normal(size=(3, 3))
            v_c = rng.uniform(-0.2, 0.2, size=3)
            slacks = []
            for gamma in (0.0, 0.01, 0.05):
                p = FilterParams(gamma_p=gamma)
                res = safe_velocity(v_c, h, grads, p)
                if res.degraded:
                    break
                slacks.append(min(
                    grads[i] @ res.value + P.alpha_p * h[i]
                    - gamma * np.linalg.norm(grads[i]) for i in range(3)
                ))
            for s in slacks:
                assert s >= -1e-8

    def test_infeasible_fallback_flagged(self):
        # impossible row: zero gradient with positive right-hand side
        res = safe_velocity(np.zeros(3), np.array([-0.5]),
                            np.array([[0.0, 0.0, 0.0]]), P)
        assert res.degraded
        assert np.all(np.abs(res.value) <= P.v_max + 1e-12)


class TestSafeAngularVelocity:
    AXES = {"a5": np.array([1.0, 0.0, 0.0])}

    def test_slack_constraints_passthrough(self):
        active = ActiveSet(members=("a5",), h_values=np.array([1, 1, 1, 1, 0.5]))
        grads = {"a5": np.array([0.0, 0.5, 0.0])}
        w_c = np.array([0.01, 0.0, 0.0])
        res = safe_angular_velocity(w_c, np.zeros(3), active, self.AXES, grads, P)
        assert np.allclose(res.value, w_c)

    def test_zero_omega_drops_drift_term(self):
        # at rest, the row is Y w >= -alpha_a h + gamma_a ||Y||
        h5 = 0.01
        y = np.array([0.0, 1.0, 0.0])
        active = ActiveSet(members=("a5",),
                           h_values=np.array([1, 1, 1, 1, h5]))
        w_c = np.array([0.0, -0.03, 0.0])
        res = safe_angular_velocity(w_c, np.zeros(3), active, self.AXES,
                                    {"a5": y}, P)
        bound = -P.alpha_a * h5 + P.gamma_a
        assert res.value[1] == pytest.approx(bound, abs=1e-9)

    def test_drift_term_orthogonal_unit(self):
        # ||omega|| * ||P_B x omega|| = 1 for orthogonal unit vectors
        omega = np.array([0.0, 0.0, 1.0])
        drift = np.linalg.norm(omega) * np.linalg.norm(
            np.cross(self.AXES["a5"], omega))
        assert drift == pytest.approx(1.0)

    def test_output_in_box(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            y = rng.normal(size=3)
            active = ActiveSet(members=("a5",),
                               h_values=np.append(rng.uniform(0, 1, 4),
                                                  rng.uniform(-0.2, 0.5)))
            w_c = rng.uniform(-0.1, 0.1, size=3)
            omega = rng.uniform(-0.03, 0.03, size=3)
            res = safe_angular_velocity(w_c, omega, active, self.AXES,
                                        {"a5": y}, P)
            assert np.all(np.abs(res.value) <= P.omega_max + 1e-12)
