"""Two-body orbit propagation of the target and the rotating relative-motion frame.

Internal unit convention: orbit propagation is done in km and km/s (avoids
cancellation at GEO radius); relative states elsewhere in the package are in
m and m/s, with conversion at this module's boundary (differential gravity is
returned in m/s^2).

Frame O (the target-fixed relative-motion frame) is defined as:
  axis 1: along-track (transverse, direction of motion for circular orbits)
  axis 2: radial, outward from Earth center
  axis 3: completes the right-handed triad (negative orbit normal)
This is the unique right-handed assignment consistent with the in-plane
coupling pattern of the Coriolis/centrifugal matrices below (axes 1 and 2
coupled, axis 3 decoupled).
"""

from dataclasses import dataclass

import numpy as np

MU_EARTH_KM3_S2 = 398600.4418

_KEPLER_TOL = 1e-13
_KEPLER_MAX_ITER = 50


class KeplerConvergenceError(RuntimeError):
    """Newton iteration on Kepler's equation failed to converge."""


@dataclass(frozen=True)
class OrbitElements:
    """Classical elements of the target orbit. Angles in degrees."""

    semimajor_axis_km: float
    eccentricity: float
    inclination_deg: float = 0.0
    raan_deg: float = 0.0
    argp_deg: float = 0.0
    mean_anomaly_deg: float = 0.0

    def __post_init__(self):
        if not (self.semimajor_axis_km > 0):
            raise ValueError(f"semimajor axis must be positive, got {self.semimajor_axis_km}")
        if not (0.0 <= self.eccentricity < 1.0):
            raise ValueError(f"only elliptic orbits supported (0 <= e < 1), got e={self.eccentricity}")
        for name in ("inclination_deg", "raan_deg", "argp_deg", "mean_anomaly_deg"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def mean_motion_rad_s(self) -> float:
        return float(np.sqrt(MU_EARTH_KM3_S2 / self.semimajor_axis_km**3))

    @property
    def period_s(self) -> float:
        return 2.0 * np.pi / self.mean_motion_rad_s


@dataclass(frozen=True)
class OrbitStateAtTime:
    """Target orbit state plus frame-O orientation at one epoch.

    rot_vvlh_to_inertial maps frame-O coordinates to inertial coordinates.
    """

    true_anomaly_rad: float
    f_dot: float
    f_ddot: float
    target_pos_inertial_km: np.ndarray
    target_vel_inertial_km_s: np.ndarray
    rot_vvlh_to_inertial: np.ndarray


@dataclass(frozen=True)
class EnvironmentVectors:
    """Unit direction vectors toward bright bodies, in the inertial frame."""

    sun_dir_inertial: np.ndarray
    earth_dir_inertial: np.ndarray


def true_anomaly_rates(elements: OrbitElements, f: float) -> tuple[float, float]:
    """First and second time derivative of the true anomaly at anomaly f [rad]."""
    a = elements.semimajor_axis_km
    e = elements.eccentricity
    denom = a**3 * (1.0 - e**2) ** 3
    f_dot = np.sqrt(MU_EARTH_KM3_S2 / denom) * (1.0 + e * np.cos(f)) ** 2
    f_ddot = -2.0 * MU_EARTH_KM3_S2 * e * np.sin(f) * (1.0 + e * np.cos(f)) ** 3 / denom
    return float(f_dot), float(f_ddot)


def coriolis_centrifugal(f_dot: float, f_ddot: float) -> tuple[np.ndarray, np.ndarray]:
    """Rotating-frame matrices C_o, D_o of the relative dynamics.

    The relative acceleration is v' = -C_o v - D_o r + g + F/m + d_f.
    Note the diagonal of D_o carries -f_dot^2: the centrifugal term must
    enter the acceleration with positive sign for the dynamics to reduce to
    the Clohessy-Wiltshire equations on a circular orbit (verified against
    the closed-form CW solution in the test suite).
    """
    if not (np.isfinite(f_dot) and np.isfinite(f_ddot)):
        raise ValueError("true-anomaly rates must be finite")
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


def differential_gravity(
    r_t_inertial_km: np.ndarray,
    r_s_inertial_km: np.ndarray,
    rot_vvlh_to_inertial: np.ndarray,
) -> np.ndarray:
    """Differential gravitational acceleration on the service, in frame O [m/s^2].

    g = mu * (r_t/|r_t|^3 - r_s/|r_s|^3), rotated into frame O.
    Vanishes as the service position approaches the target position.
    """
    nt = float(np.linalg.norm(r_t_inertial_km))
    ns = float(np.linalg.norm(r_s_inertial_km))
    if nt <= 0.0 or ns <= 0.0:
        raise ValueError("position vectors must have nonzero norm")
    g_inertial = MU_EARTH_KM3_S2 * (r_t_inertial_km / nt**3 - r_s_inertial_km / ns**3)
    return rot_vvlh_to_inertial.T @ g_inertial * 1000.0


def solve_kepler(mean_anomaly: float, e: float) -> float:
    """Eccentric anomaly from mean anomaly by Newton's method [rad]."""
    m = float(np.mod(mean_anomaly, 2.0 * np.pi))
    big_e = m if e < 0.8 else np.pi
    for _ in range(_KEPLER_MAX_ITER):
        delta = (big_e - e * np.sin(big_e) - m) / (1.0 - e * np.cos(big_e))
        big_e -= delta
        if abs(delta) < _KEPLER_TOL:
            return float(big_e)
    raise KeplerConvergenceError(
        f"Kepler iteration did not converge (M={m}, e={e}) after {_KEPLER_MAX_ITER} iterations"
    )


def _perifocal_to_inertial(elements: OrbitElements) -> np.ndarray:
    i = np.radians(elements.inclination_deg)
    raan = np.radians(elements.raan_deg)
    argp = np.radians(elements.argp_deg)
    cr, sr = np.cos(raan), np.sin(raan)
    ci, si = np.cos(i), np.sin(i)
    cw, sw = np.cos(argp), np.sin(argp)
    return np.array([
        [cr * cw - sr * sw * ci, -cr * sw - sr * cw * ci, sr * si],
        [sr * cw + cr * sw * ci, -sr * sw + cr * cw * ci, -cr * si],
        [sw * si, cw * si, ci],
    ])


def propagate_target(elements: OrbitElements, t: float) -> OrbitStateAtTime:
    """Two-body state of the target at time t [s] past the configured epoch."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    a = elements.semimajor_axis_km
    e = elements.eccentricity
    n = elements.mean_motion_rad_s
    m_anom = np.radians(elements.mean_anomaly_deg) + n * t
    big_e = solve_kepler(m_anom, e)
    f = 2.0 * np.arctan2(
        np.sqrt(1.0 + e) * np.sin(big_e / 2.0),
        np.sqrt(1.0 - e) * np.cos(big_e / 2.0),
    )
    f = float(np.mod(f, 2.0 * np.pi))
    r_mag = a * (1.0 - e * np.cos(big_e))
    # perifocal position/velocity
    p = a * (1.0 - e**2)
    r_pf = np.array([r_mag * np.cos(f), r_mag * np.sin(f), 0.0])
    v_pf = np.sqrt(MU_EARTH_KM3_S2 / p) * np.array([-np.sin(f), e + np.cos(f), 0.0])
    rot_pf = _perifocal_to_inertial(elements)
    r_i = rot_pf @ r_pf
    v_i = rot_pf @ v_pf
    f_dot, f_ddot = true_anomaly_rates(elements, f)

    # frame O axes in inertial coordinates: along-track, radial, -(orbit normal)
    radial = r_i / np.linalg.norm(r_i)
    h_vec = np.cross(r_i, v_i)
    normal = h_vec / np.linalg.norm(h_vec)
    along = np.cross(normal, radial)
    rot = np.column_stack([along, radial, -normal])
    return OrbitStateAtTime(
        true_anomaly_rad=f,
        f_dot=f_dot,
        f_ddot=f_ddot,
        target_pos_inertial_km=r_i,
        target_vel_inertial_km_s=v_i,
        rot_vvlh_to_inertial=rot,
    )


def service_pos_inertial_km(orbit_state: OrbitStateAtTime, r_rel_m: np.ndarray) -> np.ndarray:
    """Inertial position of the service given its frame-O relative position [m]."""
    return orbit_state.target_pos_inertial_km + orbit_state.rot_vvlh_to_inertial @ (
        np.asarray(r_rel_m, dtype=float) / 1000.0
    )


def environment_vectors(
    orbit_state: OrbitStateAtTime,
    r_rel_m: np.ndarray,
    sun_dir_inertial: np.ndarray,
) -> EnvironmentVectors:
    """Sun and Earth unit vectors seen by the service, in the inertial frame.

    The sun direction is a fixed configurable inertial vector (missions are
    short against the solar year); the Earth direction points from the
    service toward the Earth center and therefore varies with time.
    """
    sun = np.asarray(sun_dir_inertial, dtype=float)
    sun = sun / np.linalg.norm(sun)
    r_s = service_pos_inertial_km(orbit_state, r_rel_m)
    earth = -r_s / np.linalg.norm(r_s)
    return EnvironmentVectors(sun_dir_inertial=sun, earth_dir_inertial=earth)
