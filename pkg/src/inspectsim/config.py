"""Scenario configuration: TOML schema, validation, and built-in scenarios.

A scenario file fully determines a simulation run (orbit, spacecraft,
constraints, mission, gains, disturbances, integration settings). All angles
are degrees in the file and radians internally. Initial-state validation
enforces that the starting state and every desired state are inside the safe
region; violations are configuration errors, not runtime failures.
"""

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .constraints import ConeConstraint, EllipsoidObstacle, position_cbf
from .control import ControllerGains
from .dynamics import DisturbanceProfile, PlantParams
from .filters import FilterParams
from .mission import ArrivalCriteria, Checkpoint
from .orbit import OrbitElements

BUILTIN_SCENARIOS = ("intelsat30", "freespace")


class ConfigError(ValueError):
    """Invalid or unsafe scenario configuration (CLI exit code 4)."""


@dataclass(frozen=True)
class ScenarioConfig:
    orbit: OrbitElements
    plant: PlantParams
    disturbance: DisturbanceProfile
    gains: ControllerGains
    filter_params: FilterParams
    observer_gain_diag: np.ndarray
    obstacles: tuple[EllipsoidObstacle, ...]
    cones: tuple[ConeConstraint, ...]
    checkpoints: tuple[Checkpoint, ...]
    arrival: ArrivalCriteria
    sun_dir_inertial: np.ndarray
    camera_axis: np.ndarray
    r0: np.ndarray
    v0: np.ndarray
    R0: np.ndarray
    omega0: np.ndarray
    dt: float = 0.1
    max_duration: float = 12000.0
    strict: bool = False
    seed: int = 0
    name: str = ""
    provenance: dict = field(default_factory=dict)


def _vec3(table, key, where, default=None):
    if key not in table:
        if default is not None:
            return np.asarray(default, dtype=float)
        raise ConfigError(f"missing key {key!r} in [{where}]")
    v = np.asarray(table[key], dtype=float)
    if v.shape != (3,):
        raise ConfigError(f"{where}.{key} must be a 3-vector")
    return v


def _unit(v, what):
    n = float(np.linalg.norm(v))
    if n <= 0:
        raise ConfigError(f"{what} must be nonzero")
    return v / n


def _build_cones(table) -> tuple[ConeConstraint, ...]:
    if not table.get("enabled", True):
        return ()
    psi_s = np.radians(float(table.get("psi_sun_deg", 25.0)))
    psi_e = np.radians(float(table.get("psi_earth_deg", 30.0)))
    psi_c = np.radians(float(table.get("psi_cam_deg", 30.0)))
    t1 = _unit(_vec3(table, "tracker1_axis", "attitude_constraints"), "tracker1 axis")
    t2 = _unit(_vec3(table, "tracker2_axis", "attitude_constraints"), "tracker2 axis")
    cam = _unit(_vec3(table, "camera_axis", "attitude_constraints"), "camera axis")
    return (
        ConeConstraint(t1, "sun", float(np.cos(psi_s)), "a1"),
        ConeConstraint(t1, "earth", float(np.cos(psi_e)), "a2"),
        ConeConstraint(t2, "sun", float(np.cos(psi_s)), "a3"),
        ConeConstraint(t2, "earth", float(np.cos(psi_e)), "a4"),
        ConeConstraint(cam, "sun", float(np.cos(psi_c)), "a5"),
    )


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed scenario file {path}: {exc}") from exc
    return parse_config(raw, name=path.stem)


def parse_config(raw: dict, name: str = "") -> ScenarioConfig:
    try:
        orbit_tbl = raw["orbit"]
        orbit = OrbitElements(
            semimajor_axis_km=float(orbit_tbl["semimajor_axis_km"]),
            eccentricity=float(orbit_tbl["eccentricity"]),
            inclination_deg=float(orbit_tbl.get("inclination_deg", 0.0)),
            raan_deg=float(orbit_tbl.get("raan_deg", 0.0)),
            argp_deg=float(orbit_tbl.get("argp_deg", 0.0)),
            mean_anomaly_deg=float(orbit_tbl.get("mean_anomaly_deg", 0.0)),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid [orbit] section: {exc}") from exc

    sc = raw.get("spacecraft", {})
    try:
        mass = float(sc.get("mass_kg", 20.0))
        inertia = np.asarray(
            sc.get("inertia", np.diag([1.0, 1.0, 1.0]).tolist()), dtype=float
        )
        scale = float(sc.get("model_scale", 1.0))
        plant = PlantParams(
            mass_true=mass,
            inertia_true=inertia,
            mass_model=scale * mass,
            inertia_model=scale * inertia,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [spacecraft] section: {exc}") from exc

    dist = raw.get("disturbance", {})
    try:
        if dist.get("profile", "") == "sinusoidal_default":
            profile = DisturbanceProfile.sinusoidal_default()
            profile = profile.scaled(float(dist.get("scale", 1.0)))
        elif not dist:
            profile = DisturbanceProfile.zero()
        else:
            z = [0.0, 0.0, 0.0]
            profile = DisturbanceProfile(
                force_amp=dist.get("force_amp_N", z),
                force_freq=dist.get("force_freq_rad_s", z),
                force_phase=dist.get("force_phase_rad", z),
                torque_amp=dist.get("torque_amp_Nm", z),
                torque_freq=dist.get("torque_freq_rad_s", z),
                torque_phase=dist.get("torque_phase_rad", z),
            )
    except ValueError as exc:
        raise ConfigError(f"invalid [disturbance] section: {exc}") from exc

    try:
        gt = raw.get("gains", {})
        gains = ControllerGains(
            k_p1=float(gt.get("k_p1", 0.55)),
            k_p2=float(gt.get("k_p2", 0.2)),
            k_a1=float(gt.get("k_a1", 0.2)),
            k_a2=float(gt.get("k_a2", 1.1)),
        )
        ft = raw.get("filter", {})
        filter_params = FilterParams(
            alpha_p=float(ft.get("alpha_p", 0.55)),
            alpha_a=float(ft.get("alpha_a", 0.6)),
            gamma_p=float(ft.get("gamma_p", 0.01)),
            gamma_a=float(ft.get("gamma_a", 0.001)),
            v_max=float(ft.get("v_max_m_s", 0.2)),
            omega_max_deg_s=float(ft.get("omega_max_deg_s", 2.0)),
            eps=float(ft.get("eps", 0.05)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid gains/filter section: {exc}") from exc

    obs_tbl = raw.get("observer", {})
    gain_diag = np.asarray(
        obs_tbl.get("gain_diag", [0.1, 0.1, 0.1, 0.2, 0.2, 0.2]), dtype=float
    )
    if gain_diag.shape != (6,) or np.any(gain_diag <= 0):
        raise ConfigError("observer.gain_diag must be six positive values")

    try:
        obstacles = tuple(
            EllipsoidObstacle(
                center=_vec3(o, "center_m", "obstacles"),
                semi_axes=_vec3(o, "semi_axes_m", "obstacles"),
                name=str(o.get("name", f"obstacle_{i}")),
            )
            for i, o in enumerate(raw.get("obstacles", []))
        )
        att_tbl = raw.get("attitude_constraints", {"enabled": False})
        cones = _build_cones(att_tbl)
        # the camera boresight drives pointing control even with cones disabled
        camera_axis = _unit(
            _vec3(att_tbl, "camera_axis", "attitude_constraints",
                  default=[1.0, 0.0, 0.0]),
            "camera axis",
        )
        checkpoints = tuple(
            Checkpoint(
                position_m=_vec3(c, "position_m", "checkpoints"),
                pointing_dir_O=_unit(_vec3(c, "pointing_O", "checkpoints"), "pointing"),
            )
            for c in raw.get("checkpoints", [])
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not checkpoints:
        raise ConfigError("scenario must define at least one checkpoint")

    mt = raw.get("mission", {})
    arrival = ArrivalCriteria(
        position_tol_m=float(mt.get("position_tol_m", 0.1)),
        pointing_tol_deg=float(mt.get("pointing_tol_deg", 2.0)),
        dwell_s=float(mt.get("dwell_s", 30.0)),
    )

    env = raw.get("environment", {})
    sun = _unit(_vec3(env, "sun_dir_inertial", "environment",
                      default=[0.0, -0.9, 0.436]), "sun direction")

    init = raw.get("initial", {})
    r0 = _vec3(init, "r_m", "initial", default=[0.0, 0.0, 0.0])
    v0 = _vec3(init, "v_m_s", "initial", default=[0.0, 0.0, 0.0])
    omega0 = _vec3(init, "omega_rad_s", "initial", default=[0.0, 0.0, 0.0])
    r_raw = init.get("R", "identity")
    if r_raw == "identity":
        R0 = np.eye(3)
    else:
        R0 = np.asarray(r_raw, dtype=float).reshape(3, 3)
        if np.linalg.norm(R0.T @ R0 - np.eye(3)) > 1e-6:
            raise ConfigError("initial.R must be orthonormal")

    sim = raw.get("simulation", {})
    dt = float(sim.get("dt_s", 0.1))
    if dt <= 0:
        raise ConfigError("simulation.dt_s must be positive")
    max_duration = float(sim.get("max_duration_s", 12000.0))
    if max_duration <= 0:
        raise ConfigError("simulation.max_duration_s must be positive")

    config = ScenarioConfig(
        orbit=orbit,
        plant=plant,
        disturbance=profile,
        gains=gains,
        filter_params=filter_params,
        observer_gain_diag=gain_diag,
        obstacles=obstacles,
        cones=cones,
        checkpoints=checkpoints,
        arrival=arrival,
        sun_dir_inertial=sun,
        camera_axis=camera_axis,
        r0=r0, v0=v0, R0=R0, omega0=omega0,
        dt=dt,
        max_duration=max_duration,
        strict=bool(sim.get("strict", False)),
        seed=int(sim.get("seed", 0)),
        name=name,
        provenance=raw.get("provenance", {}),
    )
    validate_safety(config)
    return config


def validate_safety(config: ScenarioConfig) -> None:
    """Reject configurations whose initial or desired states violate a
    constraint: the guarantees only hold starting from the safe region."""
    from .orbit import environment_vectors, propagate_target
    from .constraints import attitude_cbf

    for label, point in [("initial position", config.r0)] + [
        (f"checkpoint {i + 1}", cp.position_m) for i, cp in enumerate(config.checkpoints)
    ]:
        for obs in config.obstacles:
            h, _ = position_cbf(point, obs)
            if h <= 0:
                raise ConfigError(
                    f"{label} is inside obstacle {obs.name!r} (h = {h:.4f} <= 0)"
                )

    if not config.cones:
        return
    orbit_state = propagate_target(config.orbit, 0.0)
    env = environment_vectors(orbit_state, config.r0, config.sun_dir_inertial)
    for cone in config.cones:
        h, _ = attitude_cbf(config.R0, cone, env)
        if h < 0:
            raise ConfigError(
                f"initial attitude violates cone constraint {cone.label} (h = {h:.4f} < 0)"
            )
    # desired camera pointings must stay clear of the sun cone (the camera
    # boresight is commanded onto Gamma, so this is the reachable-safety check
    # available at load time)
    camera = next((c for c in config.cones if c.label == "a5"), None)
    if camera is not None:
        for i, cp in enumerate(config.checkpoints):
            gamma_i = orbit_state.rot_vvlh_to_inertial @ cp.pointing_dir_O
            if camera.cos_half_angle - float(env.sun_dir_inertial @ gamma_i) < 0:
                raise ConfigError(
                    f"checkpoint {i + 1} pointing direction is inside the camera sun cone"
                )


def load_builtin(name: str) -> ScenarioConfig:
    """Load one of the scenarios shipped with the package."""
    if name not in BUILTIN_SCENARIOS:
        raise ConfigError(f"unknown builtin scenario {name!r}; known: {BUILTIN_SCENARIOS}")
    ref = resources.files("inspectsim").joinpath(f"data/{name}.cfg")
    with resources.as_file(ref) as path:
        return load_config(path)
