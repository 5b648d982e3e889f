import dataclasses

import numpy as np
import pytest

import inspectsim
from inspectsim.dynamics import DisturbanceProfile, PlantParams


@pytest.fixture(scope="session")
def intelsat_result():
    """Full inspection-mission run, shared by the safety/monitor/bound checks."""
    config = inspectsim.load_builtin("intelsat30")
    return config, inspectsim.run(config)


@pytest.fixture(scope="session")
def freespace_result():
    config = inspectsim.load_builtin("freespace")
    return config, inspectsim.run(config)


def exact_model(config):
    """Scenario variant with no controller-side parameter mismatch."""
    p = config.plant
    return dataclasses.replace(
        config,
        plant=PlantParams(
            mass_true=p.mass_true, inertia_true=p.inertia_true,
            mass_model=p.mass_true, inertia_model=p.inertia_true,
        ),
    )


def with_disturbance(config, profile: DisturbanceProfile):
    return dataclasses.replace(config, disturbance=profile)


def rotation_about(axis, angle):
    axis = np.asarray(axis, float)
    axis = axis / np.linalg.norm(axis)
    k = np.array([
        [0.0, -axis[2], axis[1]],
        [axis[2], 0.0, -axis[0]],
        [-axis[1], axis[0], 0.0],
    ])
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)
