#!/usr/bin/env python3
"""Show how the velocity safety filter reshapes a nominal command.

A proportional guidance law wants to fly straight at a waypoint on the far
side of a keep-out ellipsoid.  The filter solves a small projection QP with
one barrier row per obstacle; as the craft approaches the surface the row
tightens and the commanded velocity bends tangentially around the obstacle.
No integration here — we just sweep the approach positions and inspect the
filtered commands.
"""

import numpy as np

from inspectsim.constraints import EllipsoidObstacle, position_cbf
from inspectsim.filters import FilterParams, nominal_velocity, safe_velocity

obstacle = EllipsoidObstacle(center=[0.0, 0.0, 0.0], semi_axes=[3.0, 3.0, 3.0])
params = FilterParams()
waypoint = np.array([-6.0, 0.0, 0.0])

print(f"{'position':>22} {'h':>8} {'nominal v':>24} {'filtered v':>24}")
# approach along +x with a slight lateral offset so the tangent direction
# is well defined
for x in (8.0, 6.0, 5.0, 4.0, 3.5, 3.2):
    r = np.array([x, 0.4, 0.0])
    h, grad = position_cbf(r, obstacle)
    v_c = nominal_velocity(r - waypoint, k_p1=0.55)
    out = safe_velocity(v_c, np.array([h]), grad[None, :], params)
    mark = " <- row active" if not np.allclose(out.value, np.clip(
        v_c, -params.v_max, params.v_max)) else ""
    print(f"{np.array2string(r, precision=1):>22} {h:8.3f} "
          f"{np.array2string(v_c, precision=3):>24} "
          f"{np.array2string(out.value, precision=3):>24}{mark}")

# the filtered command always satisfies the barrier row, so the closed loop
# can never be steered into the obstacle by the guidance layer
r = np.array([3.2, 0.4, 0.0])
h, grad = position_cbf(r, obstacle)
out = safe_velocity(nominal_velocity(r - waypoint, 0.55),
                    np.array([h]), grad[None, :], params)
margin = grad @ out.value + params.alpha_p * h - params.gamma_p * np.linalg.norm(grad)
print(f"\nbarrier row residual at closest approach: {margin:.2e} "
      "(zero to solver precision: the row is tight)")
