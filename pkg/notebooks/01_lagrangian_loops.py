# %% [markdown]
# # Loops of Lagrangian planes in R^2n
#
# A Lagrangian plane is stored as a `2n x n` frame.  Orthonormalising it for
# the metric of a compatible complex structure gives a unitary matrix `U`,
# and `det(U)^2` is a point on the circle that depends only on the plane.
# The Maslov index of a loop of planes is the winding number of that circle
# point.

# %%
import numpy as np

from maslov import grassmann
from maslov.actions import LinearCircleAction, orbit_frame_loop
from maslov.forms import random_exact_form
from maslov.symplin import Metric, build_compatible_j, standard_symplectic

# %% [markdown]
# The horizontal plane maps to the identity and the vertical line in R^2
# maps to `i`, so its squared determinant is `-1`.

# %%
print(grassmann.unitary_of_frame(np.vstack([np.eye(2), np.zeros((2, 2))])))
print(grassmann.det_squared(grassmann.unitary_of_frame(np.array([[0.0], [1.0]]))))

# %% [markdown]
# Rotating the complex coordinates with weights `m = (2, -1)` carries the
# horizontal plane around a loop.  Its index is twice the weight sum.

# %%
action = LinearCircleAction((2, -1))
loop = orbit_frame_loop(action, np.zeros(4), n_intervals=128)
print(grassmann.maslov_index(loop))

# %% [markdown]
# The integer does not care which compatible structure is used, nor which
# exact 1-form trivialises the bundle along the loop.

# %%
rng = np.random.default_rng(0)
a = rng.standard_normal((4, 4))
triple = build_compatible_j(standard_symplectic(2), Metric(a @ a.T + 4 * np.eye(4)))
print("other J:", grassmann.maslov_index(loop, triple).degree)
orbit = orbit_frame_loop(LinearCircleAction((1,)), np.array([0.7, -0.2]))
print("five sections:", [grassmann.maslov_index(orbit, section_tau=random_exact_form(2, rng)).degree for _ in range(5)])

# %% [markdown]
# The unwrapping guard refuses loops whose phase jumps by a quarter turn or
# more between samples; refining fixes it.

# %%
from maslov.errors import UndersampledLoop

fast = orbit_frame_loop(LinearCircleAction((3, 2)), np.zeros(4), n_intervals=16)
try:
    grassmann.maslov_index(fast)
except UndersampledLoop as exc:
    print("refuse:", exc)
print(grassmann.maslov_index(orbit_frame_loop(LinearCircleAction((3, 2)), np.zeros(4), n_intervals=64)).degree)
