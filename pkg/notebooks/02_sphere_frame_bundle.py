# %% [markdown]
# # The frame bundle of the 2-sphere
#
# A unit tangent frame `u` at `p` is the rotation matrix `[u, p x u, p]`, so
# the frame bundle is SO(3).  The structural circle turns the frame about
# `p`.  The third Maurer-Cartan coordinate, divided by `2 pi`, is a
# connection form invariant under all rotations.

# %%
import numpy as np

from maslov import bundle, so3, sphere

# %% [markdown]
# Its derivative is a constant multiple `r` of the area form.  The constant
# is measured numerically, never typed in.

# %%
r, spread = sphere.measure_curvature_ratio()
print(f"r = {r:.12f}, spread over 100 frames = {spread:.1e}, 2 pi r = {2 * np.pi * r:.10f}")

# %% [markdown]
# Integrating the curvature over the sphere gives the characteristic
# number.  An independent check compares the sections spread out from the
# two poles along the equator; minus the degree of that clutching map is
# the same integer.

# %%
print("quadrature:", bundle.characteristic_number(bundle.SphereConnection()))
print("clutching :", sphere.clutching_degree())
from maslov.forms import polynomial_form

perturbed = bundle.SphereConnection(polynomial_form([(0, 0.4, [0, 1, 1]), (2, -0.3, [1, 0, 0])], 3))
print("perturbed:", bundle.characteristic_number(perturbed))

# %% [markdown]
# Horizontal transport around a latitude circle picks up the phase of the
# enclosed curvature.

# %%
theta0 = 0.8
phi = np.linspace(0, 2 * np.pi, 801)
lat = np.stack([np.sin(theta0) * np.cos(phi), np.sin(theta0) * np.sin(phi), np.cos(theta0) * np.ones_like(phi)], -1)
h = bundle.holonomy(bundle.SphereConnection(), lat, sphere.lift_point(lat[0]))
print(h, np.exp(-2j * np.pi * r * 2 * np.pi * (1 - np.cos(theta0))))

# %% [markdown]
# Rotating about the z axis fixes both poles.  Over the north pole the
# lifted orbit winds once around the fiber, over the south pole once the
# other way; the square-determinant bundle doubles both.

# %%
rot = sphere.SphereRotation((0.0, 0.0, 1.0))
for name, p in (("N", np.array([0.0, 0.0, 1.0])), ("S", np.array([0.0, 0.0, -1.0]))):
    print(name, sphere.gamma_winding_pair(rot, p))

# %% [markdown]
# The Hamiltonian of the rotation with angular velocity `v` is `-f(X_v) / r`.
# It comes out as the height function `p . v`.

# %%
rng = np.random.default_rng(1)
pts = rng.standard_normal((5, 3))
pts /= np.linalg.norm(pts, axis=1, keepdims=True)
v = np.array([0.3, -1.0, 0.5])
print(np.array([sphere.hamiltonian_of_rotation(v, p) for p in pts]) - pts @ v)
print("ranks:", {sphere.transitivity_rank(w) for w in so3.random_rotations(rng, 50)})
