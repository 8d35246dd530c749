# %% [markdown]
# # Circle actions and their Maslov data
#
# A circle action lifts to the square-determinant bundle.  Over a point `p`
# the lifted period-1 orbit is a loop in the total space, and integrating a
# connection form along it gives the number `Q(p)`.

# %%
import numpy as np

from maslov import actions
from maslov.actions import LinearCircleAction, SO3OnSphere, SphereRotation, TorusAction
from maslov.bundle import SphereConnection, TrivialConnection
from maslov.forms import liouville_form, random_exact_form

# %% [markdown]
# At a fixed point the orbit stays in one fiber, so `Q` is an integer and
# does not depend on the connection.  For weights `m` it is `2 sum(m)`.

# %%
rng = np.random.default_rng(0)
for m in [(1,), (1, 1), (2, -1), (3, 0, -1), (1, -1)]:
    a = LinearCircleAction(m)
    origin = np.zeros(2 * len(m))
    qs = [actions.q_beta(a, TrivialConnection(random_exact_form(a.dim, rng)), origin).value for _ in range(3)]
    print(m, actions.local_index(a, origin), qs, actions.resonance_type(a, origin))

# %% [markdown]
# Away from fixed points the base part of the connection contributes its
# loop integral.  With the Liouville form this is the enclosed area.

# %%
a = LinearCircleAction((1,))
p = np.array([0.3, 0.4])
print(actions.q_beta(a, TrivialConnection(liouville_form(1)), p).value, 2 + np.pi * p @ p)

# %% [markdown]
# On the sphere the two poles of a rotation carry different indices, which is
# only possible because the bundle is not trivial.  On R^2n every fixed point
# of a given action has the same index.

# %%
rot = SphereRotation((0.0, 0.0, 1.0))
print("poles:", actions.local_index(rot, np.array([0, 0, 1.0])), actions.local_index(rot, np.array([0, 0, -1.0])))
print("flat:", sorted({k for _, k in actions.fixed_point_indices(LinearCircleAction((1, 0)), 20)}))

# %% [markdown]
# A symplectic potential turns the connection into a momentum map.  On R^2
# the Liouville potential gives `pi |z|^2` plus the fiber term; on the sphere
# `-f / r` gives `p` itself as a vector in so(3)*.

# %%
mu = actions.momentum_map(a, actions.liouville_potential(1, vertical=0.0))
print(mu(p)[0] / (p @ p))
mu_s = actions.momentum_map(SO3OnSphere(), actions.sphere_potential())
q = np.array([0.6, 0.0, 0.8])
print(mu_s(q))

# %% [markdown]
# For a torus action each circle factor gives one coordinate; at common fixed
# points the vector lies in the even lattice.

# %%
torus = TorusAction((LinearCircleAction((1, 0)), LinearCircleAction((1, 2))))
print(actions.q_vector(torus, TrivialConnection(liouville_form(2)), np.zeros(4)))
print("drift:", actions.check_conservation(rot, SphereConnection(), q))
