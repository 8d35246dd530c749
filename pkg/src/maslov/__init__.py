"""Maslov indices and Maslov data of loops and circle actions.

Submodules: :mod:`~maslov.symplin` (linear symplectic algebra),
:mod:`~maslov.grassmann` (Lagrangian frames and loop degrees),
:mod:`~maslov.bundle` (circle bundles with connections),
:mod:`~maslov.sphere` (the frame bundle of S^2),
:mod:`~maslov.actions` (circle and torus actions) and
:mod:`~maslov.cli`.
"""

__version__ = "0.1.0"

from .actions import (
    LinearCircleAction,
    SO3OnSphere,
    TorusAction,
    check_conservation,
    equal_indices_flat,
    flow,
    lifted_flow_gamma2,
    liouville_potential,
    local_index,
    momentum_map,
    q_beta,
    q_vector,
    resonance_type,
    sphere_potential,
)
from .bundle import (
    SphereConnection,
    TrivialConnection,
    characteristic_number,
    connection_eval,
    curvature,
    holonomy,
    maslov_data,
)
from .conventions import get_conventions, use_conventions
from .errors import MaslovError
from .grassmann import SampledLoop, det_squared, loop_degree, maslov_index, unitary_of_frame
from .sphere import SphereRotation, gamma_winding_pair
from .symplin import (
    Metric,
    SymplecticForm,
    average_metric,
    build_compatible_j,
    sqrt_spd,
    standard_symplectic,
)

__all__ = [name for name in dir() if not name.startswith("_")]
