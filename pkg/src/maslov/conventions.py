"""Global sign conventions.

Two signs are not fixed by the geometry and have to be chosen:

``orientation``
    Direction of the structural circle action.  With ``+1`` the fiber phase
    of a frame increases when the frame turns counterclockwise about the
    outward normal of S^2, and multiplication by ``i`` on R^2n is the
    complex structure of the triple.  ``-1`` negates every winding,
    local index, characteristic number and Q value coherently.

``holonomy_sign``
    Horizontal transport along a loop accumulates the phase
    ``exp(holonomy_sign * -2 pi i * integral of s* f)`` relative to a section ``s``.

The active conventions live in a :class:`contextvars.ContextVar`, so the
override is scoped and thread-safe.
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Conventions:
    orientation: int = 1
    holonomy_sign: int = 1

    def __post_init__(self):
        if self.orientation not in (1, -1) or self.holonomy_sign not in (1, -1):
            raise ValueError("convention signs must be +1 or -1")

    def as_dict(self) -> dict:
        return asdict(self)


_ACTIVE: contextvars.ContextVar[Conventions] = contextvars.ContextVar(
    "maslov_conventions", default=Conventions()
)


def get_conventions() -> Conventions:
    return _ACTIVE.get()


def orientation() -> int:
    return _ACTIVE.get().orientation


@contextlib.contextmanager
def use_conventions(orientation: int | None = None, holonomy_sign: int | None = None):
    """Temporarily override the active sign conventions.

    >>> with use_conventions(orientation=-1):
    ...     get_conventions().orientation
    -1
    """
    current = _ACTIVE.get()
    new = Conventions(
        orientation=current.orientation if orientation is None else orientation,
        holonomy_sign=current.holonomy_sign if holonomy_sign is None else holonomy_sign,
    )
    token = _ACTIVE.set(new)
    try:
        yield new
    finally:
        _ACTIVE.reset(token)
