"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the command-line
front end can map failures to exit statuses without string matching.
"""


class MaslovError(Exception):
    code = "maslov-error"


class InvalidDimension(MaslovError, ValueError):
    code = "invalid-dimension"


class NotPositiveDefinite(MaslovError, ValueError):
    code = "not-positive-definite"


class AveragingFailed(MaslovError):
    code = "averaging-failed"


class CompatibleStructureFailed(MaslovError):
    code = "compatible-structure-failed"


class NotLagrangian(MaslovError, ValueError):
    code = "not-lagrangian"


class DegenerateFrame(MaslovError, ValueError):
    code = "degenerate-frame"


class OpenLoop(MaslovError, ValueError):
    code = "open-loop"


class UndersampledLoop(MaslovError):
    code = "undersampled-loop"


class AmbiguousDegree(MaslovError):
    code = "ambiguous-degree"


class WrongBundle(MaslovError, TypeError):
    code = "wrong-bundle"


class NotTangent(MaslovError, ValueError):
    code = "not-tangent"


class InvalidFrame(MaslovError, ValueError):
    code = "invalid-frame"


class NotIsotropy(MaslovError, ValueError):
    code = "not-isotropy"


class NotFixedPoint(MaslovError, ValueError):
    code = "not-fixed-point"


class NotPeriodic(MaslovError):
    code = "not-periodic"


class NotAPotential(MaslovError, ValueError):
    code = "not-a-potential"


class InvariantConnectionRequired(MaslovError, ValueError):
    code = "invariant-connection-required"


class NoFixedPoints(MaslovError):
    code = "no-fixed-points"


class IntegrationFailed(MaslovError):
    code = "integration-failed"


class LiftFailed(MaslovError):
    code = "lift-failed"


class InternalError(MaslovError, AssertionError):
    code = "internal-error"
