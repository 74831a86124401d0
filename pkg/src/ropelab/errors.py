"""Exception types shared across the library.

Each error carries a short machine-readable ``code`` so the CLI can map
failures onto its exit-code contract.
"""


class RopelabError(Exception):
    code = "ERROR"

    def __init__(self, message=""):
        super().__init__(message or self.code)


class InvalidRopeError(RopelabError):
    code = "INVALID_ROPE"


class NonGenericFiberError(RopelabError):
    code = "NON_GENERIC_FIBER"


class NonGenericContactError(RopelabError):
    code = "NON_GENERIC_CONTACT"


class GridMismatchError(RopelabError):
    code = "GRID_MISMATCH"


class ContainsEndpointError(RopelabError):
    code = "CONTAINS_ENDPOINT"


class SingularExtensionError(RopelabError):
    code = "SINGULAR_EXTENSION"


class ProjectionFailedError(RopelabError):
    code = "PROJECTION_FAILED"


class OdeSingularError(RopelabError):
    code = "ODE_SINGULAR"


class CoordinateSingularityError(RopelabError):
    """A sample sits on the non-positive x-axis where polar angles degenerate."""

    code = "COORDINATE_SINGULARITY"


class NotInSqueezeZoneError(RopelabError):
    """The rope is not in the admissible zone of the near-endpoint squeeze."""

    code = "NOT_IN_E"


class NotInSpaceError(RopelabError):
    code = "NOT_IN_SPACE"


class TemplateTooLongError(RopelabError):
    code = "TEMPLATE_TOO_LONG"


class NonGenericLoopError(RopelabError):
    code = "NON_GENERIC"


class IdentificationError(RopelabError):
    code = "IDENTIFICATION"
