"""Exception hierarchy for the toolkit.

Every error type carries a stable ``code`` string so CLI consumers and the
array bindings can match failures without parsing messages.
"""


class BlendforgeError(Exception):
    """Base class for all toolkit errors."""

    code = "error"


class InvalidParameterError(BlendforgeError):
    code = "invalid-parameter"


class ShapeMismatchError(BlendforgeError):
    code = "shape-mismatch"


class DegenerateGeometryError(BlendforgeError):
    code = "degenerate-geometry"


class InvalidRegionError(BlendforgeError):
    code = "invalid-region"


class ConvergenceError(BlendforgeError):
    """Iterative solve failed to reach the requested residual."""

    code = "convergence"

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class UndefinedMetricError(BlendforgeError):
    code = "undefined-metric"


class ManifestIntegrityError(BlendforgeError):
    code = "manifest-integrity"


class ScoreJoinError(BlendforgeError):
    code = "score-join"
