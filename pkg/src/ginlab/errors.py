"""Exception types shared across the package.

Grouped by failure class so the command line layer can map them onto
exit codes without inspecting messages:

* validation errors  -- malformed model or config input
* geometry errors    -- reference point in an unsupported spectral region
* numerical errors   -- a computation ran but did not meet its contract
* artifact errors    -- a required file produced by an earlier stage is gone
"""


class GinlabError(Exception):
    """Base class for all package-specific errors."""


# ---------------------------------------------------------------- validation

class ValidationError(GinlabError):
    """Invalid model specification or run configuration."""


class WeightSumError(ValidationError):
    """Atom weights do not sum to one within tolerance."""


class DuplicateAtomError(ValidationError):
    """Two atoms share the same location."""


class NonpositiveParamError(ValidationError):
    """A parameter that must be positive (or nonnegative) is not."""


class DimensionError(ValidationError):
    """Matrix size too small for the requested block layout."""


class ConfigError(ValidationError):
    """Run configuration file is malformed or inconsistent."""


# ------------------------------------------------------------------ geometry

class GeometryError(GinlabError):
    """Reference point lies outside the regime the theory covers."""


class NotBulkError(GeometryError):
    """Reference point is not strictly inside the limit spectral support."""


class AtomCollisionError(GeometryError):
    """Reference point coincides with an atom of the deformation."""


# ----------------------------------------------------------------- numerical

class NumericalError(GinlabError):
    """A numerical routine failed to meet its accuracy contract."""


class ConvergenceError(NumericalError):
    """Iterative solver or eigensolver did not converge."""


class InsufficientDataError(NumericalError):
    """Too few samples to form a meaningful estimate."""


class InfeasibleError(NumericalError):
    """Variational problem has no feasible candidate at the expected point."""


class DegenerateSpectrumError(NumericalError):
    """Closed-form evaluation requires distinct eigenvalues."""


class EmptyLevelSetError(NumericalError):
    """Level set does not intersect the requested window."""


# ------------------------------------------------------------------ artifact

class MissingArtifactError(GinlabError):
    """An expected output file from a previous stage does not exist."""
