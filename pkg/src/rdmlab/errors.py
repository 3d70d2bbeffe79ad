"""Exception and warning types shared across the package."""


class RdmLabError(Exception):
    """Base class for all package errors."""


class ZeroNormError(RdmLabError):
    """Wave function has (numerically) zero norm and cannot be normalized."""


class BoundaryLeakError(RdmLabError):
    """Probability mass reached the edge of the periodic domain."""


class DomainError(RdmLabError):
    """A parameter lies outside its admissible range."""


class EmptyInputError(RdmLabError):
    """An operation received an empty collection where data is required."""


class ScenarioError(RdmLabError):
    """Detector scenario is inconsistently specified."""


class CausalOrderError(RdmLabError):
    """No simultaneity frame exists for a non-spacelike event pair."""


class GeometryError(RdmLabError):
    """World-line geometry is unphysical (e.g. superluminal speeds)."""


class SingularPathError(RdmLabError):
    """A field singularity lies on (or too close to) the integration path."""


class BoundaryAmbiguous(RdmLabError):
    """Point lies on a loop boundary within tolerance; containment undefined."""


class ConfigError(RdmLabError):
    """Run configuration failed validation.

    ``problems`` lists every violation found, not just the first.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class FlatnessWarning(UserWarning):
    """Envelope too narrow for the flat-envelope fringe approximation."""
