"""Exception and warning types raised across the package."""


class KPlaneError(Exception):
    """Base class for all errors raised by kplane."""


class DegenerateSpan(KPlaneError, ValueError):
    """A frame passed as a basis is (numerically) rank deficient."""


class DimensionMismatch(KPlaneError, ValueError):
    pass


class RankDeficient(KPlaneError, ValueError):
    """The derivative of a parametrization dropped rank at some point."""


class TransversalityViolation(KPlaneError, ValueError):
    """A plane fails condition (T) or (GT) against a manifold, or two
    subspaces that should be transverse are (nearly) not."""


class RootFindFailure(KPlaneError, RuntimeError):
    pass


class NormalWedgeDegenerate(KPlaneError, ValueError):
    pass


class TooManyMaps(KPlaneError, ValueError):
    pass


class WrongScenario(KPlaneError, ValueError):
    """Raised when a scan is asked to run on a scenario that does not
    exhibit the phenomenon it demonstrates."""


class ScenarioError(KPlaneError):
    """Base for scenario loading problems; ``path`` locates the bad field."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ParseError(ScenarioError):
    pass


class SchemaError(ScenarioError):
    pass


class ValidationError(ScenarioError):
    pass


class OscillationBudgetWarning(UserWarning):
    """Quadrature order is too low for the oscillation at the requested points.

    The value is still returned; treat its trailing digits with suspicion.
    """
