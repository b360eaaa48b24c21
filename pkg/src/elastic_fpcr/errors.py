"""Exception and warning types shared across the package."""


class InvalidGridError(ValueError):
    """Sample grid is not a strictly increasing partition of [0, 1]."""


class GridMismatchError(ValueError):
    """Two objects that must share a grid were sampled on different grids."""


class InvalidWarpError(ValueError):
    """Warping function violates monotonicity or boundary pinning."""


class InjectivityRadiusError(ValueError):
    """Tangent vector too long for the exponential map to be injective."""


class UndefinedLogError(ValueError):
    """Inverse exponential map requested for (nearly) antipodal points."""


class ConvergenceError(RuntimeError):
    """An iterative routine exhausted its iteration budget.

    Carries the last iterate so callers can inspect how close it got.
    """

    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class ParameterError(ValueError):
    """A tuning parameter is outside its admissible range."""


class RankDeficiencyError(ValueError):
    """Regression design matrix does not have full column rank."""


class DegenerateLabelsError(ValueError):
    """Classification responses do not contain every required class."""


class ParseError(ValueError):
    """A dataset file could not be parsed; message names the offending spot."""


class StratificationError(ValueError):
    """Cross-validation folds cannot be stratified for the given labels."""


class DegeneratePhaseWarning(UserWarning):
    """Phase dispersion is (numerically) zero; a fallback weight was used."""
