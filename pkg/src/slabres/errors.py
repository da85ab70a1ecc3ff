"""Exception hierarchy for slabres.

The CLI maps these onto exit codes: ConfigError -> 2, numerical failures
(GrazingOrderError, SingularSolveError, ConvergenceError) -> 3,
OutsideDiamondError -> 4.
"""


class SlabresError(Exception):
    """Base class for all slabres errors."""


class ConfigError(SlabresError):
    """Malformed or invalid structure/model configuration."""


class GrazingOrderError(SlabresError):
    """A diffraction order has eta_m exactly zero; the point is excluded."""


class OutsideDiamondError(SlabresError):
    """(kappa, omega) lies outside the single-propagating-order region."""


class SingularSolveError(SlabresError):
    """Linear solve failed and no least-squares fallback applied."""


class ConvergenceError(SlabresError):
    """An iterative routine (eigensolve, Newton, continuation) did not converge."""


class ModelConstraintError(ConfigError):
    """Anomaly-model coefficients violate a required constraint."""


class DiscontinuityError(SlabresError):
    """Evaluation requested exactly at the discontinuity point of the model."""
