"""Exception hierarchy for aligndof."""


class AlignDofError(Exception):
    """Base class for every error raised by this package."""


class NonPositiveDimension(AlignDofError, ValueError):
    pass


class DimensionMismatch(AlignDofError, ValueError):
    pass


class InfeasibleKappa(AlignDofError, ValueError):
    """The (K_t, kappa_t, K_r) triple violates the feasibility interval."""


class InsufficientNullSpace(AlignDofError):
    """The coefficient matrix has fewer null directions than requested.

    On a generic channel draw this only happens when ``d`` exceeds the
    analytic bound, so seeing it otherwise points at a bad tolerance.
    """


class RankDeficientPrecoder(AlignDofError):
    pass


class NoFeasiblePlan(AlignDofError):
    pass


class DegenerateBound(AlignDofError, ValueError):
    pass


class InvalidKr(AlignDofError, ValueError):
    pass


class DirectionsBudgetExceeded(AlignDofError):
    pass


class PreconditionViolated(AlignDofError, ValueError):
    pass


class ConstructionError(AlignDofError):
    """Wraps an ia_core failure with the cell/system that produced it."""

    def __init__(self, message, cell=None, system=None, stage=None):
        super().__init__(message)
        self.cell = cell
        self.system = system
        self.stage = stage
