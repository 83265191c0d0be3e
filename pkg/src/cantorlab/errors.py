"""Exception types shared across the package."""


class CantorLabError(Exception):
    """Base class for all package-specific failures."""


class StageIndexError(CantorLabError, IndexError):
    """Stage index outside 0..depth."""


class PoleProximityError(CantorLabError, ValueError):
    """Evaluation point too close to a pole of the rational product."""


class BranchCutError(CantorLabError, ValueError):
    """Evaluation point sits on (or within tolerance of) a branch cut."""


class OnSetError(CantorLabError, ValueError):
    """Evaluation point has zero distance to the interval system."""


class InvalidWindowError(CantorLabError, ValueError):
    """A window boundary falls inside a block instead of a gap."""


class ContourContainmentError(CantorLabError, ValueError):
    """A contour is not contained in the region it must stay inside."""


class PathCollisionError(CantorLabError, ValueError):
    """A continuation path passes too close to a branch point or pole."""


class StepBudgetError(CantorLabError, RuntimeError):
    """Adaptive path refinement exceeded its evaluation budget."""


class PointPlacementError(CantorLabError, ValueError):
    """A query point lies outside the domain it must be inside."""


class ExcludedRegionError(CantorLabError, ValueError):
    """A point falls in a region removed from the working domain."""


class PlacementError(CantorLabError, ValueError):
    """A reference disc intersects the interval system."""


class EmptySetError(CantorLabError, ValueError):
    """An operation received an empty point set."""


class ConstructionStallError(CantorLabError, RuntimeError):
    """The certifier never accepted within the halving budget.

    Carries the audit records accumulated before the stall.
    """

    def __init__(self, message, audit):
        super().__init__(message)
        self.audit = audit


class PrecisionExhaustedError(CantorLabError, RuntimeError):
    """A deleted-interval length fell below what float64 can carry."""

    def __init__(self, message, audit=None):
        super().__init__(message)
        self.audit = audit or []
