"""Exception hierarchy.

Input problems derive from ``ValueError``; failures that arise while
computing on valid input derive from ``NumericalError``.  The CLI maps the
two families to exit codes 1 and 2.
"""


class PolytopeError(ValueError):
    """Malformed or unusable polytope input."""


class DimensionMismatchError(PolytopeError):
    pass


class EmptyPolytopeError(PolytopeError):
    def __init__(self, msg="empty polytope"):
        super().__init__(msg)


class UnboundedPolytopeError(PolytopeError):
    def __init__(self, msg="polytope is unbounded"):
        super().__init__(msg)


class NotFullDimensionalError(PolytopeError):
    def __init__(self, msg="not full-dimensional"):
        super().__init__(msg)


class UnboundedDirectionError(UnboundedPolytopeError):
    def __init__(self, msg="unbounded direction"):
        super().__init__(msg)


class NumericalError(RuntimeError):
    """A computation on valid input could not be completed."""


class NotPositiveDefiniteError(NumericalError):
    def __init__(self, msg="not positive definite"):
        super().__init__(msg)


class PivotLimitError(NumericalError):
    def __init__(self, msg="pivot limit"):
        super().__init__(msg)


class StateDriftError(NumericalError):
    def __init__(self, msg="state drift"):
        super().__init__(msg)


class FlatSampleError(NumericalError):
    def __init__(self, msg="flat sample"):
        super().__init__(msg)


class PhaseStarvedError(NumericalError):
    def __init__(self, msg="phase starved"):
        super().__init__(msg)
