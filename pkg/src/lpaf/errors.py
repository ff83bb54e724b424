"""Exception hierarchy shared by every module in the package."""


class LpafError(ValueError):
    """Base class; the CLI maps every subclass to exit code 3."""


class NonSquare(LpafError):
    pass


class WrongSize(LpafError):
    pass


class ShapeMismatch(LpafError):
    pass


class NotIdempotent(LpafError):
    pass


class NotComplexPermutation(LpafError):
    pass


class SizeCriterionViolated(LpafError):
    def __init__(self, k: int, used: int, available: int):
        super().__init__(
            f"target summand {k}: blocks need {used} rows but only {available} exist"
        )
        self.k = k


class MultiplicityMismatch(LpafError):
    pass


class NotAHomomorphism(LpafError):
    pass


class RankNotDivisible(LpafError):
    pass


class NotSpatial(LpafError):
    pass


class PreconditionViolated(LpafError):
    pass


class BadIndices(LpafError):
    pass


class BadLevels(LpafError):
    pass


class ExponentMismatch(LpafError):
    pass


class IllegalExponent(LpafError):
    pass


class EndpointMismatch(LpafError):
    pass


class LadderMismatch(LpafError):
    pass


class BudgetExhausted(RuntimeError):
    """Raised when a search hits its node cap before exhausting the tree."""

    def __init__(self, nodes: int, budget: int):
        super().__init__(f"node budget {budget} exhausted after {nodes} nodes")
        self.nodes = nodes
        self.budget = budget
