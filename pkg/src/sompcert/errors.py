"""Exception types raised by :mod:`sompcert`."""


class DimensionError(ValueError):
    """Operands have incompatible or invalid shapes."""


class RankDeficiencyError(ValueError):
    """A matrix expected to have full column rank does not."""

    def __init__(self, message, rank=None, cols=None):
        super().__init__(message)
        self.rank = rank
        self.cols = cols


class AsymmetryError(ValueError):
    """A matrix expected to be symmetric is not."""


class NonConvergenceError(RuntimeError):
    """An iterative kernel exhausted its iteration limit."""


class BudgetExceededError(RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""

    def __init__(self, required, budget, what="supports"):
        super().__init__(
            f"enumeration requires {required} {what}, budget is {budget} "
            f"(raise it with --budget or SOMP_CERT_BUDGET)"
        )
        self.required = required
        self.budget = budget
