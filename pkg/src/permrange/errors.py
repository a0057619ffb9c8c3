class BudgetExceeded(RuntimeError):
    """A computation would exceed its configured work budget."""

    def __init__(self, what, needed, budget):
        self.what = what
        self.needed = needed
        self.budget = budget
        super().__init__(f"{what}: too large ({needed} > budget {budget})")


class MatrixFormatError(ValueError):
    pass


class IdentityFailure(AssertionError):
    """Two independent computations of the same quantity disagreed."""
