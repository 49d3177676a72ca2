"""Exception types shared across the library."""


class SignatureMismatchError(ValueError):
    """Binary operation between elements of different group signatures."""


class BranchCutError(ValueError):
    """Logarithm requested at or near the cut locus (rotation angle ~ pi)."""


class ConvergenceError(ArithmeticError):
    """An iterative numeric routine failed to converge."""


class InvalidSpecError(ValueError):
    """A dynamics or observation specification violates its constraints."""


class RankError(ValueError):
    """A matrix that must be invertible is singular or badly conditioned."""
