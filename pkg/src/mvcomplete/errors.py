"""Exception types shared across the package."""


class PatternFormatError(ValueError):
    """A pattern document could not be parsed."""


class DimensionMismatchError(ValueError):
    """Coordinates or grid rows disagree with the declared shape."""


class DuplicateCoordinateError(ValueError):
    """A coordinate list names the same entry twice."""


class InvalidRankError(ValueError):
    """A rank triple or a shape/rank combination is inconsistent."""


class InsufficientSamplesError(ValueError):
    """Some column has fewer observed entries than its view rank requires."""

    def __init__(self, view: int, column: int, have: int, need: int):
        self.view = view
        self.column = column
        self.have = have
        self.need = need
        super().__init__(
            f"view-{view} column {column + 1} has {have} observed entries, "
            f"needs at least {need}"
        )


class SingularBlockError(ValueError):
    """A row block that must be inverted is numerically singular."""


class EnumerationCapExceeded(RuntimeError):
    """Subset search exceeded its node budget."""

    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"subset enumeration exceeded the node budget of {budget}")


class DegenerateRandomPointError(RuntimeError):
    """Repeated random-point evaluations disagree on the system rank."""
