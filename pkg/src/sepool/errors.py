"""Exception types shared across the package."""


class GraphFormatError(ValueError):
    """Malformed edge-list or feature file."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class TreeStructureError(ValueError):
    """A coding-tree edit or query whose structural precondition fails."""


class ShapeError(ValueError):
    """Matrix dimensions do not agree."""
