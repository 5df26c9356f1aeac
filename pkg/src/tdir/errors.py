"""Exception and warning types shared across the package."""


class UnboundedPoint(ValueError):
    """An operation that needs finite persistence met an infinite death."""


class NegativePersistence(ValueError):
    """A point with death < birth was constructed or read from disk."""


class ParseError(ValueError):
    """A CSV input line could not be parsed."""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


class InvalidDilation(ValueError):
    """Dilation factors must be finite and nonnegative."""


class InvalidPartitions(ValueError):
    """Grid searches need at least one partition."""


class DegenerateA(ValueError):
    """Dilating a diagram with zero maximal persistence cannot change its scale."""


class EmptyDiagram(ValueError):
    """An operation whose preconditions exclude the empty diagram received one."""


class EmptyDiagramWarning(UserWarning):
    """An empty diagram was handled by a documented fallback convention."""


class SmallLogImageWarning(UserWarning):
    """The log map produced coordinates below -50; results may be noise-dominated."""


class TooLarge(ValueError):
    """Input exceeds the size bound of an exhaustive reference routine."""


class TooManySimplices(RuntimeError):
    """The filtration would exceed the simplex budget."""


class AsymmetricMatrix(ValueError):
    """A distance matrix was not exactly symmetric with a zero diagonal."""


class OutsideBall(ValueError):
    """A point lies outside the open unit ball required by the hyperbolic metric."""


class ZeroVector(ValueError):
    """Cosine dissimilarity is undefined for zero vectors."""


class EmptyInput(ValueError):
    """A collection argument that must be nonempty was empty."""


class ClassTooSmall(ValueError):
    """A class has fewer points than the requested subsample size."""
