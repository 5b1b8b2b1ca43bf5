"""Exception types raised across the package."""


class LehmerError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LehmerError, ValueError):
    """The inputs are well formed but the requested quantity does not exist."""


class PipelineYieldsNonPositiveError(DomainError):
    def __init__(self, message, step=None, index=None, window=None):
        super().__init__(message)
        self.step = step
        self.index = index
        self.window = window


class ConstantSampleError(DomainError):
    """All normalized values are equal, so the transform is flat."""


class TargetOutOfRangeError(DomainError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SeriesDivergingError(DomainError):
    def __init__(self, message, partial_sums=()):
        super().__init__(message)
        self.partial_sums = tuple(partial_sums)


class NormalizationMismatchError(DomainError):
    """A sample does not meet the endpoint targets a distribution needs."""


class BelowBranchPointError(DomainError):
    """Argument lies below -1/e, where the principal Lambert W is not real."""


class GridNotSortedError(LehmerError, ValueError):
    pass


class OrderZeroError(LehmerError, ValueError):
    pass


class SeriesTooShortError(LehmerError, ValueError):
    pass


class ParseError(LehmerError):
    def __init__(self, row, reason):
        super().__init__(f"row {row}: {reason}")
        self.row = row
        self.reason = reason


class EmptyInputError(LehmerError):
    pass
