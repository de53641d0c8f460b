"""Exception hierarchy shared by every lspacf module."""


class LspacfError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(LspacfError, ValueError):
    pass


class DomainError(LspacfError, ValueError):
    """A rescaled time or similar argument fell outside its domain."""


class SampleTooSmallError(LspacfError, ValueError):
    """The sieve regression would have fewer rows than columns."""


class SingularSystemError(LspacfError, ArithmeticError):
    """A Toeplitz system or Gram matrix is numerically singular."""


class ModelUnstableError(LspacfError, ValueError):
    """A frozen AR polynomial has a root on or inside the unit circle."""


class UnsupportedModelError(LspacfError, NotImplementedError):
    pass


class UnknownScenarioError(LspacfError, KeyError):
    pass
