"""Exception hierarchy shared by all ballsaddle modules."""


class BallSaddleError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(BallSaddleError):
    """Operands of different dimensions were combined."""


class InvalidInput(BallSaddleError):
    """An argument violates a precondition (non-finite, wrong sign, bad shape)."""


class HypothesisViolation(BallSaddleError):
    """A hypothesis of the certified statement fails on the given problem.

    Carries an optional ``deficit`` quantifying how far the hypothesis is
    from holding (e.g. how much a required lower bound is missed by).
    """

    def __init__(self, message: str, deficit: float | None = None):
        super().__init__(message)
        self.deficit = deficit


class NonConvergence(BallSaddleError):
    """An iterative solver exhausted its iteration budget."""

    def __init__(self, message: str, residual: float | None = None,
                 iterations: int | None = None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class CheckFailure(BallSaddleError):
    """A computed solution fails one of its sampled verification checks.

    ``witness`` holds the sample point at which the check is violated.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class CertificationError(BallSaddleError):
    """A user-supplied oracle broke its contract (e.g. a projection that is
    not idempotent)."""


class ConfigError(BallSaddleError):
    """A run configuration or problem document fails strict validation.

    ``path`` is the dotted path of the offending field, e.g. ``problem.rho``.
    """

    def __init__(self, message: str, path: str | None = None):
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path
