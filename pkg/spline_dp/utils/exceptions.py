class SplineDPError(Exception):
    """Base class of every error raised by the package.

    `exit_code` is what the command line returns when the error reaches it.
    """

    exit_code = 2


class ConfigError(SplineDPError):
    pass


class InvalidGrid(SplineDPError):
    pass


class InvalidTriangulation(SplineDPError):
    pass


class OutOfDomain(SplineDPError):
    exit_code = 3


class InvalidParam(SplineDPError):
    pass


class CheckpointMismatch(SplineDPError):
    pass


class NumericalFailure(SplineDPError):
    exit_code = 3

    def __init__(self, message: str, step: int | None = None):
        self.step = step
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message)
