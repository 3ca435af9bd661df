"""Exception hierarchy; each class carries the CLI exit code it maps to."""


class MopError(Exception):
    exit_code = 1


class ValidationError(MopError, ValueError):
    exit_code = 2


class BreakdownError(MopError):
    """A pairing (d_n or sigma_n) vanished during a Lanczos-type step."""
    exit_code = 3

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class EliminationError(MopError):
    """Zero pivot in an eliminator, unpivoted LU, or a bulge chase."""
    exit_code = 4

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class ConvergenceError(MopError):
    exit_code = 5

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index
