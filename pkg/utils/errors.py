"""Exception hierarchy for framepath. Every class carries the exit code the CLI returns."""


class FramePathException(Exception):
    """Base class for every error raised by the library."""

    exit_code = 1

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


# --- Precondition violations (exit 2) ---

class PreconditionException(FramePathException):
    """An input does not satisfy the precondition of the requested operation."""

    exit_code = 2


class DomainException(PreconditionException):
    """A parameter lies outside the admissible domain."""

    def __init__(self, parameter: str, value, constraint: str):
        self.parameter = parameter
        self.value = value
        self.constraint = constraint
        super().__init__(f"{parameter}={value} violates {constraint}.")


class AlignmentException(PreconditionException):
    """A dyadic time is finer than the grid it is evaluated on."""

    def __init__(self, value, level: int):
        self.value = value
        self.level = level
        super().__init__(f"{value} is not on the dyadic grid of level {level}.")


class ShapeException(PreconditionException):
    """Sequences have the wrong length or mismatched lengths."""

    def __init__(self, message: str):
        super().__init__(message)


class BoundsException(PreconditionException):
    """An index falls outside the sampled grid."""

    def __init__(self, index: int, upper: int):
        self.index = index
        self.upper = upper
        super().__init__(f"Index {index} outside [0, {upper}].")


class ResolutionException(PreconditionException):
    """A separation is finer than the summation level can resolve."""

    def __init__(self, gap, n: int):
        self.gap = gap
        self.n = n
        super().__init__(f"Separation {gap} is below the resolution 2^-{n}.")


class SettingsException(PreconditionException):
    """An environment setting cannot be parsed."""

    def __init__(self, name: str, raw: str):
        self.name = name
        self.raw = raw
        super().__init__(f"Setting {name}={raw!r} is invalid.")


# --- Capacity (exit 3) ---

class CapacityException(FramePathException):
    """A request would exceed a configured size cap."""

    exit_code = 3

    def __init__(self, what: str, requested: int, cap: int):
        self.what = what
        self.requested = requested
        self.cap = cap
        super().__init__(f"{what} {requested} exceeds the configured cap {cap}.")


# --- Output (exit 4) ---

class OutputException(FramePathException):
    """Writing an artifact failed."""

    exit_code = 4

    def __init__(self, path: str, cause: Exception):
        self.path = path
        self.cause = cause
        super().__init__(f"Could not write {path}: {cause}")
