from typing import Optional


class SceneGenError(Exception):
    """Base class for every error raised by the scenegen package."""

    exit_code = 2


class ConfigurationError(SceneGenError):
    """Invalid configuration. `key` names the offending field when known."""

    exit_code = 1

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class DimensionError(SceneGenError, ValueError):
    pass


class SingularFitError(SceneGenError):
    pass


class DegenerateReferenceError(SceneGenError, ValueError):
    pass


class CalibrationError(SceneGenError):
    pass


class BoundaryError(SceneGenError, IndexError):
    pass


class InvariantViolation(SceneGenError):
    pass


class NumericFailureError(SceneGenError):
    def __init__(self, step: int, block: str, detail: str = "non-finite activations"):
        self.step = step
        self.block = block
        super().__init__(f"{detail} at step {step}, block {block}")


class StageError(SceneGenError):
    """Wraps the first failing stage of a multi-stage run."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 2)
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")


class StorageError(SceneGenError):
    exit_code = 3

    def __init__(self, message: str, path=None):
        self.path = path
        super().__init__(f"{message} ({path})" if path is not None else message)
