"""Exception types shared across the package."""

from __future__ import annotations


class BbtError(Exception):
    """Base class for all package errors."""


class ProjectParseError(BbtError):
    """Malformed or structurally invalid project/suite document."""

    def __init__(self, message: str, path: str = "", offset: int | None = None):
        self.path = path
        self.offset = offset
        detail = message
        if path:
            detail = f"{message} (at {path})"
        if offset is not None:
            detail = f"{detail} (byte offset {offset})"
        super().__init__(detail)


class ProjectLoadError(BbtError):
    """Project parsed but failed validation."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(d.message for d in self.diagnostics[:5])
        more = "" if len(self.diagnostics) <= 5 else f" (+{len(self.diagnostics) - 5} more)"
        super().__init__(f"project has {len(self.diagnostics)} validation problem(s): {lines}{more}")


class EmptySuiteError(BbtError):
    """A suite operation needed at least one test."""


class TestNotFoundError(BbtError):
    __test__ = False


class TestAlreadyRunningError(BbtError):
    __test__ = False


class EvaluationError(BbtError):
    """A reporter could not be evaluated (e.g. unknown sprite name).

    Recorded as an error outcome on the enclosing test instead of
    crashing the run."""

    def __init__(self, message: str, block_id: str = ""):
        self.block_id = block_id
        super().__init__(message)


class FrameBudgetExceeded(BbtError):
    """advance_until ran out of frames before its predicate held."""

    def __init__(self, frames: int):
        self.frames = frames
        super().__init__(f"frame budget exhausted after {frames} frames")
