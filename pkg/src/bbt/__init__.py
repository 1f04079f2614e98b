"""Headless deterministic VM and test harness for a Scratch-like block
language: run block-based tests against block-based programs, single or
in cross-project batches."""

__version__ = "0.1.0"

from .blocks import Block, ColorRegion, Costume, Project, Script, SpriteDef, StageDef
from .build import assign_ids, blk, project, script, sprite, test_script
from .errors import (
    BbtError,
    EmptySuiteError,
    EvaluationError,
    FrameBudgetExceeded,
    ProjectLoadError,
    ProjectParseError,
    TestAlreadyRunningError,
    TestNotFoundError,
)
from .project_io import (
    BatchTestSuite,
    SuiteTest,
    extract_suite,
    inject_suite,
    load_project,
    load_suite,
    parse_project,
    parse_suite,
    save_project,
    save_suite,
    serialize_project,
    serialize_suite,
)
from .batch import BatchReport, batch_run, emit_report
from .scheduler import Scheduler, SchedulerObserver, Snapshot, TraceRecorder
from .testing import (
    AssertionOutcome,
    SuiteResult,
    TestObserver,
    TestResult,
    discover_tests,
    run_suite,
    run_test,
)
from .validate import Diagnostic, validate_project

__all__ = [
    "__version__",
    "AssertionOutcome",
    "BatchReport",
    "BatchTestSuite",
    "BbtError",
    "Block",
    "ColorRegion",
    "Costume",
    "Diagnostic",
    "EmptySuiteError",
    "EvaluationError",
    "FrameBudgetExceeded",
    "Project",
    "ProjectLoadError",
    "ProjectParseError",
    "Scheduler",
    "SchedulerObserver",
    "Script",
    "Snapshot",
    "SpriteDef",
    "StageDef",
    "SuiteResult",
    "SuiteTest",
    "TestAlreadyRunningError",
    "TestNotFoundError",
    "TestObserver",
    "TestResult",
    "TraceRecorder",
    "assign_ids",
    "batch_run",
    "blk",
    "discover_tests",
    "emit_report",
    "extract_suite",
    "inject_suite",
    "load_project",
    "load_suite",
    "parse_project",
    "parse_suite",
    "project",
    "run_suite",
    "run_test",
    "save_project",
    "save_suite",
    "script",
    "serialize_project",
    "serialize_suite",
    "sprite",
    "test_script",
    "validate_project",
]
