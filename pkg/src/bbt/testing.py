"""Test-block semantics and the test execution lifecycle.

A test is an ordinary script headed by the start-test hat. Running one:

1. the start block arms a 150-frame timeout (5 s of virtual time),
   locks external input, captures a snapshot and fires test-started;
2. frames run until the test thread finishes or the deadline passes;
3. a natural end keeps state changes (unless the script ended with the
   restore block); a timeout forcibly restores the snapshot;
4. either way the input lock is lifted and keys/mouse are reset.

Failing assertions never stop the run: every assertion executed is
recorded, and the test fails if any outcome is negative. A test that
completes without executing a single assertion passes vacuously and is
flagged, so always-green tests that check nothing stand out in reports.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

from .blocks import STAGE, Block, Project, Script
from .errors import EmptySuiteError, EvaluationError, TestAlreadyRunningError, TestNotFoundError
from .scheduler import FINISHED, FRAMES_PER_SECOND, TEST, Scheduler, Snapshot, Thread, Wait
from .values import to_number, to_string, values_equal
from . import runtime

DEFAULT_TIMEOUT_FRAMES = 5 * FRAMES_PER_SECOND

PASSED = "passed"
FAILED = "failed"
ERROR = "error"
IDLE = "idle"

TIMEOUT = "timeout"
ABORTED = "aborted"
EVALUATION_ERROR = "evaluation-error"
SPRITE_NOT_FOUND = "sprite-not-found"


@dataclass(frozen=True)
class AssertionOutcome:
    block_id: str
    kind: str  # equals | true | greater | less | error
    expected: str
    actual: str
    passed: bool
    message: str


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # not a pytest class

    name: str
    sprite_name: str
    script: Script
    unmatched: bool = False


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest class

    name: str
    sprite_name: str
    status: str  # passed | failed | error | idle
    reason: str = ""  # set for error status
    outcomes: tuple[AssertionOutcome, ...] = ()
    frames: int = 0
    vacuous: bool = False

    @property
    def passed(self) -> bool:
        return self.status == PASSED

    def first_failure(self) -> AssertionOutcome | None:
        for o in self.outcomes:
            if not o.passed:
                return o
        return None


@dataclass(frozen=True)
class SuiteResult:
    test_names: tuple[str, ...]
    results: tuple[TestResult, ...]
    status: str  # completed | aborted

    def by_name(self) -> dict[str, TestResult]:
        return {r.name: r for r in self.results}


class TestObserver:
    """Lifecycle callbacks; must be non-blocking."""

    __test__ = False  # not a pytest class

    def test_started(self, name: str) -> None:
        pass

    def assertion_evaluated(self, outcome: AssertionOutcome) -> None:
        pass

    def test_finished(self, result: TestResult) -> None:
        pass

    def suite_finished(self, result: SuiteResult) -> None:
        pass


def discover_tests(project: Project) -> list[TestCase]:
    """Tests in project order, then unmatched suite leftovers."""
    cases = [TestCase(s.test_name, owner, s) for owner, s in project.test_scripts()]
    cases.extend(
        TestCase(t.script.test_name, t.sprite_name, t.script, unmatched=True)
        for t in project.unmatched_tests
    )
    return cases


class TestRun:
    """Bookkeeping for the one test currently executing."""

    __test__ = False  # not a pytest class

    def __init__(self, sched: Scheduler, case: TestCase, observers):
        self.sched = sched
        self.case = case
        self.observers = list(observers)
        self.thread: Thread | None = None
        self.deadline: int | None = None
        self.snapshot: Snapshot | None = None
        self.outcomes: list[AssertionOutcome] = []
        self.restored = False
        self.start_frame = sched.state.frame
        self.frames_run = 0  # run_frame calls; unlike the clock, a restore cannot rewind it

    def notify(self, method, *args):
        for obs in self.observers:
            getattr(obs, method)(*args)

    def record(self, outcome: AssertionOutcome):
        self.outcomes.append(outcome)
        self.notify("assertion_evaluated", outcome)

    def record_eval_error(self, e: EvaluationError):
        self.record(
            AssertionOutcome(
                block_id=e.block_id,
                kind="error",
                expected="",
                actual="",
                passed=False,
                message=str(e),
            )
        )


# ---------------------------------------------------------------------------
# test block execution


def _arm_frames(seconds: float) -> int:
    return max(1, math.ceil(seconds * FRAMES_PER_SECOND))


def _exec_test_start(sched, thread, b, run):
    run.deadline = sched.state.frame + DEFAULT_TIMEOUT_FRAMES
    sched.state.input.locked = True
    run.snapshot = sched.capture(exclude_thread=thread)
    run.notify("test_started", run.case.name)
    return ("continue",)


def _exec_test_restore(sched, thread, b, run):
    sched.restore(run.snapshot)
    run.restored = True
    return ("finish",)


def _exec_test_set_timeout(sched, thread, b, run):
    secs = runtime.evaluate_number(sched, thread, b.input("SECONDS", 5.0))
    run.deadline = sched.state.frame + _arm_frames(secs)
    return ("continue",)


def _exec_test_yield(sched, thread, b, run):
    return ("soft",)


def _exec_test_wait_all_done(sched, thread, b, run):
    if not sched.program_threads_active():
        return ("continue",)
    return ("wait", Wait(kind="all-programs-done"))


def _exec_test_green_flag(sched, thread, b, run):
    sched.dispatch_event("green_flag")
    return ("soft",)


def _exec_test_press_key(sched, thread, b, run):
    key = b.field("KEY")
    sched.inject_input(key_down=key, force=True)
    sched.dispatch_event("key", key=key)
    return ("soft",)


def _exec_test_release_key(sched, thread, b, run):
    sched.inject_input(key_up=b.field("KEY"), force=True)
    return ("soft",)


def _exec_test_click_sprite(sched, thread, b, run):
    sched.dispatch_event("sprite_click", sprite=b.field("SPRITE"))
    return ("soft",)


def _exec_test_broadcast(sched, thread, b, run):
    message = runtime.evaluate_string(sched, thread, b.input("MESSAGE", ""))
    sched.dispatch_event("broadcast", message=message)
    return ("soft",)


def _exec_test_mouse_move(sched, thread, b, run):
    x = runtime.evaluate_number(sched, thread, b.input("X", 0.0))
    y = runtime.evaluate_number(sched, thread, b.input("Y", 0.0))
    sched.inject_input(mouse_x=x, mouse_y=y, force=True)
    return ("soft",)


def _exec_test_mouse_down(sched, thread, b, run):
    sched.inject_input(mouse_down=True, force=True)
    return ("soft",)


def _exec_test_mouse_up(sched, thread, b, run):
    sched.inject_input(mouse_down=False, force=True)
    return ("soft",)


def _exec_assert_true(sched, thread, b, run):
    cond = runtime.evaluate_boolean(sched, thread, b.input("CONDITION", False))
    run.record(
        AssertionOutcome(
            block_id=b.block_id,
            kind="true",
            expected="true",
            actual=to_string(cond),
            passed=cond,
            message=f"expected true, got {to_string(cond)}",
        )
    )
    return ("continue",)


def _exec_assert_equals(sched, thread, b, run):
    actual = runtime.evaluate(sched, thread, b.input("ACTUAL", ""))
    expected = runtime.evaluate(sched, thread, b.input("EXPECTED", ""))
    ok = values_equal(actual, expected)
    run.record(
        AssertionOutcome(
            block_id=b.block_id,
            kind="equals",
            expected=to_string(expected),
            actual=to_string(actual),
            passed=ok,
            message=f"expected {to_string(expected)}, got {to_string(actual)}",
        )
    )
    return ("continue",)


def _numeric_assert(sched, thread, b, run, kind):
    value = to_number(runtime.evaluate(sched, thread, b.input("VALUE", 0.0)))
    bound = to_number(runtime.evaluate(sched, thread, b.input("BOUND", 0.0)))
    if kind == "greater":
        ok = value > bound
        rel = ">"
    else:
        ok = value < bound
        rel = "<"
    run.record(
        AssertionOutcome(
            block_id=b.block_id,
            kind=kind,
            expected=f"{rel} {to_string(bound)}",
            actual=to_string(value),
            passed=ok,
            message=f"expected a value {rel} {to_string(bound)}, got {to_string(value)}",
        )
    )
    return ("continue",)


def _exec_assert_greater(sched, thread, b, run):
    return _numeric_assert(sched, thread, b, run, "greater")


def _exec_assert_less(sched, thread, b, run):
    return _numeric_assert(sched, thread, b, run, "less")


_TEST_HANDLERS = {
    "test_start": _exec_test_start,
    "test_restore": _exec_test_restore,
    "test_set_timeout": _exec_test_set_timeout,
    "test_yield": _exec_test_yield,
    "test_wait_all_scripts_done": _exec_test_wait_all_done,
    "test_green_flag": _exec_test_green_flag,
    "test_press_key": _exec_test_press_key,
    "test_release_key": _exec_test_release_key,
    "test_click_sprite": _exec_test_click_sprite,
    "test_broadcast": _exec_test_broadcast,
    "test_mouse_move": _exec_test_mouse_move,
    "test_mouse_down": _exec_test_mouse_down,
    "test_mouse_up": _exec_test_mouse_up,
    "test_assert_true": _exec_assert_true,
    "test_assert_equals": _exec_assert_equals,
    "test_assert_greater": _exec_assert_greater,
    "test_assert_less": _exec_assert_less,
}


def execute_test_block(sched: Scheduler, thread: Thread, block: Block):
    handler = _TEST_HANDLERS.get(block.opcode)
    if handler is None:
        raise EvaluationError(f"{block.opcode} cannot be executed as a statement", block.block_id)
    run = sched.active_test
    if run is None or run.thread is not thread:
        sched.warn(f"{block.opcode} outside a running test (block {block.block_id})")
        return ("continue",)
    return handler(sched, thread, block, run)


# ---------------------------------------------------------------------------
# lifecycle


def _finish_result(run: TestRun, status: str, reason: str = "") -> TestResult:
    sched = run.sched
    outcomes = tuple(run.outcomes)
    vacuous = False
    if status == "natural":
        if any(o.kind == "error" for o in outcomes):
            status, reason = ERROR, EVALUATION_ERROR
        elif any(not o.passed for o in outcomes):
            status = FAILED
        else:
            status = PASSED
            vacuous = not outcomes
    return TestResult(
        name=run.case.name,
        sprite_name=run.case.sprite_name,
        status=status,
        reason=reason,
        outcomes=outcomes,
        frames=run.frames_run,
        vacuous=vacuous,
    )


def run_test(
    sched: Scheduler,
    name: str,
    *,
    cancel: threading.Event | None = None,
    frame_budget: int | None = None,
    observers=(),
) -> TestResult:
    """Run one named test to completion on *sched*.

    Raises TestNotFoundError for unknown names and
    TestAlreadyRunningError when a test is already active.
    """
    for case in discover_tests(sched.project):
        if case.name == name:
            return _run_case(sched, case, cancel=cancel, frame_budget=frame_budget, observers=observers)
    raise TestNotFoundError(f"no test named {name!r}")


def _run_case(sched, case, *, cancel=None, frame_budget=None, observers=()) -> TestResult:
    if sched.active_test is not None:
        raise TestAlreadyRunningError(f"test {sched.active_test.case.name!r} is already running")

    run = TestRun(sched, case, observers)

    if case.unmatched:
        result = TestResult(
            name=case.name,
            sprite_name=case.sprite_name,
            status=ERROR,
            reason=SPRITE_NOT_FOUND,
        )
        run.notify("test_finished", result)
        return result

    owner = sched.state.stage if case.sprite_name == STAGE else sched.sprite_state(case.sprite_name)
    if owner is None:
        result = TestResult(
            name=case.name, sprite_name=case.sprite_name, status=ERROR, reason=SPRITE_NOT_FOUND
        )
        run.notify("test_finished", result)
        return result

    sched.active_test = run
    try:
        thread = sched._spawn(case.script, owner, TEST)
        run.thread = thread
        while True:
            if cancel is not None and cancel.is_set():
                sched.stop_all()
                result = _finish_result(run, ERROR, ABORTED)
                break
            sched.run_frame()
            run.frames_run += 1
            if thread.status == FINISHED:
                result = _finish_result(run, "natural")
                break
            if run.deadline is not None and sched.state.frame >= run.deadline:
                sched.restore(run.snapshot)
                result = _finish_result(run, ERROR, TIMEOUT)
                break
            if frame_budget is not None and run.frames_run >= frame_budget:
                if run.snapshot is not None:
                    sched.restore(run.snapshot)
                result = _finish_result(run, ERROR, TIMEOUT)
                break
    finally:
        sched.active_test = None
        sched.state.input.locked = False
        sched.reset_input()

    run.notify("test_finished", result)
    return result


def run_suite(
    sched: Scheduler,
    *,
    cancel: threading.Event | None = None,
    frame_budget: int | None = None,
    observers=(),
) -> SuiteResult:
    """Run every test of the loaded project in project order.

    Tests ending naturally or by timeout advance to the next; an abort
    stops the suite, leaving the remaining tests idle.
    """
    cases = discover_tests(sched.project)
    if not cases:
        raise EmptySuiteError("project contains no tests")
    results: list[TestResult] = []
    status = "completed"
    for case in cases:
        if cancel is not None and cancel.is_set():
            status = "aborted"
            break
        result = _run_case(sched, case, cancel=cancel, frame_budget=frame_budget, observers=observers)
        results.append(result)
        if result.status == ERROR and result.reason == ABORTED:
            status = "aborted"
            break
    # tests the abort prevented from starting stay idle
    for case in cases[len(results):]:
        results.append(TestResult(name=case.name, sprite_name=case.sprite_name, status=IDLE))
    suite = SuiteResult(
        test_names=tuple(c.name for c in cases),
        results=tuple(results),
        status=status,
    )
    for obs in observers:
        obs.suite_finished(suite)
    return suite
