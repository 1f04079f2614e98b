"""Command-line front end.

Exit codes: 0 when every selected test passed, 1 when at least one
failed, timed out or errored, 2 for usage or load problems. Reports are
deterministic for a given --seed; the seed defaults to 0 (or BBT_SEED)
so grading runs reproduce by default. Ctrl-C aborts the current test
and stops the remaining sequence, like pressing the stop button.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
import threading
from pathlib import Path

from . import __version__
from .batch import batch_run, emit_report, test_result_to_json
from .errors import BbtError, ProjectLoadError, ProjectParseError
from .project_io import (
    extract_suite,
    inject_suite,
    load_project,
    load_suite,
    parse_project,
    save_project,
    save_suite,
)
from .scheduler import Scheduler
from .testing import PASSED, TestObserver, TestResult, run_suite, run_test

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bbt",
        description="Run block-based tests against block-based programs.",
    )
    parser.add_argument("--version", action="version", version=f"bbt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one test or a project's whole test sequence")
    run.add_argument("project", help="project file (.proj.json)")
    run.add_argument("--test", help="run only the test with this name")
    run.add_argument("--seed", type=int, default=None, help="RNG seed (default: $BBT_SEED or 0)")
    run.add_argument("--format", choices=["json"], default="json", help="machine report format")
    run.add_argument("--out", help="write the machine report to this file")
    run.add_argument("--frame-budget", type=int, default=None, help="hard per-test frame cap")
    run.add_argument("-v", "--verbose", action="count", default=0)

    batch = sub.add_parser("batch", help="run a batch test suite across many projects")
    batch.add_argument("projects", nargs="+", help="project files")
    batch.add_argument("--suite", required=True, help="batch suite file (.bbt.json)")
    batch.add_argument("--seed", type=int, default=None, help="RNG seed (default: $BBT_SEED or 0)")
    batch.add_argument("--format", choices=["csv", "json", "tap"], default="csv")
    batch.add_argument("--out", help="write the report to this file")
    batch.add_argument("--parallelism", type=int, default=1)
    batch.add_argument("--fail-fast", action="store_true", help="stop after the first failing file")
    batch.add_argument("-v", "--verbose", action="count", default=0)

    val = sub.add_parser("validate", help="check a project file against the block catalog")
    val.add_argument("project")

    ext = sub.add_parser("extract-suite", help="extract a project's tests into a suite file")
    ext.add_argument("project")
    ext.add_argument("--out", required=True, help="suite file to write")
    ext.add_argument("--name", help="suite name (default: project file stem)")

    inj = sub.add_parser("inject-suite", help="replace a project's tests with a suite's")
    inj.add_argument("project")
    inj.add_argument("--suite", required=True)
    inj.add_argument("--out", required=True, help="project file to write")
    return parser


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("BBT_SEED", "")
    try:
        return int(env) if env else 0
    except ValueError:
        return 0


def _write_report(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))


class _Cancel:
    """SIGINT -> cancellation token, restored on exit."""

    def __init__(self):
        self.event = threading.Event()
        self._old = None

    def __enter__(self):
        try:
            self._old = signal.signal(signal.SIGINT, lambda *a: self.event.set())
        except ValueError:  # not on the main thread
            self._old = None
        return self.event

    def __exit__(self, *exc):
        if self._old is not None:
            signal.signal(signal.SIGINT, self._old)
        return False


class _Verbose(TestObserver):
    def test_started(self, name):
        print(f"  running {name} ...")

    def assertion_evaluated(self, outcome):
        mark = "ok" if outcome.passed else "NOT OK"
        print(f"    {mark}: {outcome.message}")


def _describe(r: TestResult) -> str:
    if r.status == PASSED:
        note = " (vacuous: no assertions executed)" if r.vacuous else ""
        return f"PASS  {r.name}{note} [{r.frames} frames]"
    if r.status == "failed":
        first = r.first_failure()
        return f"FAIL  {r.name}: {first.message if first else ''} [{r.frames} frames]"
    return f"ERROR {r.name}: {r.reason} [{r.frames} frames]"


def _cmd_run(args) -> int:
    seed = _resolve_seed(args.seed)
    project = load_project(args.project)
    sched = Scheduler(project, seed=seed)
    observers = [_Verbose()] if args.verbose else []
    with _Cancel() as cancel:
        if args.test:
            results = [
                run_test(sched, args.test, cancel=cancel, frame_budget=args.frame_budget, observers=observers)
            ]
            status = "completed"
        else:
            suite_result = run_suite(
                sched, cancel=cancel, frame_budget=args.frame_budget, observers=observers
            )
            results = list(suite_result.results)
            status = suite_result.status

    for r in results:
        print(_describe(r))
    passed = sum(1 for r in results if r.passed)
    print(f"{passed}/{len(results)} passed" + (" (aborted)" if status == "aborted" else ""))

    report = {
        "formatVersion": 1,
        "project": args.project,
        "seed": seed,
        "status": status,
        "results": [test_result_to_json(r) for r in results],
    }
    _write_report((json.dumps(report, indent=1, sort_keys=True) + "\n").encode(), args.out)
    all_ok = status == "completed" and all(r.passed for r in results)
    return EXIT_OK if all_ok else EXIT_FAILURES


def _cmd_batch(args) -> int:
    seed = _resolve_seed(args.seed)
    suite = load_suite(args.suite)
    with _Cancel() as cancel:
        report = batch_run(
            args.projects,
            suite,
            seed=seed,
            parallelism=args.parallelism,
            fail_fast=args.fail_fast,
            cancel=cancel,
            version=__version__,
        )
    counts = report.summary()
    for name in report.test_names:
        print(f"{name}: {counts[name]}/{len(report.rows)} passed")
    _write_report(emit_report(report, args.format), args.out)
    return EXIT_OK if report.all_passed() else EXIT_FAILURES


def _cmd_validate(args) -> int:
    raw = Path(args.project).read_bytes()
    try:
        parse_project(raw)
    except ProjectLoadError as e:
        for d in e.diagnostics:
            print(d)
        print(f"{len(e.diagnostics)} problem(s) found")
        return EXIT_USAGE
    print("ok")
    return EXIT_OK


def _cmd_extract(args) -> int:
    project = load_project(args.project)
    name = args.name or Path(args.project).name.split(".")[0]
    suite = extract_suite(project, name=name)
    save_suite(suite, args.out)
    print(f"wrote {len(suite.tests)} test(s) to {args.out}")
    return EXIT_OK


def _cmd_inject(args) -> int:
    project = load_project(args.project)
    suite = load_suite(args.suite)
    injected = inject_suite(project, suite)
    save_project(injected, args.out)
    unmatched = len(injected.unmatched_tests)
    note = f" ({unmatched} unmatched)" if unmatched else ""
    print(f"injected {len(suite.tests) - unmatched} test(s) into {args.out}{note}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    handlers = {
        "run": _cmd_run,
        "batch": _cmd_batch,
        "validate": _cmd_validate,
        "extract-suite": _cmd_extract,
        "inject-suite": _cmd_inject,
    }
    try:
        return handlers[args.command](args)
    except (ProjectParseError, ProjectLoadError, BbtError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_FAILURES


if __name__ == "__main__":
    sys.exit(main())
