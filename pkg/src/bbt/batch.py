"""Batch execution: one test suite applied across many project files.

Every file gets a fresh scheduler seeded from (global seed, file name),
so results do not depend on row order or parallelism. The report is a
file x test matrix; cells use the vocabulary pass / fail / timeout /
error. Serialized reports are byte-stable: the timestamp lives in a
metadata field that golden comparisons ignore (and is empty unless the
caller supplies one).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import BbtError, EmptySuiteError, ProjectLoadError, ProjectParseError
from .project_io import BatchTestSuite, inject_suite, load_project
from .scheduler import Scheduler
from .testing import (
    ABORTED,
    ERROR,
    FAILED,
    PASSED,
    TIMEOUT,
    AssertionOutcome,
    TestResult,
    run_suite,
)

CELL_PASS = "pass"
CELL_FAIL = "fail"
CELL_TIMEOUT = "timeout"
CELL_ERROR = "error"


@dataclass(frozen=True)
class BatchCell:
    test_name: str
    status: str  # pass | fail | timeout | error
    detail: str = ""
    frames: int = 0
    vacuous: bool = False
    outcomes: tuple[AssertionOutcome, ...] = ()


@dataclass(frozen=True)
class BatchRow:
    label: str
    path: str
    cells: tuple[BatchCell, ...]
    load_error: str = ""


@dataclass(frozen=True)
class BatchReport:
    suite_name: str
    test_names: tuple[str, ...]
    rows: tuple[BatchRow, ...]
    seed: int
    version: str
    timestamp: str = ""

    def summary(self) -> dict[str, int]:
        counts = {name: 0 for name in self.test_names}
        for row in self.rows:
            for cell in row.cells:
                if cell.status == CELL_PASS:
                    counts[cell.test_name] += 1
        return counts

    def all_passed(self) -> bool:
        return all(
            not row.load_error and all(c.status == CELL_PASS for c in row.cells)
            for row in self.rows
        )


def file_seed(global_seed: int, name: str) -> int:
    digest = hashlib.sha256(f"{global_seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _cell_from_result(r: TestResult) -> BatchCell:
    if r.status == PASSED:
        status, detail = CELL_PASS, ("vacuous: no assertions executed" if r.vacuous else "")
    elif r.status == FAILED:
        first = r.first_failure()
        status, detail = CELL_FAIL, (first.message if first else "")
    elif r.status == ERROR and r.reason == TIMEOUT:
        status, detail = CELL_TIMEOUT, "test timed out"
    else:
        first = r.first_failure()
        detail = r.reason
        if first is not None and first.message:
            detail = f"{r.reason}: {first.message}"
        status = CELL_ERROR
    return BatchCell(
        test_name=r.name,
        status=status,
        detail=detail,
        frames=r.frames,
        vacuous=r.vacuous,
        outcomes=r.outcomes,
    )


def _error_row(label, path, test_names, message) -> BatchRow:
    cells = tuple(BatchCell(test_name=n, status=CELL_ERROR, detail=message) for n in test_names)
    return BatchRow(label=label, path=path, cells=cells, load_error=message)


def _run_file(label, path, suite, seed, cancel) -> BatchRow:
    try:
        project = load_project(path)
    except (ProjectParseError, ProjectLoadError, OSError) as e:
        return _error_row(label, path, suite.test_names(), f"load: {e}")
    injected = inject_suite(project, suite)
    sched = Scheduler(injected, seed=file_seed(seed, label))
    suite_result = run_suite(sched, cancel=cancel)
    by_name = suite_result.by_name()
    cells = []
    for name in suite.test_names():
        r = by_name.get(name)
        if r is None:
            cells.append(BatchCell(test_name=name, status=CELL_ERROR, detail=ABORTED))
        else:
            cells.append(_cell_from_result(r))
    return BatchRow(label=label, path=path, cells=tuple(cells))


def _labels(files: list[str]) -> list[str]:
    names = [Path(f).name for f in files]
    dupes = {n for n in names if names.count(n) > 1}
    return [str(f) if Path(f).name in dupes else Path(f).name for f in files]


def batch_run(
    files,
    suite: BatchTestSuite,
    *,
    seed: int = 0,
    parallelism: int = 1,
    fail_fast: bool = False,
    cancel: threading.Event | None = None,
    version: str = "",
    timestamp: str = "",
) -> BatchReport:
    """Run *suite* over every project file; rows keep input order.

    With fail_fast the files run sequentially and the batch stops after
    the first row that is not all-pass.
    """
    files = [str(f) for f in files]
    if not files:
        raise BbtError("no project files given")
    if not suite.tests:
        raise EmptySuiteError("batch test suite is empty")
    labels = _labels(files)

    rows: list[BatchRow]
    if fail_fast or parallelism <= 1:
        rows = []
        for label, path in zip(labels, files):
            if cancel is not None and cancel.is_set():
                break
            row = _run_file(label, path, suite, seed, cancel)
            rows.append(row)
            if fail_fast and (row.load_error or any(c.status != CELL_PASS for c in row.cells)):
                break
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            futures = [
                pool.submit(_run_file, label, path, suite, seed, cancel)
                for label, path in zip(labels, files)
            ]
            rows = [f.result() for f in futures]

    return BatchReport(
        suite_name=suite.suite_name,
        test_names=tuple(suite.test_names()),
        rows=tuple(rows),
        seed=seed,
        version=version,
        timestamp=timestamp,
    )


# ---------------------------------------------------------------------------
# report emission


def outcome_to_json(o: AssertionOutcome) -> dict:
    return {
        "block": o.block_id,
        "kind": o.kind,
        "expected": o.expected,
        "actual": o.actual,
        "passed": o.passed,
        "message": o.message,
    }


def test_result_to_json(r: TestResult) -> dict:
    return {
        "name": r.name,
        "sprite": r.sprite_name,
        "status": r.status,
        "reason": r.reason,
        "frames": r.frames,
        "vacuous": r.vacuous,
        "outcomes": [outcome_to_json(o) for o in r.outcomes],
    }


def _emit_csv(report: BatchReport) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["file", *report.test_names])
    for row in report.rows:
        writer.writerow([row.label, *[c.status for c in row.cells]])
    return buf.getvalue().encode("utf-8")


def _emit_json(report: BatchReport) -> bytes:
    doc = {
        "formatVersion": 1,
        "suiteName": report.suite_name,
        "tests": list(report.test_names),
        "rows": [
            {
                "file": row.label,
                "path": row.path,
                "loadError": row.load_error,
                "cells": [
                    {
                        "test": c.test_name,
                        "status": c.status,
                        "detail": c.detail,
                        "frames": c.frames,
                        "vacuous": c.vacuous,
                        "outcomes": [outcome_to_json(o) for o in c.outcomes],
                    }
                    for c in row.cells
                ],
            }
            for row in report.rows
        ],
        "summary": report.summary(),
        "meta": {"seed": report.seed, "version": report.version, "timestamp": report.timestamp},
    }
    return (json.dumps(doc, indent=1, sort_keys=True) + "\n").encode("utf-8")


def _emit_tap(report: BatchReport) -> bytes:
    lines = ["TAP version 13", f"1..{len(report.rows) * len(report.test_names)}"]
    n = 0
    for row in report.rows:
        for cell in row.cells:
            n += 1
            ok = "ok" if cell.status == CELL_PASS else "not ok"
            line = f"{ok} {n} - {row.label}::{cell.test_name}"
            if cell.status != CELL_PASS:
                line += f" # {cell.status}"
            lines.append(line)
    return ("\n".join(lines) + "\n").encode("utf-8")


def emit_report(report: BatchReport, format: str) -> bytes:
    """Render the matrix: csv (statuses only), json (full structure,
    stable key order), or TAP version 13 lines."""
    if format == "csv":
        return _emit_csv(report)
    if format == "json":
        return _emit_json(report)
    if format == "tap":
        return _emit_tap(report)
    raise ValueError(f"unknown report format {format!r}")
