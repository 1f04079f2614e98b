"""Statement dispatch: routes blocks to the native or test runtime.

Evaluation errors never crash a run: inside a running test they become
an error outcome on that test; elsewhere they become a diagnostic and
the block is skipped.
"""

from __future__ import annotations

from . import runtime, testing
from .blocks import Block
from .catalog import OPCODES
from .errors import EvaluationError
from .scheduler import TEST, Scheduler, Thread


def execute_block(sched: Scheduler, thread: Thread, block: Block):
    spec = OPCODES.get(block.opcode)
    try:
        if spec is not None and spec.category == "test":
            return testing.execute_test_block(sched, thread, block)
        return runtime.execute_native_block(sched, thread, block)
    except EvaluationError as e:
        if not e.block_id:
            e.block_id = block.block_id
        if thread.origin == TEST and sched.active_test is not None:
            sched.active_test.record_eval_error(e)
        else:
            sched.warn(str(e))
        return ("continue",)
