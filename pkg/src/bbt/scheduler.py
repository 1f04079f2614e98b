"""The sequencer: threads, frames, events, input state and snapshots.

One scheduler owns one running project. Execution is organised in
frames (1 frame = 1/30 s of virtual time). Within a frame every
runnable thread gets at least one turn, in activation order; a turn
executes blocks until the thread hits a yield point:

* loop edge / timed wait  -> the thread is done for this frame
* wait-until (false)      -> waiting; re-checked at its next turn
* soft-yield              -> the thread re-enters the back of the
                             current frame's queue and may run again
                             this frame, after all other runnable
                             threads (capped at 100 re-entries)

The frame ends when no runnable work is left; the clock then advances
by one frame. Everything is deterministic: thread order is activation
order with (sprite index, script index) tie-breaks, and all randomness
comes from one seeded generator.
"""

from __future__ import annotations

import copy
import hashlib
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .blocks import STAGE, Block, ColorRegion, Costume, Project, Script
from .errors import FrameBudgetExceeded
from .values import Value

FRAMES_PER_SECOND = 30
SOFT_YIELD_CAP = 100
CLONE_LIMIT = 300
STAGE_HALF_WIDTH = 240.0
STAGE_HALF_HEIGHT = 180.0

RUNNING = "running"
WAITING = "waiting"
FINISHED = "finished"

PROGRAM = "program"
TEST = "test"


# ---------------------------------------------------------------------------
# run-time state


@dataclass
class SpriteState:
    """Live state of one sprite instance (original or clone)."""

    name: str
    x: float
    y: float
    direction: float
    size: float
    visible: bool
    volume: float
    costumes: tuple[Costume, ...]
    costume_index: int
    variables: dict[str, Value]
    scripts: tuple[Script, ...]
    sprite_index: int
    is_clone: bool = False
    bubble_text: str = ""
    bubble_kind: str = "say"
    bubble_token: int = 0

    @classmethod
    def from_def(cls, index, sp):
        return cls(
            name=sp.name,
            x=sp.x,
            y=sp.y,
            direction=sp.direction,
            size=sp.size,
            visible=sp.visible,
            volume=sp.volume,
            costumes=sp.costumes,
            costume_index=sp.current_costume,
            variables=dict(sp.variables),
            scripts=sp.scripts,
            sprite_index=index,
        )

    @property
    def costume(self) -> Costume:
        return self.costumes[self.costume_index]

    def bounding_box(self):
        """Axis-aligned box (x1, y1, x2, y2), scaled by sprite size."""
        w = self.costume.width * self.size / 100.0
        h = self.costume.height * self.size / 100.0
        return (self.x - w / 2, self.y - h / 2, self.x + w / 2, self.y + h / 2)


@dataclass
class StageState:
    variables: dict[str, Value]
    scripts: tuple[Script, ...]
    color_regions: tuple[ColorRegion, ...]
    name: str = STAGE
    sprite_index: int = -1


@dataclass
class InputState:
    keys_down: set[str] = field(default_factory=set)
    mouse_x: float = 0.0
    mouse_y: float = 0.0
    mouse_down: bool = False
    locked: bool = False


@dataclass
class StackEntry:
    blocks: tuple[Block, ...]
    index: int = 0
    kind: str = "seq"  # seq | repeat | forever | repeat_until
    remaining: int = 0
    loop_block: Block | None = None
    edge_yielded: bool = False


@dataclass
class Wait:
    kind: str  # frames | until | threads | all-programs-done
    wake_frame: int = 0
    condition: Block | Value | None = None  # boolean input: block or literal
    thread_ids: tuple[int, ...] = ()
    clear_bubble_token: int = 0


@dataclass
class Thread:
    id: int
    script: Script
    owner: SpriteState | StageState
    origin: str  # program | test
    stack: list[StackEntry]
    status: str = RUNNING
    wait: Wait | None = None
    epoch: int = 0


@dataclass
class VmState:
    stage: StageState
    sprites: list[SpriteState]
    clones: list[SpriteState]
    threads: list[Thread]
    input: InputState
    rng: random.Random
    frame: int = 0
    next_thread_id: int = 1


@dataclass(frozen=True)
class Snapshot:
    """Deep copy of program state and execution state.

    Restoring makes the observable state equal to capture time; the
    project AST is shared, everything mutable is copied.
    """

    state: VmState

    def digest(self):
        return _state_digest(self.state)


@dataclass(frozen=True)
class FrameSummary:
    frame: int
    blocks_executed: int
    turns: int


class SchedulerObserver:
    """Callbacks fired during execution. All methods must be non-blocking.

    ``block_executed`` fires for statement blocks as they run (not for
    nested expression evaluation).
    """

    def thread_spawned(self, thread: Thread) -> None:
        pass

    def block_executed(self, block: Block, thread: Thread) -> None:
        pass

    def frame_ended(self, summary: FrameSummary) -> None:
        pass

    def event_dispatched(self, kind: str, detail: str) -> None:
        pass


class TraceRecorder(SchedulerObserver):
    """Hashes the block-execution trace; equal hashes mean equal runs."""

    def __init__(self):
        self._h = hashlib.sha256()

    def block_executed(self, block, thread):
        self._h.update(f"b:{block.block_id}:{thread.id};".encode())

    def frame_ended(self, summary):
        self._h.update(f"f:{summary.frame};".encode())

    def hexdigest(self) -> str:
        return self._h.hexdigest()


class Scheduler:
    """Single-threaded sequencer for one loaded project.

    Instances are never shared between concurrently running threads of
    control; run one scheduler per project file for parallel batches.
    """

    def __init__(self, project: Project, seed: int = 0):
        self.project = project
        self.state = VmState(
            stage=StageState(
                variables=dict(project.stage.variables),
                scripts=project.stage.scripts,
                color_regions=project.stage.color_regions,
            ),
            sprites=[SpriteState.from_def(i, sp) for i, sp in enumerate(project.sprites)],
            clones=[],
            threads=[],
            input=InputState(),
            rng=random.Random(seed),
        )
        self.seed = seed
        self.observers: list[SchedulerObserver] = []
        self.diagnostics: list[str] = []
        self.active_test = None  # set by the test runtime while a test runs
        self._queue: deque[Thread] | None = None
        self._epoch = 0
        self._suppress_clock = False
        self._frame_blocks = 0
        self.blocks_executed = 0

    # -- lookups ------------------------------------------------------------

    def sprite_state(self, name: str) -> SpriteState | None:
        for sp in self.state.sprites:
            if sp.name == name:
                return sp
        return None

    def live_instances(self):
        """Stage, original sprites, then clones in creation order."""
        yield self.state.stage
        yield from self.state.sprites
        yield from self.state.clones

    def clones_of(self, name: str) -> list[SpriteState]:
        return [c for c in self.state.clones if c.name == name]

    def _owner_order(self, owner) -> int:
        if isinstance(owner, StageState):
            return -1
        if not owner.is_clone:
            return owner.sprite_index
        return len(self.state.sprites) + self.state.clones.index(owner)

    def warn(self, message: str) -> None:
        self.diagnostics.append(message)

    # -- observers ----------------------------------------------------------

    def add_observer(self, obs: SchedulerObserver) -> None:
        self.observers.append(obs)

    def _notify(self, method: str, *args) -> None:
        for obs in self.observers:
            getattr(obs, method)(*args)

    # -- thread management ---------------------------------------------------

    def _spawn(self, script: Script, owner, origin: str) -> Thread:
        blocks = script.body
        if script.hat is not None and script.hat.opcode == "test_start":
            blocks = (script.hat,) + blocks
        st = self.state
        t = Thread(
            id=st.next_thread_id,
            script=script,
            owner=owner,
            origin=origin,
            stack=[StackEntry(blocks=blocks)],
            epoch=self._epoch,
        )
        st.next_thread_id += 1
        st.threads.append(t)
        if self._queue is not None:
            self._queue.append(t)
        self._notify("thread_spawned", t)
        return t

    def _restart(self, t: Thread) -> None:
        blocks = t.script.body
        if t.script.hat is not None and t.script.hat.opcode == "test_start":
            blocks = (t.script.hat,) + blocks
        t.stack = [StackEntry(blocks=blocks)]
        t.status = RUNNING
        t.wait = None
        if self._queue is not None and t not in self._queue:
            self._queue.append(t)

    def _finish(self, t: Thread) -> None:
        t.status = FINISHED
        t.stack = []
        t.wait = None

    def stop_all(self) -> None:
        for t in self.state.threads:
            self._finish(t)

    def running_instance(self, script: Script, owner) -> Thread | None:
        for t in self.state.threads:
            if t.script is script and t.owner is owner and t.status != FINISHED:
                return t
        return None

    def program_threads_active(self) -> bool:
        return any(t.origin == PROGRAM and t.status != FINISHED for t in self.state.threads)

    # -- events ---------------------------------------------------------------

    def dispatch_event(self, kind: str, *, key: str = "", sprite: str = "", message: str = "", clone=None) -> list[int]:
        """Dispatch a program event; returns (re)started thread ids in
        activation order."""
        matches: list[tuple[int, int, object, Script]] = []

        def scan(owner, hat_opcode, accept):
            order = self._owner_order(owner)
            for idx, script in enumerate(owner.scripts):
                if script.hat is not None and script.hat.opcode == hat_opcode and accept(script.hat):
                    matches.append((order, idx, owner, script))

        if kind == "green_flag":
            for owner in [self.state.stage, *self.state.sprites]:
                scan(owner, "event_whenflagclicked", lambda h: True)
        elif kind == "key":
            for owner in self.live_instances():
                scan(owner, "event_whenkeypressed", lambda h: h.field("KEY") in (key, "any"))
        elif kind == "sprite_click":
            target = self.sprite_state(sprite)
            if target is None:
                self.warn(f"click on unknown sprite {sprite!r}")
                return []
            scan(target, "event_whenthisspriteclicked", lambda h: True)
        elif kind == "broadcast":
            for owner in self.live_instances():
                scan(owner, "event_whenbroadcastreceived", lambda h: h.field("MESSAGE") == message)
        elif kind == "clone_start":
            scan(clone, "control_start_as_clone", lambda h: True)
        else:
            raise ValueError(f"unknown event kind {kind!r}")

        matches.sort(key=lambda m: (m[0], m[1]))
        spawned: list[int] = []
        for _, _, owner, script in matches:
            existing = self.running_instance(script, owner)
            if existing is not None:
                if kind == "green_flag":
                    self._restart(existing)
                    spawned.append(existing.id)
                continue
            origin = TEST if script.is_test else PROGRAM
            spawned.append(self._spawn(script, owner, origin).id)
        self._notify("event_dispatched", kind, key or sprite or message or "")
        return spawned

    # -- input -----------------------------------------------------------------

    def inject_input(
        self,
        *,
        key_down: str | None = None,
        key_up: str | None = None,
        mouse_x: float | None = None,
        mouse_y: float | None = None,
        mouse_down: bool | None = None,
        force: bool = False,
    ) -> bool:
        """Apply an input mutation. Rejected (returns False) while the
        input lock is set, unless forced by a test trigger block."""
        inp = self.state.input
        if inp.locked and not force:
            return False
        if key_down is not None:
            inp.keys_down.add(key_down)
        if key_up is not None:
            inp.keys_down.discard(key_up)
        if mouse_x is not None:
            inp.mouse_x = float(mouse_x)
        if mouse_y is not None:
            inp.mouse_y = float(mouse_y)
        if mouse_down is not None:
            inp.mouse_down = mouse_down
        return True

    def reset_input(self) -> None:
        inp = self.state.input
        inp.keys_down.clear()
        inp.mouse_x = 0.0
        inp.mouse_y = 0.0
        inp.mouse_down = False

    # -- frames ------------------------------------------------------------------

    def run_frame(self) -> FrameSummary:
        st = self.state
        queue = deque(t for t in st.threads if t.status != FINISHED)
        self._queue = queue
        self._frame_blocks = 0
        self._suppress_clock = False
        soft_counts: dict[int, int] = {}
        turns = 0
        while queue:
            t = queue.popleft()
            if t.epoch != self._epoch or t.status == FINISHED:
                continue
            if t.status == WAITING and not self._try_wake(t):
                continue
            turns += 1
            outcome = self._step(t)
            if outcome == "soft":
                n = soft_counts.get(t.id, 0) + 1
                soft_counts[t.id] = n
                if n <= SOFT_YIELD_CAP:
                    queue.append(t)
        self._queue = None
        st = self.state  # a restore may have replaced it
        st.threads = [t for t in st.threads if t.status != FINISHED]
        if not self._suppress_clock:
            st.frame += 1
        summary = FrameSummary(frame=st.frame, blocks_executed=self._frame_blocks, turns=turns)
        self._notify("frame_ended", summary)
        return summary

    def advance_until(self, pred: Callable[["Scheduler"], bool], budget: int) -> int:
        """Run frames until *pred* holds; raises FrameBudgetExceeded
        when the budget runs out first."""
        frames = 0
        while not pred(self):
            if frames >= budget:
                raise FrameBudgetExceeded(frames)
            self.run_frame()
            frames += 1
        return frames

    def _safe_condition(self, t: Thread, cond) -> bool:
        """Evaluate a boolean input; evaluation errors release the wait
        (and are recorded on the running test or as a diagnostic)."""
        from . import runtime
        from .errors import EvaluationError

        try:
            return runtime.evaluate_boolean(self, t, cond)
        except EvaluationError as e:
            if t.origin == TEST and self.active_test is not None:
                self.active_test.record_eval_error(e)
            else:
                self.warn(str(e))
            return True

    def _try_wake(self, t: Thread) -> bool:
        w = t.wait
        if w.kind == "frames":
            if self.state.frame < w.wake_frame:
                return False
            if w.clear_bubble_token and isinstance(t.owner, SpriteState):
                if t.owner.bubble_token == w.clear_bubble_token:
                    t.owner.bubble_text = ""
        elif w.kind == "until":
            if not self._safe_condition(t, w.condition):
                return False
        elif w.kind == "threads":
            alive = {th.id for th in self.state.threads if th.status != FINISHED}
            if any(tid in alive for tid in w.thread_ids):
                return False
        elif w.kind == "all-programs-done":
            if self.program_threads_active():
                return False
        t.status = RUNNING
        t.wait = None
        return True

    def _step(self, t: Thread) -> str:
        from .execution import execute_block

        while True:
            if not t.stack:
                self._finish(t)
                return "finished"
            entry = t.stack[-1]
            if entry.index >= len(entry.blocks):
                kind = entry.kind
                if kind == "seq":
                    t.stack.pop()
                    if not t.stack:
                        self._finish(t)
                        return "finished"
                    continue
                if kind == "forever":
                    entry.index = 0
                    return "frame"
                if kind == "repeat":
                    entry.remaining -= 1
                    if entry.remaining > 0:
                        entry.index = 0
                        return "frame"
                    t.stack.pop()
                    continue
                if kind == "repeat_until":
                    if not entry.edge_yielded:
                        entry.edge_yielded = True
                        return "frame"
                    entry.edge_yielded = False
                    if self._safe_condition(t, entry.loop_block.input("CONDITION", False)):
                        t.stack.pop()
                    else:
                        entry.index = 0
                    continue
                raise AssertionError(f"unknown stack entry kind {kind!r}")

            block = entry.blocks[entry.index]
            entry.index += 1
            outcome = execute_block(self, t, block)
            self._frame_blocks += 1
            self.blocks_executed += 1
            self._notify("block_executed", block, t)

            action = outcome[0]
            if action == "continue":
                continue
            if action == "push":
                t.stack.append(outcome[1])
                continue
            if action == "soft":
                return "soft"
            if action == "wait":
                t.status = WAITING
                t.wait = outcome[1]
                return "wait"
            if action == "finish":
                self._finish(t)
                return "finished"
            if action == "stop_all":
                self.stop_all()
                return "finished"
            raise AssertionError(f"unknown outcome {action!r}")

    # -- clones ---------------------------------------------------------------

    def create_clone(self, source: SpriteState) -> SpriteState | None:
        if len(self.state.clones) >= CLONE_LIMIT:
            self.warn(f"clone limit of {CLONE_LIMIT} reached")
            return None
        clone = SpriteState(
            name=source.name,
            x=source.x,
            y=source.y,
            direction=source.direction,
            size=source.size,
            visible=source.visible,
            volume=source.volume,
            costumes=source.costumes,
            costume_index=source.costume_index,
            variables=dict(source.variables),
            scripts=source.scripts,
            sprite_index=source.sprite_index,
            is_clone=True,
        )
        self.state.clones.append(clone)
        self.dispatch_event("clone_start", clone=clone)
        return clone

    def delete_clone(self, clone: SpriteState) -> None:
        if clone in self.state.clones:
            self.state.clones.remove(clone)
        for t in self.state.threads:
            if t.owner is clone:
                self._finish(t)

    # -- snapshot / restore ------------------------------------------------------

    def capture(self, exclude_thread: Thread | None = None) -> Snapshot:
        snap_state = copy.deepcopy(self.state)
        if exclude_thread is not None:
            snap_state.threads = [t for t in snap_state.threads if t.id != exclude_thread.id]
        return Snapshot(state=snap_state)

    def restore(self, snap: Snapshot) -> None:
        self.state = copy.deepcopy(snap.state)
        self._epoch += 1
        for t in self.state.threads:
            t.epoch = self._epoch
        if self._queue is not None:
            # mid-frame restore: the frame must not advance the
            # restored clock
            self._suppress_clock = True

    def state_digest(self):
        return _state_digest(self.state)

    def state_fingerprint(self) -> str:
        return hashlib.sha256(repr(self.state_digest()).encode()).hexdigest()


# ---------------------------------------------------------------------------
# digests


def _sprite_digest(sp: SpriteState):
    return (
        sp.name,
        sp.is_clone,
        sp.x,
        sp.y,
        sp.direction,
        sp.size,
        sp.visible,
        sp.volume,
        sp.costume_index,
        sp.bubble_text,
        sp.bubble_kind,
        sp.bubble_token,
        tuple(sorted(sp.variables.items())),
    )


def _entry_digest(e: StackEntry):
    return (
        e.kind,
        e.index,
        e.remaining,
        e.edge_yielded,
        tuple(b.block_id for b in e.blocks),
        e.loop_block.block_id if e.loop_block is not None else "",
    )


def _wait_digest(w: Wait | None):
    if w is None:
        return None
    cond = w.condition.block_id if isinstance(w.condition, Block) else repr(w.condition)
    return (w.kind, w.wake_frame, cond, w.thread_ids, w.clear_bubble_token)


def _thread_digest(t: Thread):
    owner_key = (t.owner.name, getattr(t.owner, "is_clone", False))
    return (
        t.id,
        owner_key,
        t.origin,
        t.status,
        tuple(_entry_digest(e) for e in t.stack),
        _wait_digest(t.wait),
    )


def _state_digest(st: VmState):
    # next_thread_id is deliberately absent: id allocation is internal
    # bookkeeping, not observable program or execution state
    return {
        "frame": st.frame,
        "stage_vars": tuple(sorted(st.stage.variables.items())),
        "sprites": tuple(_sprite_digest(s) for s in st.sprites),
        "clones": tuple(_sprite_digest(c) for c in st.clones),
        "threads": tuple(_thread_digest(t) for t in st.threads),
        "input": (
            tuple(sorted(st.input.keys_down)),
            st.input.mouse_x,
            st.input.mouse_y,
            st.input.mouse_down,
            st.input.locked,
        ),
        "rng": st.rng.getstate(),
    }
