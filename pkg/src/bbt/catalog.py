"""Opcode catalog: every block the VM understands, with its slot
signature, shape, and scheduler yield class.

Shapes follow the visual language: ``stack`` blocks stack vertically,
``cap`` blocks end a stack, ``hat`` blocks head a script, ``reporter``
blocks are oval expressions and ``boolean`` blocks are diamond
expressions (only they fit boolean slots).

Yield classes drive the scheduler:

* ``none``       - the thread keeps running after the block
* ``loop-edge``  - end of a loop body; thread is done for this frame
* ``wait``       - thread blocks on a condition or deadline
* ``soft-yield`` - thread re-enters the back of the current frame's queue
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Mapping

ANY = "any"
BOOLEAN = "boolean"
SUBSTACK = "substack"

STACK = "stack"
CAP = "cap"
HAT = "hat"
REPORTER = "reporter"
BOOL_SHAPE = "boolean"

NO_YIELD = "none"
LOOP_EDGE = "loop-edge"
WAIT = "wait"
SOFT_YIELD = "soft-yield"

CURRENT_SPRITE = "current sprite"
MOUSE = "mouse-pointer"
EDGE = "edge"
MYSELF = "myself"

KEY_NAMES = frozenset(
    {"space", "up arrow", "down arrow", "left arrow", "right arrow", "any"}
    | set(string.ascii_lowercase)
    | set(string.digits)
)

ATTRIBUTES = (
    "x",
    "y",
    "direction",
    "costume number",
    "costume name",
    "size",
    "volume",
    "say text",
    "clone count",
    "running scripts count",
)


@dataclass(frozen=True)
class OpcodeSpec:
    opcode: str
    category: str
    shape: str = STACK
    inputs: Mapping[str, str] = field(default_factory=dict)
    fields: tuple[str, ...] = ()
    yield_class: str = NO_YIELD

    @property
    def is_hat(self) -> bool:
        return self.shape == HAT

    @property
    def is_expression(self) -> bool:
        return self.shape in (REPORTER, BOOL_SHAPE)


def _op(opcode, category, shape=STACK, inputs=None, fields=(), yields=NO_YIELD):
    return OpcodeSpec(opcode, category, shape, dict(inputs or {}), tuple(fields), yields)


_ENTRIES = [
    # motion
    _op("motion_movesteps", "motion", inputs={"STEPS": ANY}),
    _op("motion_gotoxy", "motion", inputs={"X": ANY, "Y": ANY}),
    _op("motion_setx", "motion", inputs={"X": ANY}),
    _op("motion_changexby", "motion", inputs={"DX": ANY}),
    _op("motion_sety", "motion", inputs={"Y": ANY}),
    _op("motion_changeyby", "motion", inputs={"DY": ANY}),
    _op("motion_pointindirection", "motion", inputs={"DIRECTION": ANY}),
    _op("motion_pointtowards", "motion", fields=("TOWARDS",)),
    _op("motion_ifonedgebounce", "motion"),
    _op("motion_xposition", "motion", shape=REPORTER),
    _op("motion_yposition", "motion", shape=REPORTER),
    _op("motion_direction", "motion", shape=REPORTER),
    # looks
    _op("looks_say", "looks", inputs={"MESSAGE": ANY}),
    _op("looks_sayforsecs", "looks", inputs={"MESSAGE": ANY, "SECS": ANY}, yields=WAIT),
    _op("looks_think", "looks", inputs={"MESSAGE": ANY}),
    _op("looks_switchcostumeto", "looks", fields=("COSTUME",)),
    _op("looks_nextcostume", "looks"),
    _op("looks_show", "looks"),
    _op("looks_hide", "looks"),
    _op("looks_setsizeto", "looks", inputs={"SIZE": ANY}),
    _op("looks_changesizeby", "looks", inputs={"CHANGE": ANY}),
    # control
    _op("control_wait", "control", inputs={"DURATION": ANY}, yields=WAIT),
    _op("control_wait_until", "control", inputs={"CONDITION": BOOLEAN}, yields=WAIT),
    _op("control_repeat", "control", inputs={"TIMES": ANY, "SUBSTACK": SUBSTACK}, yields=LOOP_EDGE),
    _op("control_repeat_until", "control", inputs={"CONDITION": BOOLEAN, "SUBSTACK": SUBSTACK}, yields=LOOP_EDGE),
    _op("control_forever", "control", shape=CAP, inputs={"SUBSTACK": SUBSTACK}, yields=LOOP_EDGE),
    _op("control_if", "control", inputs={"CONDITION": BOOLEAN, "SUBSTACK": SUBSTACK}),
    _op("control_if_else", "control", inputs={"CONDITION": BOOLEAN, "SUBSTACK": SUBSTACK, "SUBSTACK2": SUBSTACK}),
    _op("control_stop", "control", shape=CAP, fields=("STOP_OPTION",)),
    _op("control_create_clone_of", "control", fields=("CLONE_OPTION",)),
    _op("control_delete_this_clone", "control", shape=CAP),
    _op("control_start_as_clone", "control", shape=HAT),
    # events
    _op("event_whenflagclicked", "event", shape=HAT),
    _op("event_whenkeypressed", "event", shape=HAT, fields=("KEY",)),
    _op("event_whenthisspriteclicked", "event", shape=HAT),
    _op("event_whenbroadcastreceived", "event", shape=HAT, fields=("MESSAGE",)),
    _op("event_broadcast", "event", inputs={"MESSAGE": ANY}),
    _op("event_broadcastandwait", "event", inputs={"MESSAGE": ANY}, yields=WAIT),
    # sensing
    _op("sensing_touchingobject", "sensing", shape=BOOL_SHAPE, fields=("TOUCHINGOBJECTMENU",)),
    _op("sensing_touchingcolor", "sensing", shape=BOOL_SHAPE, inputs={"COLOR": ANY}),
    _op("sensing_keypressed", "sensing", shape=BOOL_SHAPE, fields=("KEY",)),
    _op("sensing_mousex", "sensing", shape=REPORTER),
    _op("sensing_mousey", "sensing", shape=REPORTER),
    _op("sensing_distanceto", "sensing", shape=REPORTER, fields=("DISTANCETOMENU",)),
    # operators
    _op("operator_add", "operator", shape=REPORTER, inputs={"NUM1": ANY, "NUM2": ANY}),
    _op("operator_subtract", "operator", shape=REPORTER, inputs={"NUM1": ANY, "NUM2": ANY}),
    _op("operator_multiply", "operator", shape=REPORTER, inputs={"NUM1": ANY, "NUM2": ANY}),
    _op("operator_divide", "operator", shape=REPORTER, inputs={"NUM1": ANY, "NUM2": ANY}),
    _op("operator_mod", "operator", shape=REPORTER, inputs={"NUM1": ANY, "NUM2": ANY}),
    _op("operator_round", "operator", shape=REPORTER, inputs={"NUM": ANY}),
    _op("operator_random", "operator", shape=REPORTER, inputs={"FROM": ANY, "TO": ANY}),
    _op("operator_equals", "operator", shape=BOOL_SHAPE, inputs={"OPERAND1": ANY, "OPERAND2": ANY}),
    _op("operator_gt", "operator", shape=BOOL_SHAPE, inputs={"OPERAND1": ANY, "OPERAND2": ANY}),
    _op("operator_lt", "operator", shape=BOOL_SHAPE, inputs={"OPERAND1": ANY, "OPERAND2": ANY}),
    _op("operator_and", "operator", shape=BOOL_SHAPE, inputs={"OPERAND1": BOOLEAN, "OPERAND2": BOOLEAN}),
    _op("operator_or", "operator", shape=BOOL_SHAPE, inputs={"OPERAND1": BOOLEAN, "OPERAND2": BOOLEAN}),
    _op("operator_not", "operator", shape=BOOL_SHAPE, inputs={"OPERAND": BOOLEAN}),
    _op("operator_join", "operator", shape=REPORTER, inputs={"STRING1": ANY, "STRING2": ANY}),
    _op("operator_letter_of", "operator", shape=REPORTER, inputs={"LETTER": ANY, "STRING": ANY}),
    _op("operator_length", "operator", shape=REPORTER, inputs={"STRING": ANY}),
    # data
    _op("data_setvariableto", "data", inputs={"VALUE": ANY}, fields=("VARIABLE",)),
    _op("data_changevariableby", "data", inputs={"VALUE": ANY}, fields=("VARIABLE",)),
    _op("data_variable", "data", shape=REPORTER, fields=("VARIABLE",)),
    # test: control
    _op("test_start", "test", shape=HAT, fields=("NAME",)),
    _op("test_restore", "test", shape=CAP),
    _op("test_set_timeout", "test", inputs={"SECONDS": ANY}),
    _op("test_yield", "test", yields=SOFT_YIELD),
    _op("test_wait_all_scripts_done", "test", yields=WAIT),
    # test: triggers (simulated events/inputs; all implicitly yield)
    _op("test_green_flag", "test", yields=SOFT_YIELD),
    _op("test_press_key", "test", fields=("KEY",), yields=SOFT_YIELD),
    _op("test_release_key", "test", fields=("KEY",), yields=SOFT_YIELD),
    _op("test_click_sprite", "test", fields=("SPRITE",), yields=SOFT_YIELD),
    _op("test_broadcast", "test", inputs={"MESSAGE": ANY}, yields=SOFT_YIELD),
    _op("test_mouse_move", "test", inputs={"X": ANY, "Y": ANY}, yields=SOFT_YIELD),
    _op("test_mouse_down", "test", yields=SOFT_YIELD),
    _op("test_mouse_up", "test", yields=SOFT_YIELD),
    # test: assertions
    _op("test_assert_true", "test", inputs={"CONDITION": BOOLEAN}),
    _op("test_assert_equals", "test", inputs={"ACTUAL": ANY, "EXPECTED": ANY}),
    _op("test_assert_greater", "test", inputs={"VALUE": ANY, "BOUND": ANY}),
    _op("test_assert_less", "test", inputs={"VALUE": ANY, "BOUND": ANY}),
    # test: reporter (also usable from program scripts)
    _op("test_attribute_of", "test", shape=REPORTER, fields=("PROPERTY", "OBJECT")),
]

OPCODES: Mapping[str, OpcodeSpec] = {e.opcode: e for e in _ENTRIES}

TRIGGER_OPCODES = frozenset(
    op for op, spec in OPCODES.items()
    if spec.category == "test" and spec.yield_class == SOFT_YIELD and op != "test_yield"
)

ASSERTION_OPCODES = frozenset(
    {"test_assert_true", "test_assert_equals", "test_assert_greater", "test_assert_less"}
)


def spec_of(opcode: str) -> OpcodeSpec:
    return OPCODES[opcode]


def known(opcode: str) -> bool:
    return opcode in OPCODES
