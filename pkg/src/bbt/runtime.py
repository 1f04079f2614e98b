"""Native block semantics: expressions, motion, looks, sensing, data.

Collision is geometric, not pixel-based: sprites are axis-aligned
bounding boxes (costume size scaled by the sprite's size), the stage is
480x360 centred on the origin, and colour sensing tests overlap against
the stage's declared colour regions. Numeric edge cases follow the
forgiving conventions of the block language: division by zero yields 0
and nothing ever becomes NaN or infinite.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

from .blocks import STAGE, Block
from .catalog import CURRENT_SPRITE, EDGE, MOUSE, MYSELF
from .errors import EvaluationError
from .scheduler import (
    FRAMES_PER_SECOND,
    PROGRAM,
    STAGE_HALF_HEIGHT,
    STAGE_HALF_WIDTH,
    FINISHED,
    SpriteState,
    StackEntry,
    StageState,
    Wait,
)
from .values import Value, to_boolean, to_number, to_string

if TYPE_CHECKING:
    from .scheduler import Scheduler, Thread

CONTINUE = ("continue",)


def frames_for_seconds(secs: float) -> int:
    return max(0, math.ceil(secs * FRAMES_PER_SECOND))


def _finite(x: float) -> float:
    if x != x or x in (float("inf"), float("-inf")):
        return 0.0
    return x + 0.0


def _wrap_direction(d: float) -> float:
    d = math.fmod(d, 360.0)
    if d > 180.0:
        d -= 360.0
    elif d <= -180.0:
        d += 360.0
    return d + 0.0


def _require_sprite(sched, thread, name: str, block: Block) -> SpriteState:
    if name == CURRENT_SPRITE or name == MYSELF:
        if isinstance(thread.owner, StageState):
            raise EvaluationError("the stage is not a sprite", block.block_id)
        return thread.owner
    sp = sched.sprite_state(name)
    if sp is None:
        raise EvaluationError(f"no sprite named {name!r}", block.block_id)
    return sp


# ---------------------------------------------------------------------------
# expression evaluation


def evaluate(sched: "Scheduler", thread: "Thread", v) -> Value:
    """Evaluate an input slot value: literals pass through, expression
    blocks are computed against the live state."""
    if not isinstance(v, Block):
        if isinstance(v, tuple):
            raise EvaluationError("substack used as a value")
        return v
    fn = _REPORTERS.get(v.opcode)
    if fn is None:
        raise EvaluationError(f"{v.opcode} is not an expression", v.block_id)
    return fn(sched, thread, v)


def evaluate_number(sched, thread, v) -> float:
    return to_number(evaluate(sched, thread, v))


def evaluate_string(sched, thread, v) -> str:
    return to_string(evaluate(sched, thread, v))


def evaluate_boolean(sched, thread, v) -> bool:
    return to_boolean(evaluate(sched, thread, v))


def _rep_xposition(sched, thread, b):
    return _owner_sprite(thread, b).x


def _rep_yposition(sched, thread, b):
    return _owner_sprite(thread, b).y


def _rep_direction(sched, thread, b):
    return _owner_sprite(thread, b).direction


def _owner_sprite(thread, b) -> SpriteState:
    if isinstance(thread.owner, StageState):
        raise EvaluationError("the stage has no sprite attributes", b.block_id)
    return thread.owner


def _rep_mousex(sched, thread, b):
    return sched.state.input.mouse_x


def _rep_mousey(sched, thread, b):
    return sched.state.input.mouse_y


def _rep_keypressed(sched, thread, b):
    key = b.field("KEY")
    keys = sched.state.input.keys_down
    return bool(keys) if key == "any" else key in keys


def _rep_touching(sched, thread, b):
    target = b.field("TOUCHINGOBJECTMENU")
    return touching(sched, _owner_sprite(thread, b), target)


def _rep_touchingcolor(sched, thread, b):
    color = evaluate_string(sched, thread, b.input("COLOR", ""))
    return touching_color(sched, _owner_sprite(thread, b), color)


def _rep_distanceto(sched, thread, b):
    me = _owner_sprite(thread, b)
    target = b.field("DISTANCETOMENU")
    if target == MOUSE:
        tx, ty = sched.state.input.mouse_x, sched.state.input.mouse_y
    else:
        other = sched.sprite_state(target)
        if other is None:
            sched.warn(f"distance to unknown sprite {target!r}")
            return 0.0
        tx, ty = other.x, other.y
    return _finite(math.hypot(tx - me.x, ty - me.y))


def _binary_numbers(sched, thread, b):
    return (
        evaluate_number(sched, thread, b.input("NUM1", 0.0)),
        evaluate_number(sched, thread, b.input("NUM2", 0.0)),
    )


def _rep_add(sched, thread, b):
    n1, n2 = _binary_numbers(sched, thread, b)
    return _finite(n1 + n2)


def _rep_subtract(sched, thread, b):
    n1, n2 = _binary_numbers(sched, thread, b)
    return _finite(n1 - n2)


def _rep_multiply(sched, thread, b):
    n1, n2 = _binary_numbers(sched, thread, b)
    return _finite(n1 * n2)


def _rep_divide(sched, thread, b):
    n1, n2 = _binary_numbers(sched, thread, b)
    return 0.0 if n2 == 0.0 else _finite(n1 / n2)


def _rep_mod(sched, thread, b):
    n1, n2 = _binary_numbers(sched, thread, b)
    if n2 == 0.0:
        return 0.0
    return _finite(n1 - math.floor(n1 / n2) * n2)


def _rep_round(sched, thread, b):
    n = evaluate_number(sched, thread, b.input("NUM", 0.0))
    return _finite(math.floor(n + 0.5))


def _rep_random(sched, thread, b):
    lo = evaluate(sched, thread, b.input("FROM", 1.0))
    hi = evaluate(sched, thread, b.input("TO", 10.0))
    nlo, nhi = to_number(lo), to_number(hi)
    if nlo > nhi:
        nlo, nhi = nhi, nlo
    whole = nlo.is_integer() and nhi.is_integer() and not (
        isinstance(lo, str) and "." in lo or isinstance(hi, str) and "." in hi
    )
    rng = sched.state.rng
    if whole:
        return float(rng.randint(int(nlo), int(nhi)))
    return _finite(nlo + rng.random() * (nhi - nlo))


def _rep_equals(sched, thread, b):
    from .values import values_equal

    return values_equal(
        evaluate(sched, thread, b.input("OPERAND1", "")),
        evaluate(sched, thread, b.input("OPERAND2", "")),
    )


def _rep_gt(sched, thread, b):
    from .values import compare

    return (
        compare(
            evaluate(sched, thread, b.input("OPERAND1", "")),
            evaluate(sched, thread, b.input("OPERAND2", "")),
        )
        > 0
    )


def _rep_lt(sched, thread, b):
    from .values import compare

    return (
        compare(
            evaluate(sched, thread, b.input("OPERAND1", "")),
            evaluate(sched, thread, b.input("OPERAND2", "")),
        )
        < 0
    )


def _rep_and(sched, thread, b):
    return evaluate_boolean(sched, thread, b.input("OPERAND1", False)) and evaluate_boolean(
        sched, thread, b.input("OPERAND2", False)
    )


def _rep_or(sched, thread, b):
    return evaluate_boolean(sched, thread, b.input("OPERAND1", False)) or evaluate_boolean(
        sched, thread, b.input("OPERAND2", False)
    )


def _rep_not(sched, thread, b):
    return not evaluate_boolean(sched, thread, b.input("OPERAND", False))


def _rep_join(sched, thread, b):
    return evaluate_string(sched, thread, b.input("STRING1", "")) + evaluate_string(
        sched, thread, b.input("STRING2", "")
    )


def _rep_letter_of(sched, thread, b):
    i = evaluate_number(sched, thread, b.input("LETTER", 1.0))
    s = evaluate_string(sched, thread, b.input("STRING", ""))
    idx = int(i)
    if idx < 1 or idx > len(s):
        return ""
    return s[idx - 1]


def _rep_length(sched, thread, b):
    return float(len(evaluate_string(sched, thread, b.input("STRING", ""))))


def _rep_variable(sched, thread, b):
    name = b.field("VARIABLE")
    owner = thread.owner
    if isinstance(owner, SpriteState) and name in owner.variables:
        return owner.variables[name]
    if name in sched.state.stage.variables:
        return sched.state.stage.variables[name]
    sched.warn(f"read of unknown variable {name!r}")
    return 0.0


def _rep_attribute_of(sched, thread, b):
    return get_attribute(sched, thread, b.field("OBJECT"), b.field("PROPERTY"), b)


_REPORTERS = {
    "motion_xposition": _rep_xposition,
    "motion_yposition": _rep_yposition,
    "motion_direction": _rep_direction,
    "sensing_mousex": _rep_mousex,
    "sensing_mousey": _rep_mousey,
    "sensing_keypressed": _rep_keypressed,
    "sensing_touchingobject": _rep_touching,
    "sensing_touchingcolor": _rep_touchingcolor,
    "sensing_distanceto": _rep_distanceto,
    "operator_add": _rep_add,
    "operator_subtract": _rep_subtract,
    "operator_multiply": _rep_multiply,
    "operator_divide": _rep_divide,
    "operator_mod": _rep_mod,
    "operator_round": _rep_round,
    "operator_random": _rep_random,
    "operator_equals": _rep_equals,
    "operator_gt": _rep_gt,
    "operator_lt": _rep_lt,
    "operator_and": _rep_and,
    "operator_or": _rep_or,
    "operator_not": _rep_not,
    "operator_join": _rep_join,
    "operator_letter_of": _rep_letter_of,
    "operator_length": _rep_length,
    "data_variable": _rep_variable,
    "test_attribute_of": _rep_attribute_of,
}


# ---------------------------------------------------------------------------
# collision model


def _boxes_overlap(a, b) -> bool:
    # open-interval overlap: boxes that merely share an edge do not touch
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


def touching(sched: "Scheduler", sprite: SpriteState, target: str) -> bool:
    """Bounding-box contact with another sprite, the mouse pointer, or
    the stage edge. Invisible sprites touch nothing."""
    if not sprite.visible:
        return False
    box = sprite.bounding_box()
    if target == EDGE:
        w = box[2] - box[0]
        h = box[3] - box[1]
        return (
            abs(sprite.x) >= STAGE_HALF_WIDTH - w / 2
            or abs(sprite.y) >= STAGE_HALF_HEIGHT - h / 2
        )
    if target == MOUSE:
        mx, my = sched.state.input.mouse_x, sched.state.input.mouse_y
        return box[0] < mx < box[2] and box[1] < my < box[3]
    others = []
    original = sched.sprite_state(target)
    if original is not None:
        others.append(original)
    others.extend(sched.clones_of(target))
    if not others:
        sched.warn(f"touching check against unknown sprite {target!r}")
        return False
    return any(
        o is not sprite and o.visible and _boxes_overlap(box, o.bounding_box()) for o in others
    )


def touching_color(sched: "Scheduler", sprite: SpriteState, color: str) -> bool:
    """True iff the sprite's box overlaps a stage colour region of
    exactly this colour."""
    if not sprite.visible:
        return False
    color = color.lower()
    box = sprite.bounding_box()
    for region in sched.state.stage.color_regions:
        if region.color == color:
            x1, y1, x2, y2 = region.rect
            if _boxes_overlap(box, (x1, y1, x2, y2)):
                return True
    return False


# ---------------------------------------------------------------------------
# attribute access (the reporter family)


def get_attribute(sched: "Scheduler", thread: "Thread", selector: str, attribute: str, block: Block) -> Value:
    sprite = _require_sprite(sched, thread, selector, block)
    if attribute == "x":
        return sprite.x
    if attribute == "y":
        return sprite.y
    if attribute == "direction":
        return sprite.direction
    if attribute == "costume number":
        return float(sprite.costume_index + 1)
    if attribute == "costume name":
        return sprite.costume.name
    if attribute == "size":
        return sprite.size
    if attribute == "volume":
        return sprite.volume
    if attribute == "say text":
        return sprite.bubble_text
    if attribute == "clone count":
        return float(len(sched.clones_of(sprite.name)))
    if attribute == "running scripts count":
        return float(
            sum(
                1
                for t in sched.state.threads
                if t.owner is sprite and t.origin == PROGRAM and t.status != FINISHED
            )
        )
    raise EvaluationError(f"unknown attribute {attribute!r}", block.block_id)


# ---------------------------------------------------------------------------
# statement execution


def _clamp_position(sprite: SpriteState) -> None:
    sprite.x = min(STAGE_HALF_WIDTH, max(-STAGE_HALF_WIDTH, _finite(sprite.x)))
    sprite.y = min(STAGE_HALF_HEIGHT, max(-STAGE_HALF_HEIGHT, _finite(sprite.y)))


def _move_owner(sched, thread, b) -> SpriteState:
    owner = thread.owner
    if isinstance(owner, StageState):
        raise EvaluationError("the stage cannot move", b.block_id)
    return owner


def _exec_movesteps(sched, thread, b):
    sp = _move_owner(sched, thread, b)
    steps = evaluate_number(sched, thread, b.input("STEPS", 0.0))
    rad = math.radians(90.0 - sp.direction)
    sp.x += steps * math.cos(rad)
    sp.y += steps * math.sin(rad)
    _clamp_position(sp)
    return CONTINUE


def _exec_gotoxy(sched, thread, b):
    sp = _move_owner(sched, thread, b)
    sp.x = evaluate_number(sched, thread, b.input("X", 0.0))
    sp.y = evaluate_number(sched, thread, b.input("Y", 0.0))
    _clamp_position(sp)
    return CONTINUE


def _exec_setx(sched, thread, b):
    sp = _move_owner(sched, thread, b)
    sp.x = evaluate_number(sched, thread, b.input("X", 0.0))
    _clamp_position(sp)
    return CONTINUE


def _exec_changexby(sched, thread, b):
    sp = _move_owner(sched, thread, b)
    sp.x += evaluate_number(sched, thread, b.input("DX", 0.0))
    _clamp_position(sp)
    return CONTINUE


def _exec_sety(sched, thread, b):
    sp = _move_owner(sched, thread, b)
    sp.y = evaluate_number(sched, thread, b.input("Y", 0.0))
    _clamp_position(sp)
    return CONTINUE


def _exec_changeyby(sched, thread, b):
    sp = _move_owner(sched, thread, b)
    sp.y += evaluate_number(sched, thread, b.input("DY", 0.0))
    _clamp_position(sp)
    return CONTINUE


def _exec_pointindirection(sched, thread, b):
    sp = _move_owner(sched, thread, b)
    sp.direction = _wrap_direction(evaluate_number(sched, thread, b.input("DIRECTION", 90.0)))
    return CONTINUE


def _exec_pointtowards(sched, thread, b):
    sp = _move_owner(sched, thread, b)
    target = b.field("TOWARDS")
    if target == MOUSE:
        tx, ty = sched.state.input.mouse_x, sched.state.input.mouse_y
    else:
        other = sched.sprite_state(target)
        if other is None:
            sched.warn(f"point towards unknown sprite {target!r}")
            return CONTINUE
        tx, ty = other.x, other.y
    sp.direction = _wrap_direction(90.0 - math.degrees(math.atan2(ty - sp.y, tx - sp.x)))
    return CONTINUE


def _exec_ifonedgebounce(sched, thread, b):
    sp = _move_owner(sched, thread, b)
    x1, y1, x2, y2 = sp.bounding_box()
    w, h = x2 - x1, y2 - y1
    rad = math.radians(90.0 - sp.direction)
    dx, dy = math.cos(rad), math.sin(rad)
    bounced = False
    if x2 >= STAGE_HALF_WIDTH:
        dx = -abs(dx)
        bounced = True
    elif x1 <= -STAGE_HALF_WIDTH:
        dx = abs(dx)
        bounced = True
    if y2 >= STAGE_HALF_HEIGHT:
        dy = -abs(dy)
        bounced = True
    elif y1 <= -STAGE_HALF_HEIGHT:
        dy = abs(dy)
        bounced = True
    if not bounced:
        return CONTINUE
    sp.direction = _wrap_direction(90.0 - math.degrees(math.atan2(dy, dx)))
    sp.x = min(STAGE_HALF_WIDTH - w / 2, max(-(STAGE_HALF_WIDTH - w / 2), sp.x))
    sp.y = min(STAGE_HALF_HEIGHT - h / 2, max(-(STAGE_HALF_HEIGHT - h / 2), sp.y))
    return CONTINUE


def _bubble(sched, thread, b, kind):
    sp = _move_owner(sched, thread, b)
    sp.bubble_text = evaluate_string(sched, thread, b.input("MESSAGE", ""))
    sp.bubble_kind = kind
    sp.bubble_token += 1
    return sp


def _exec_say(sched, thread, b):
    _bubble(sched, thread, b, "say")
    return CONTINUE


def _exec_think(sched, thread, b):
    _bubble(sched, thread, b, "think")
    return CONTINUE


def _exec_sayforsecs(sched, thread, b):
    sp = _bubble(sched, thread, b, "say")
    secs = evaluate_number(sched, thread, b.input("SECS", 1.0))
    frames = max(1, frames_for_seconds(secs))
    return (
        "wait",
        Wait(
            kind="frames",
            wake_frame=sched.state.frame + frames,
            clear_bubble_token=sp.bubble_token,
        ),
    )


def _exec_switchcostumeto(sched, thread, b):
    sp = _move_owner(sched, thread, b)
    name = b.field("COSTUME")
    for i, c in enumerate(sp.costumes):
        if c.name == name:
            sp.costume_index = i
            return CONTINUE
    sched.warn(f"sprite {sp.name!r} has no costume {name!r}")
    return CONTINUE


def _exec_nextcostume(sched, thread, b):
    sp = _move_owner(sched, thread, b)
    sp.costume_index = (sp.costume_index + 1) % len(sp.costumes)
    return CONTINUE


def _exec_show(sched, thread, b):
    _move_owner(sched, thread, b).visible = True
    return CONTINUE


def _exec_hide(sched, thread, b):
    _move_owner(sched, thread, b).visible = False
    return CONTINUE


def _exec_setsizeto(sched, thread, b):
    sp = _move_owner(sched, thread, b)
    sp.size = max(0.0, evaluate_number(sched, thread, b.input("SIZE", 100.0)))
    return CONTINUE


def _exec_changesizeby(sched, thread, b):
    sp = _move_owner(sched, thread, b)
    sp.size = max(0.0, sp.size + evaluate_number(sched, thread, b.input("CHANGE", 0.0)))
    return CONTINUE


def _exec_wait(sched, thread, b):
    secs = evaluate_number(sched, thread, b.input("DURATION", 0.0))
    frames = max(1, frames_for_seconds(secs))
    return ("wait", Wait(kind="frames", wake_frame=sched.state.frame + frames))


def _exec_wait_until(sched, thread, b):
    cond = b.input("CONDITION", False)
    if evaluate_boolean(sched, thread, cond):
        return CONTINUE
    return ("wait", Wait(kind="until", condition=cond))


def _exec_repeat(sched, thread, b):
    times = int(round(evaluate_number(sched, thread, b.input("TIMES", 0.0))))
    if times < 1:
        return CONTINUE
    return ("push", StackEntry(blocks=b.substack(), kind="repeat", remaining=times, loop_block=b))


def _exec_repeat_until(sched, thread, b):
    if evaluate_boolean(sched, thread, b.input("CONDITION", False)):
        return CONTINUE
    return ("push", StackEntry(blocks=b.substack(), kind="repeat_until", loop_block=b))


def _exec_forever(sched, thread, b):
    return ("push", StackEntry(blocks=b.substack(), kind="forever", loop_block=b))


def _exec_if(sched, thread, b):
    if evaluate_boolean(sched, thread, b.input("CONDITION", False)):
        return ("push", StackEntry(blocks=b.substack()))
    return CONTINUE


def _exec_if_else(sched, thread, b):
    if evaluate_boolean(sched, thread, b.input("CONDITION", False)):
        return ("push", StackEntry(blocks=b.substack()))
    return ("push", StackEntry(blocks=b.substack("SUBSTACK2")))


def _exec_stop(sched, thread, b):
    option = b.field("STOP_OPTION")
    if option == "all":
        return ("stop_all",)
    return ("finish",)


def _exec_create_clone_of(sched, thread, b):
    target = b.field("CLONE_OPTION")
    if target == MYSELF:
        if isinstance(thread.owner, StageState):
            sched.warn("the stage cannot clone itself")
            return CONTINUE
        source = thread.owner
    else:
        source = sched.sprite_state(target)
        if source is None:
            sched.warn(f"clone of unknown sprite {target!r}")
            return CONTINUE
    sched.create_clone(source)
    return CONTINUE


def _exec_delete_this_clone(sched, thread, b):
    owner = thread.owner
    if isinstance(owner, SpriteState) and owner.is_clone:
        sched.delete_clone(owner)
        return ("finish",)
    sched.warn("delete-this-clone outside a clone")
    return CONTINUE


def _exec_broadcast(sched, thread, b):
    message = evaluate_string(sched, thread, b.input("MESSAGE", ""))
    sched.dispatch_event("broadcast", message=message)
    return CONTINUE


def _exec_broadcastandwait(sched, thread, b):
    message = evaluate_string(sched, thread, b.input("MESSAGE", ""))
    spawned = sched.dispatch_event("broadcast", message=message)
    if not spawned:
        return CONTINUE
    return ("wait", Wait(kind="threads", thread_ids=tuple(spawned)))


def _exec_setvariableto(sched, thread, b):
    _set_variable(sched, thread, b, evaluate(sched, thread, b.input("VALUE", 0.0)))
    return CONTINUE


def _exec_changevariableby(sched, thread, b):
    delta = evaluate_number(sched, thread, b.input("VALUE", 0.0))
    current = to_number(_rep_variable(sched, thread, b))
    _set_variable(sched, thread, b, _finite(current + delta))
    return CONTINUE


def _set_variable(sched, thread, b, value):
    name = b.field("VARIABLE")
    owner = thread.owner
    if isinstance(owner, SpriteState) and name in owner.variables:
        owner.variables[name] = value
    elif name in sched.state.stage.variables:
        sched.state.stage.variables[name] = value
    else:
        sched.warn(f"write to unknown variable {name!r}")


NATIVE_HANDLERS = {
    "motion_movesteps": _exec_movesteps,
    "motion_gotoxy": _exec_gotoxy,
    "motion_setx": _exec_setx,
    "motion_changexby": _exec_changexby,
    "motion_sety": _exec_sety,
    "motion_changeyby": _exec_changeyby,
    "motion_pointindirection": _exec_pointindirection,
    "motion_pointtowards": _exec_pointtowards,
    "motion_ifonedgebounce": _exec_ifonedgebounce,
    "looks_say": _exec_say,
    "looks_think": _exec_think,
    "looks_sayforsecs": _exec_sayforsecs,
    "looks_switchcostumeto": _exec_switchcostumeto,
    "looks_nextcostume": _exec_nextcostume,
    "looks_show": _exec_show,
    "looks_hide": _exec_hide,
    "looks_setsizeto": _exec_setsizeto,
    "looks_changesizeby": _exec_changesizeby,
    "control_wait": _exec_wait,
    "control_wait_until": _exec_wait_until,
    "control_repeat": _exec_repeat,
    "control_repeat_until": _exec_repeat_until,
    "control_forever": _exec_forever,
    "control_if": _exec_if,
    "control_if_else": _exec_if_else,
    "control_stop": _exec_stop,
    "control_create_clone_of": _exec_create_clone_of,
    "control_delete_this_clone": _exec_delete_this_clone,
    "event_broadcast": _exec_broadcast,
    "event_broadcastandwait": _exec_broadcastandwait,
    "data_setvariableto": _exec_setvariableto,
    "data_changevariableby": _exec_changevariableby,
}


def execute_native_block(sched: "Scheduler", thread: "Thread", block: Block):
    handler = NATIVE_HANDLERS.get(block.opcode)
    if handler is None:
        raise EvaluationError(f"{block.opcode} cannot be executed as a statement", block.block_id)
    return handler(sched, thread, block)
