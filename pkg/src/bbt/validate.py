"""Structural validation of projects against the opcode catalog.

Validation returns diagnostics instead of raising; an empty list means
the project is well-formed: every block matches its catalog signature,
boolean slots only hold boolean-shaped expressions, every name
reference resolves, and test names are unique.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import catalog
from .blocks import STAGE, Block, Project, Script, SpriteDef, walk_blocks
from .catalog import (
    ATTRIBUTES,
    BOOL_SHAPE,
    BOOLEAN,
    CAP,
    CURRENT_SPRITE,
    EDGE,
    HAT,
    KEY_NAMES,
    MOUSE,
    MYSELF,
    REPORTER,
    SUBSTACK,
)

_COLOR_RE = re.compile(r"^#[0-9a-f]{6}$")

_SPRITE_FIELDS = {
    "motion_pointtowards": ("TOWARDS", (MOUSE,)),
    "sensing_touchingobject": ("TOUCHINGOBJECTMENU", (MOUSE, EDGE)),
    "sensing_distanceto": ("DISTANCETOMENU", (MOUSE,)),
    "control_create_clone_of": ("CLONE_OPTION", (MYSELF,)),
    "test_click_sprite": ("SPRITE", ()),
    "test_attribute_of": ("OBJECT", (CURRENT_SPRITE,)),
}

_KEY_FIELD_OPCODES = ("event_whenkeypressed", "sensing_keypressed", "test_press_key", "test_release_key")


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    block_id: str = ""
    owner: str = ""

    def __str__(self):
        where = f" [{self.owner}:{self.block_id}]" if self.block_id or self.owner else ""
        return f"{self.code}: {self.message}{where}"


def validate_project(p: Project) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    sprite_names = [s.name for s in p.sprites]

    seen_sprites = set()
    for name in sprite_names:
        if name in seen_sprites:
            diags.append(Diagnostic("duplicate-sprite", f"duplicate sprite name {name!r}"))
        seen_sprites.add(name)

    for region in p.stage.color_regions:
        if not _COLOR_RE.match(region.color):
            diags.append(Diagnostic("bad-color", f"color region {region.color!r} is not #rrggbb"))
        x1, y1, x2, y2 = region.rect
        if x1 > x2 or y1 > y2:
            diags.append(Diagnostic("bad-region", f"color region rect {region.rect} is inverted"))

    for sp in p.sprites:
        if not sp.costumes:
            diags.append(Diagnostic("no-costumes", f"sprite {sp.name!r} has no costumes", owner=sp.name))
        elif not 0 <= sp.current_costume < len(sp.costumes):
            diags.append(
                Diagnostic("bad-costume-index", f"current costume {sp.current_costume} out of range", owner=sp.name)
            )

    seen_ids: set[str] = set()
    seen_tests: set[str] = set()
    for owner_name, owner in p.owners():
        for s in owner.scripts:
            _check_script(p, owner_name, owner, s, diags, seen_ids)
            if s.is_test:
                name = s.test_name
                if not name:
                    diags.append(Diagnostic("empty-test-name", "test has no name", s.hat.block_id, owner_name))
                elif name in seen_tests:
                    diags.append(
                        Diagnostic("duplicate-test-name", f"duplicate test name {name!r}", s.hat.block_id, owner_name)
                    )
                seen_tests.add(name)
    return diags


def _check_script(p, owner_name, owner, s: Script, diags, seen_ids):
    for b in walk_blocks(s):
        if not b.block_id:
            diags.append(Diagnostic("missing-id", f"block {b.opcode} has no id", owner=owner_name))
        elif b.block_id in seen_ids:
            diags.append(Diagnostic("duplicate-id", f"duplicate block id {b.block_id!r}", b.block_id, owner_name))
        seen_ids.add(b.block_id)

    if s.hat is not None:
        spec = catalog.OPCODES.get(s.hat.opcode)
        if spec is None:
            diags.append(Diagnostic("unknown-opcode", f"unknown opcode {s.hat.opcode!r}", s.hat.block_id, owner_name))
        elif spec.shape != HAT:
            diags.append(
                Diagnostic("not-a-hat", f"{s.hat.opcode} cannot head a script", s.hat.block_id, owner_name)
            )
        else:
            _check_block(p, owner_name, owner, s, s.hat, diags)
    _check_body(p, owner_name, owner, s, s.body, diags)


def _check_body(p, owner_name, owner, s, body, diags):
    for i, b in enumerate(body):
        spec = catalog.OPCODES.get(b.opcode)
        if spec is None:
            diags.append(Diagnostic("unknown-opcode", f"unknown opcode {b.opcode!r}", b.block_id, owner_name))
            continue
        if spec.shape == HAT:
            diags.append(Diagnostic("hat-in-body", f"{b.opcode} is only valid as a script hat", b.block_id, owner_name))
            continue
        if spec.is_expression:
            diags.append(
                Diagnostic("expression-in-body", f"{b.opcode} is an expression, not a statement", b.block_id, owner_name)
            )
            continue
        if spec.shape == CAP and i != len(body) - 1:
            diags.append(Diagnostic("cap-not-last", f"{b.opcode} must end its stack", b.block_id, owner_name))
        _check_block(p, owner_name, owner, s, b, diags)


def _check_block(p, owner_name, owner, s, b: Block, diags):
    spec = catalog.OPCODES[b.opcode]

    if spec.category == "test" and not spec.is_expression and spec.shape != HAT and not s.is_test:
        diags.append(
            Diagnostic("test-block-in-program", f"{b.opcode} is only valid inside a test script", b.block_id, owner_name)
        )

    for slot, kind in spec.inputs.items():
        if slot not in b.inputs:
            if kind != SUBSTACK:
                diags.append(Diagnostic("missing-input", f"{b.opcode} is missing input {slot}", b.block_id, owner_name))
            continue
        v = b.inputs[slot]
        if kind == SUBSTACK:
            if not isinstance(v, tuple):
                diags.append(Diagnostic("bad-substack", f"{b.opcode}.{slot} must be a stack", b.block_id, owner_name))
            else:
                _check_body(p, owner_name, owner, s, v, diags)
            continue
        if isinstance(v, tuple):
            diags.append(Diagnostic("bad-input", f"{b.opcode}.{slot} cannot hold a stack", b.block_id, owner_name))
            continue
        if isinstance(v, Block):
            sub = catalog.OPCODES.get(v.opcode)
            if sub is None:
                diags.append(Diagnostic("unknown-opcode", f"unknown opcode {v.opcode!r}", v.block_id, owner_name))
                continue
            if not sub.is_expression:
                diags.append(
                    Diagnostic("statement-in-slot", f"{v.opcode} is not an expression", v.block_id, owner_name)
                )
                continue
            if kind == BOOLEAN and sub.shape != BOOL_SHAPE:
                diags.append(
                    Diagnostic("boolean-slot", f"{b.opcode}.{slot} needs a boolean expression", v.block_id, owner_name)
                )
            _check_block(p, owner_name, owner, s, v, diags)
        else:
            if kind == BOOLEAN and not isinstance(v, bool):
                diags.append(
                    Diagnostic("boolean-slot", f"{b.opcode}.{slot} needs a boolean, got {v!r}", b.block_id, owner_name)
                )

    for name in spec.fields:
        if name not in b.fields:
            diags.append(Diagnostic("missing-field", f"{b.opcode} is missing field {name}", b.block_id, owner_name))
    for name in b.fields:
        if name not in spec.fields:
            diags.append(Diagnostic("unknown-field", f"{b.opcode} has no field {name}", b.block_id, owner_name))
    for slot in b.inputs:
        if slot not in spec.inputs:
            diags.append(Diagnostic("unknown-input", f"{b.opcode} has no input slot {slot}", b.block_id, owner_name))

    _check_references(p, owner_name, owner, b, spec, diags)


def _check_references(p, owner_name, owner, b: Block, spec, diags):
    ref = _SPRITE_FIELDS.get(b.opcode)
    if ref is not None:
        field_name, specials = ref
        target = b.fields.get(field_name, "")
        if target in (CURRENT_SPRITE, MYSELF) and owner_name == STAGE:
            diags.append(
                Diagnostic("stage-self-reference", f"{target!r} is not valid on the stage", b.block_id, owner_name)
            )
        elif target not in specials and p.sprite(target) is None:
            diags.append(Diagnostic("unresolved-sprite", f"no sprite named {target!r}", b.block_id, owner_name))

    if b.opcode in _KEY_FIELD_OPCODES:
        key = b.fields.get("KEY", "")
        if key not in KEY_NAMES:
            diags.append(Diagnostic("unknown-key", f"unknown key {key!r}", b.block_id, owner_name))

    if b.opcode == "test_attribute_of":
        prop = b.fields.get("PROPERTY", "")
        if prop not in ATTRIBUTES:
            diags.append(Diagnostic("unknown-attribute", f"unknown attribute {prop!r}", b.block_id, owner_name))

    if b.opcode == "control_stop":
        option = b.fields.get("STOP_OPTION", "")
        if option not in ("all", "this script"):
            diags.append(Diagnostic("bad-stop-option", f"unknown stop option {option!r}", b.block_id, owner_name))

    if b.opcode == "looks_switchcostumeto":
        name = b.fields.get("COSTUME", "")
        if owner_name == STAGE:
            diags.append(Diagnostic("stage-costume", "the stage has no costumes", b.block_id, owner_name))
        elif isinstance(owner, SpriteDef) and all(c.name != name for c in owner.costumes):
            diags.append(
                Diagnostic("unresolved-costume", f"sprite {owner_name!r} has no costume {name!r}", b.block_id, owner_name)
            )

    if b.opcode in ("data_setvariableto", "data_changevariableby", "data_variable"):
        var = b.fields.get("VARIABLE", "")
        local = isinstance(owner, SpriteDef) and var in owner.variables
        if not local and var not in p.stage.variables:
            diags.append(Diagnostic("unresolved-variable", f"no variable named {var!r}", b.block_id, owner_name))

    if b.opcode == "sensing_touchingcolor":
        color = b.inputs.get("COLOR")
        if isinstance(color, str) and not _COLOR_RE.match(color):
            diags.append(Diagnostic("bad-color", f"{color!r} is not #rrggbb", b.block_id, owner_name))
