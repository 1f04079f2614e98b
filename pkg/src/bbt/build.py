"""Convenience constructors for building projects in code.

Blocks are created with empty ids; ``assign_ids`` walks a finished
project and hands out sequential ids so the result satisfies the
project-wide uniqueness rule.
"""

from __future__ import annotations

from dataclasses import replace

from .blocks import Block, Costume, Project, Script, SpriteDef, StageDef
from .catalog import OPCODES


def blk(opcode: str, fields: dict[str, str] | None = None, **inputs) -> Block:
    """Build a block; keyword arguments fill input slots.

    Substacks are given as lists of blocks, literals as plain values.
    """
    if opcode not in OPCODES:
        raise ValueError(f"unknown opcode {opcode!r}")
    norm = {}
    for slot, v in inputs.items():
        if isinstance(v, list):
            v = tuple(v)
        elif isinstance(v, int) and not isinstance(v, bool):
            v = float(v)
        norm[slot] = v
    return Block(opcode=opcode, inputs=norm, fields=dict(fields or {}))


def script(hat: Block | None, *body: Block) -> Script:
    return Script(hat=hat, body=tuple(body))


def test_script(name: str, *body: Block) -> Script:
    return script(blk("test_start", fields={"NAME": name}), *body)


def sprite(name: str, scripts=(), costumes=("costume1",), **attrs) -> SpriteDef:
    costume_objs = tuple(c if isinstance(c, Costume) else Costume(c) for c in costumes)
    return SpriteDef(name=name, costumes=costume_objs, scripts=tuple(scripts), **attrs)


def project(*sprites: SpriteDef, stage: StageDef | None = None) -> Project:
    return assign_ids(Project(stage=stage or StageDef(), sprites=tuple(sprites)))


def assign_ids(p: Project, prefix: str = "b") -> Project:
    """Return *p* with fresh sequential block ids (deterministic walk order)."""
    counter = 0

    def reid(block: Block) -> Block:
        nonlocal counter
        counter += 1
        new_id = f"{prefix}{counter}"
        new_inputs = {}
        for k, v in block.inputs.items():
            if isinstance(v, Block):
                new_inputs[k] = reid(v)
            elif isinstance(v, tuple):
                new_inputs[k] = tuple(reid(c) for c in v)
            else:
                new_inputs[k] = v
        return replace(block, block_id=new_id, inputs=new_inputs)

    def reid_script(s: Script) -> Script:
        hat = reid(s.hat) if s.hat is not None else None
        return Script(hat=hat, body=tuple(reid(b) for b in s.body))

    stage = replace(p.stage, scripts=tuple(reid_script(s) for s in p.stage.scripts))
    sprites = tuple(
        replace(sp, scripts=tuple(reid_script(s) for s in sp.scripts)) for sp in p.sprites
    )
    return replace(p, stage=stage, sprites=sprites)
