"""Project AST: blocks, scripts, sprites, stage.

The AST is immutable after load. Snapshots of a running interpreter
deep-copy execution state that points back into the AST, so all node
types copy as themselves; two snapshots of one project share its AST.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Union

from .values import Value

STAGE = "__stage__"

#: What an input slot may hold: a literal, a nested expression block,
#: or a substack (tuple of statement blocks).
InputValue = Union[Value, "Block", tuple["Block", ...]]


class _AstNode:
    def __deepcopy__(self, memo):
        return self

    def __copy__(self):
        return self


@dataclass(frozen=True)
class Block(_AstNode):
    opcode: str
    block_id: str = ""
    inputs: dict[str, InputValue] = field(default_factory=dict)
    fields: dict[str, str] = field(default_factory=dict)

    def input(self, name: str, default: InputValue | None = None) -> InputValue | None:
        return self.inputs.get(name, default)

    def field(self, name: str, default: str = "") -> str:
        return self.fields.get(name, default)

    def substack(self, name: str = "SUBSTACK") -> tuple[Block, ...]:
        v = self.inputs.get(name, ())
        return v if isinstance(v, tuple) else ()


@dataclass(frozen=True)
class Script(_AstNode):
    hat: Block | None
    body: tuple[Block, ...] = ()

    @property
    def is_test(self) -> bool:
        return self.hat is not None and self.hat.opcode == "test_start"

    @property
    def test_name(self) -> str:
        return self.hat.field("NAME") if self.is_test else ""


@dataclass(frozen=True)
class Costume(_AstNode):
    name: str
    width: float = 40.0
    height: float = 40.0


@dataclass(frozen=True)
class SpriteDef(_AstNode):
    name: str
    x: float = 0.0
    y: float = 0.0
    direction: float = 90.0
    size: float = 100.0
    visible: bool = True
    volume: float = 100.0
    costumes: tuple[Costume, ...] = (Costume("costume1"),)
    current_costume: int = 0
    variables: dict[str, Value] = field(default_factory=dict)
    scripts: tuple[Script, ...] = ()


@dataclass(frozen=True)
class ColorRegion(_AstNode):
    color: str  # "#rrggbb", lowercase
    rect: tuple[float, float, float, float]  # x1, y1, x2, y2 with x1<=x2, y1<=y2


@dataclass(frozen=True)
class StageDef(_AstNode):
    variables: dict[str, Value] = field(default_factory=dict)
    scripts: tuple[Script, ...] = ()
    color_regions: tuple[ColorRegion, ...] = ()


@dataclass(frozen=True)
class UnmatchedTest(_AstNode):
    """A suite test whose target sprite does not exist in the project.

    Kept on the project so runners can report it instead of silently
    dropping the test."""

    sprite_name: str
    script: Script


@dataclass(frozen=True)
class Project(_AstNode):
    stage: StageDef = StageDef()
    sprites: tuple[SpriteDef, ...] = ()
    unmatched_tests: tuple[UnmatchedTest, ...] = ()

    def sprite(self, name: str) -> SpriteDef | None:
        for s in self.sprites:
            if s.name == name:
                return s
        return None

    def owners(self) -> Iterator[tuple[str, StageDef | SpriteDef]]:
        """Stage first, then sprites in project order."""
        yield STAGE, self.stage
        for s in self.sprites:
            yield s.name, s

    def scripts_with_owner(self) -> Iterator[tuple[str, Script]]:
        for owner_name, owner in self.owners():
            for script in owner.scripts:
                yield owner_name, script

    def test_scripts(self) -> Iterator[tuple[str, Script]]:
        for owner_name, script in self.scripts_with_owner():
            if script.is_test:
                yield owner_name, script


def walk_blocks(script: Script) -> Iterator[Block]:
    """All blocks of a script: hat, body, nested expressions, substacks."""

    def visit(block: Block) -> Iterator[Block]:
        yield block
        for v in block.inputs.values():
            if isinstance(v, Block):
                yield from visit(v)
            elif isinstance(v, tuple):
                for child in v:
                    yield from visit(child)

    if script.hat is not None:
        yield from visit(script.hat)
    for b in script.body:
        yield from visit(b)


def iter_project_blocks(p: Project) -> Iterator[tuple[str, Script, Block]]:
    for owner_name, script in p.scripts_with_owner():
        for b in walk_blocks(script):
            yield owner_name, script, b


def strip_ids(script: Script) -> Script:
    """Structural copy of *script* with all block ids blanked (for
    comparisons that ignore id renaming)."""

    def strip(block: Block) -> Block:
        new_inputs = {}
        for k, v in block.inputs.items():
            if isinstance(v, Block):
                new_inputs[k] = strip(v)
            elif isinstance(v, tuple):
                new_inputs[k] = tuple(strip(c) for c in v)
            else:
                new_inputs[k] = v
        return replace(block, block_id="", inputs=new_inputs)

    hat = strip(script.hat) if script.hat is not None else None
    return Script(hat=hat, body=tuple(strip(b) for b in script.body))
