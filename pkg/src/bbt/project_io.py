"""Load and save project and batch-suite files.

Projects are single JSON documents (``.proj.json``); batch test suites
reuse the same block encoding in a smaller document (``.bbt.json``).
Serialization is deterministic: stable key order and integral numbers
written as ints, so identical projects produce identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .blocks import (
    STAGE,
    Block,
    ColorRegion,
    Costume,
    Project,
    Script,
    SpriteDef,
    StageDef,
    UnmatchedTest,
    walk_blocks,
)
from .errors import EmptySuiteError, ProjectLoadError, ProjectParseError
from .validate import validate_project

FORMAT_VERSION = 1
PROJECT_SUFFIX = ".proj.json"
SUITE_SUFFIX = ".bbt.json"


@dataclass(frozen=True)
class SuiteTest:
    sprite_name: str
    script: Script


@dataclass(frozen=True)
class BatchTestSuite:
    suite_name: str
    tests: tuple[SuiteTest, ...]

    def test_names(self) -> list[str]:
        return [t.script.test_name for t in self.tests]


# ---------------------------------------------------------------------------
# parsing

def _fail(msg, path="", offset=None):
    raise ProjectParseError(msg, path=path, offset=offset)


def _expect(cond, msg, path):
    if not cond:
        _fail(msg, path)


def _as_number(v, path) -> float:
    _expect(isinstance(v, (int, float)) and not isinstance(v, bool), "expected a number", path)
    return float(v)


def _as_value(v, path):
    if isinstance(v, bool):
        return v
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        return v
    _fail(f"expected a literal value, got {type(v).__name__}", path)


def _parse_block(obj, path) -> Block:
    _expect(isinstance(obj, dict), "expected a block object", path)
    op = obj.get("op")
    _expect(isinstance(op, str) and op, "block is missing 'op'", path)
    block_id = obj.get("id", "")
    _expect(isinstance(block_id, str), "block 'id' must be a string", path)
    inputs = {}
    for slot, v in obj.get("inputs", {}).items():
        slot_path = f"{path}.inputs.{slot}"
        if isinstance(v, dict):
            inputs[slot] = _parse_block(v, slot_path)
        elif isinstance(v, list):
            inputs[slot] = tuple(_parse_block(c, f"{slot_path}[{i}]") for i, c in enumerate(v))
        else:
            inputs[slot] = _as_value(v, slot_path)
    fields = {}
    for name, v in obj.get("fields", {}).items():
        _expect(isinstance(v, str), "field values must be strings", f"{path}.fields.{name}")
        fields[name] = v
    return Block(opcode=op, block_id=block_id, inputs=inputs, fields=fields)


def _parse_script(obj, path) -> Script:
    _expect(isinstance(obj, dict), "expected a script object", path)
    hat = obj.get("hat")
    hat_block = _parse_block(hat, f"{path}.hat") if hat is not None else None
    body = obj.get("body", [])
    _expect(isinstance(body, list), "'body' must be a list", path)
    return Script(hat=hat_block, body=tuple(_parse_block(b, f"{path}.body[{i}]") for i, b in enumerate(body)))


def _parse_variables(obj, path):
    _expect(isinstance(obj, dict), "'variables' must be an object", path)
    return {k: _as_value(v, f"{path}.{k}") for k, v in obj.items()}


def _parse_costume(v, path) -> Costume:
    if isinstance(v, str):
        return Costume(v)
    _expect(isinstance(v, dict) and isinstance(v.get("name"), str), "costume must be a name or object", path)
    return Costume(
        name=v["name"],
        width=_as_number(v.get("width", 40), f"{path}.width"),
        height=_as_number(v.get("height", 40), f"{path}.height"),
    )


def _parse_sprite(obj, path) -> SpriteDef:
    _expect(isinstance(obj, dict), "expected a sprite object", path)
    name = obj.get("name")
    _expect(isinstance(name, str) and name, "sprite needs a non-empty 'name'", path)
    costumes_json = obj.get("costumes", ["costume1"])
    _expect(isinstance(costumes_json, list) and costumes_json, "'costumes' must be a non-empty list", path)
    scripts_json = obj.get("scripts", [])
    _expect(isinstance(scripts_json, list), "'scripts' must be a list", path)
    visible = obj.get("visible", True)
    _expect(isinstance(visible, bool), "'visible' must be a boolean", f"{path}.visible")
    current = obj.get("currentCostume", 0)
    _expect(isinstance(current, int) and not isinstance(current, bool), "'currentCostume' must be an integer", path)
    return SpriteDef(
        name=name,
        x=_as_number(obj.get("x", 0), f"{path}.x"),
        y=_as_number(obj.get("y", 0), f"{path}.y"),
        direction=_as_number(obj.get("direction", 90), f"{path}.direction"),
        size=_as_number(obj.get("size", 100), f"{path}.size"),
        visible=visible,
        volume=_as_number(obj.get("volume", 100), f"{path}.volume"),
        costumes=tuple(_parse_costume(c, f"{path}.costumes[{i}]") for i, c in enumerate(costumes_json)),
        current_costume=current,
        variables=_parse_variables(obj.get("variables", {}), f"{path}.variables"),
        scripts=tuple(_parse_script(s, f"{path}.scripts[{i}]") for i, s in enumerate(scripts_json)),
    )


def _parse_region(obj, path) -> ColorRegion:
    _expect(isinstance(obj, dict), "expected a color region object", path)
    color = obj.get("color")
    _expect(isinstance(color, str), "region needs a 'color'", path)
    rect = obj.get("rect")
    _expect(isinstance(rect, list) and len(rect) == 4, "region needs 'rect': [x1, y1, x2, y2]", path)
    x1, y1, x2, y2 = (_as_number(v, f"{path}.rect[{i}]") for i, v in enumerate(rect))
    return ColorRegion(color=color.lower(), rect=(x1, y1, x2, y2))


def _parse_stage(obj, path) -> StageDef:
    _expect(isinstance(obj, dict), "expected a stage object", path)
    scripts_json = obj.get("scripts", [])
    regions_json = obj.get("colorRegions", [])
    _expect(isinstance(scripts_json, list), "'scripts' must be a list", path)
    _expect(isinstance(regions_json, list), "'colorRegions' must be a list", path)
    return StageDef(
        variables=_parse_variables(obj.get("variables", {}), f"{path}.variables"),
        scripts=tuple(_parse_script(s, f"{path}.scripts[{i}]") for i, s in enumerate(scripts_json)),
        color_regions=tuple(_parse_region(r, f"{path}.colorRegions[{i}]") for i, r in enumerate(regions_json)),
    )


def _decode_json(data: bytes | str):
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            _fail("document is not valid UTF-8", offset=e.start)
    try:
        return json.loads(data)
    except json.JSONDecodeError as e:
        _fail(f"malformed JSON: {e.msg}", offset=e.pos)


def _fill_missing_ids(p: Project) -> Project:
    used = {b.block_id for _, _, b in _iter_blocks(p) if b.block_id}
    counter = 0

    def next_id():
        nonlocal counter
        while True:
            counter += 1
            cand = f"auto{counter}"
            if cand not in used:
                used.add(cand)
                return cand

    def fill(block: Block) -> Block:
        new_inputs = {}
        for k, v in block.inputs.items():
            if isinstance(v, Block):
                new_inputs[k] = fill(v)
            elif isinstance(v, tuple):
                new_inputs[k] = tuple(fill(c) for c in v)
            else:
                new_inputs[k] = v
        bid = block.block_id or next_id()
        return replace(block, block_id=bid, inputs=new_inputs)

    def fill_script(s: Script) -> Script:
        hat = fill(s.hat) if s.hat is not None else None
        return Script(hat=hat, body=tuple(fill(b) for b in s.body))

    stage = replace(p.stage, scripts=tuple(fill_script(s) for s in p.stage.scripts))
    sprites = tuple(replace(sp, scripts=tuple(fill_script(s) for s in sp.scripts)) for sp in p.sprites)
    return replace(p, stage=stage, sprites=sprites)


def _iter_blocks(p: Project):
    for owner_name, script in p.scripts_with_owner():
        for b in walk_blocks(script):
            yield owner_name, script, b


def parse_project(data: bytes | str, *, validate: bool = True) -> Project:
    """Parse raw file content into a validated Project.

    Raises ProjectParseError for malformed documents and
    ProjectLoadError when structural validation produces diagnostics.
    """
    doc = _decode_json(data)
    _expect(isinstance(doc, dict), "top level must be an object", "$")
    version = doc.get("formatVersion")
    _expect(version == FORMAT_VERSION, f"unsupported formatVersion {version!r}", "$.formatVersion")
    stage = _parse_stage(doc.get("stage", {}), "$.stage")
    sprites_json = doc.get("sprites", [])
    _expect(isinstance(sprites_json, list), "'sprites' must be a list", "$.sprites")
    sprites = tuple(_parse_sprite(s, f"$.sprites[{i}]") for i, s in enumerate(sprites_json))
    unmatched = []
    for i, t in enumerate(doc.get("unmatchedTests", [])):
        path = f"$.unmatchedTests[{i}]"
        _expect(isinstance(t, dict) and isinstance(t.get("sprite"), str), "expected {sprite, script}", path)
        unmatched.append(UnmatchedTest(t["sprite"], _parse_script(t.get("script", {}), f"{path}.script")))
    p = _fill_missing_ids(Project(stage=stage, sprites=sprites, unmatched_tests=tuple(unmatched)))
    if validate:
        diags = validate_project(p)
        if diags:
            raise ProjectLoadError(diags)
    return p


def load_project(path: str | Path, *, validate: bool = True) -> Project:
    return parse_project(Path(path).read_bytes(), validate=validate)


# ---------------------------------------------------------------------------
# serialization

def _num(f: float):
    return int(f) if float(f).is_integer() else f


def _value_to_json(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, (int, float)):
        return _num(float(v))
    return v


def _block_to_json(b: Block):
    out = {"op": b.opcode, "id": b.block_id}
    if b.inputs:
        enc = {}
        for slot in sorted(b.inputs):
            v = b.inputs[slot]
            if isinstance(v, Block):
                enc[slot] = _block_to_json(v)
            elif isinstance(v, tuple):
                enc[slot] = [_block_to_json(c) for c in v]
            else:
                enc[slot] = _value_to_json(v)
        out["inputs"] = enc
    if b.fields:
        out["fields"] = {k: b.fields[k] for k in sorted(b.fields)}
    return out


def _script_to_json(s: Script):
    return {
        "hat": _block_to_json(s.hat) if s.hat is not None else None,
        "body": [_block_to_json(b) for b in s.body],
    }


def _variables_to_json(variables):
    return {k: _value_to_json(variables[k]) for k in sorted(variables)}


def _project_to_json(p: Project):
    doc = {
        "formatVersion": FORMAT_VERSION,
        "stage": {
            "variables": _variables_to_json(p.stage.variables),
            "colorRegions": [
                {"color": r.color, "rect": [_num(v) for v in r.rect]} for r in p.stage.color_regions
            ],
            "scripts": [_script_to_json(s) for s in p.stage.scripts],
        },
        "sprites": [
            {
                "name": sp.name,
                "x": _num(sp.x),
                "y": _num(sp.y),
                "direction": _num(sp.direction),
                "size": _num(sp.size),
                "visible": sp.visible,
                "volume": _num(sp.volume),
                "costumes": [
                    c.name if (c.width, c.height) == (40.0, 40.0)
                    else {"name": c.name, "width": _num(c.width), "height": _num(c.height)}
                    for c in sp.costumes
                ],
                "currentCostume": sp.current_costume,
                "variables": _variables_to_json(sp.variables),
                "scripts": [_script_to_json(s) for s in sp.scripts],
            }
            for sp in p.sprites
        ],
    }
    if p.unmatched_tests:
        doc["unmatchedTests"] = [
            {"sprite": t.sprite_name, "script": _script_to_json(t.script)} for t in p.unmatched_tests
        ]
    return doc


def serialize_project(p: Project) -> bytes:
    return (json.dumps(_project_to_json(p), indent=1) + "\n").encode("utf-8")


def save_project(p: Project, path: str | Path) -> None:
    Path(path).write_bytes(serialize_project(p))


# ---------------------------------------------------------------------------
# suites

def parse_suite(data: bytes | str) -> BatchTestSuite:
    doc = _decode_json(data)
    _expect(isinstance(doc, dict), "top level must be an object", "$")
    version = doc.get("formatVersion")
    _expect(version == FORMAT_VERSION, f"unsupported formatVersion {version!r}", "$.formatVersion")
    name = doc.get("suiteName", "suite")
    _expect(isinstance(name, str) and name, "'suiteName' must be a non-empty string", "$.suiteName")
    tests_json = doc.get("tests")
    _expect(isinstance(tests_json, list), "'tests' must be a list", "$.tests")
    tests = []
    seen = set()
    for i, t in enumerate(tests_json):
        path = f"$.tests[{i}]"
        _expect(isinstance(t, dict) and isinstance(t.get("sprite"), str), "expected {sprite, script}", path)
        s = _parse_script(t.get("script", {}), f"{path}.script")
        _expect(s.is_test, "suite scripts must start with a test hat", path)
        tname = s.test_name
        _expect(tname != "", "suite test has no name", path)
        _expect(tname not in seen, f"duplicate test name {tname!r} in suite", path)
        seen.add(tname)
        tests.append(SuiteTest(t["sprite"], s))
    return BatchTestSuite(suite_name=name, tests=tuple(tests))


def serialize_suite(s: BatchTestSuite) -> bytes:
    doc = {
        "formatVersion": FORMAT_VERSION,
        "suiteName": s.suite_name,
        "tests": [{"sprite": t.sprite_name, "script": _script_to_json(t.script)} for t in s.tests],
    }
    return (json.dumps(doc, indent=1) + "\n").encode("utf-8")


def load_suite(path: str | Path) -> BatchTestSuite:
    return parse_suite(Path(path).read_bytes())


def save_suite(s: BatchTestSuite, path: str | Path) -> None:
    Path(path).write_bytes(serialize_suite(s))


def extract_suite(p: Project, name: str = "suite") -> BatchTestSuite:
    """Collect the test scripts of *p*, in project order, as a suite."""
    tests = [SuiteTest(owner, script) for owner, script in p.test_scripts()]
    if not tests:
        raise EmptySuiteError("project contains no test scripts")
    return BatchTestSuite(suite_name=name, tests=tuple(tests))


def inject_suite(p: Project, s: BatchTestSuite) -> Project:
    """Replace all tests of *p* with the suite's tests.

    Suite tests attach to sprites matched by exact name (or the stage);
    tests whose sprite is missing become unmatched records so runners
    can report them instead of dropping them. Program scripts are kept
    as they are. Injected blocks get fresh ids that cannot collide with
    the project's.
    """
    used_ids = set()
    for _, script in p.scripts_with_owner():
        if not script.is_test:
            used_ids.update(b.block_id for b in walk_blocks(script))

    prefix = "inj"
    while any(i.startswith(prefix) for i in used_ids):
        prefix += "_"

    def reid_script(script: Script, k: int) -> Script:
        counter = 0

        def reid(block: Block) -> Block:
            nonlocal counter
            counter += 1
            own = counter
            new_inputs = {}
            for key, v in block.inputs.items():
                if isinstance(v, Block):
                    new_inputs[key] = reid(v)
                elif isinstance(v, tuple):
                    new_inputs[key] = tuple(reid(c) for c in v)
                else:
                    new_inputs[key] = v
            return replace(block, block_id=f"{prefix}{k}_{own}", inputs=new_inputs)

        return Script(hat=reid(script.hat), body=tuple(reid(b) for b in script.body))

    additions: dict[str, list[Script]] = {}
    unmatched: list[UnmatchedTest] = []
    for k, t in enumerate(s.tests):
        new_script = reid_script(t.script, k)
        if t.sprite_name == STAGE or p.sprite(t.sprite_name) is not None:
            additions.setdefault(t.sprite_name, []).append(new_script)
        else:
            unmatched.append(UnmatchedTest(t.sprite_name, new_script))

    def keep(scripts):
        return tuple(sc for sc in scripts if not sc.is_test)

    stage = replace(p.stage, scripts=keep(p.stage.scripts) + tuple(additions.get(STAGE, [])))
    sprites = tuple(
        replace(sp, scripts=keep(sp.scripts) + tuple(additions.get(sp.name, []))) for sp in p.sprites
    )
    return Project(stage=stage, sprites=sprites, unmatched_tests=tuple(unmatched))
