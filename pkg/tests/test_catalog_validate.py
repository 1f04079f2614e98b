from dataclasses import replace

import pytest

from bbt import catalog
from bbt.build import blk, project, script, sprite
from bbt.catalog import LOOP_EDGE, OPCODES, SOFT_YIELD, WAIT
from bbt.validate import validate_project

from conftest import assert_eq, attr, flag, one_sprite, tscript


def codes(diags):
    return [d.code for d in diags]


class TestCatalog:
    def test_every_opcode_has_a_spec(self):
        for op, spec in OPCODES.items():
            assert spec.opcode == op
            assert spec.category in ("motion", "looks", "control", "event", "sensing", "operator", "data", "test")

    def test_yield_classes(self):
        assert OPCODES["control_repeat"].yield_class == LOOP_EDGE
        assert OPCODES["control_forever"].yield_class == LOOP_EDGE
        assert OPCODES["control_repeat_until"].yield_class == LOOP_EDGE
        assert OPCODES["control_wait"].yield_class == WAIT
        assert OPCODES["control_wait_until"].yield_class == WAIT
        assert OPCODES["test_wait_all_scripts_done"].yield_class == WAIT
        assert OPCODES["test_yield"].yield_class == SOFT_YIELD
        for op in catalog.TRIGGER_OPCODES:
            assert OPCODES[op].yield_class == SOFT_YIELD

    def test_hats(self):
        hats = [op for op, spec in OPCODES.items() if spec.is_hat]
        assert sorted(hats) == [
            "control_start_as_clone",
            "event_whenbroadcastreceived",
            "event_whenflagclicked",
            "event_whenkeypressed",
            "event_whenthisspriteclicked",
            "test_start",
        ]

    def test_unknown_opcode_rejected_by_builder(self):
        with pytest.raises(ValueError):
            blk("motion_teleport")


class TestValidate:
    def test_clean_project(self):
        p = one_sprite(
            flag(blk("motion_gotoxy", X=-170, Y=-150)),
            tscript("Test 1", blk("test_green_flag"), assert_eq(attr("x"), -170)),
        )
        assert validate_project(p) == []

    def test_unresolved_sprite_reference(self):
        p = one_sprite(tscript("t", assert_eq(attr("x", "Ship"), 0)))
        assert "unresolved-sprite" in codes(validate_project(p))

    def test_duplicate_test_names(self):
        p = one_sprite(tscript("Test 1"), tscript("Test 1"))
        assert "duplicate-test-name" in codes(validate_project(p))

    def test_boolean_slot_rejects_number(self):
        p = one_sprite(flag(blk("control_if", CONDITION=5, SUBSTACK=[])))
        assert "boolean-slot" in codes(validate_project(p))

    def test_boolean_slot_rejects_reporter(self):
        p = one_sprite(flag(blk("control_if", CONDITION=blk("operator_add", NUM1=1, NUM2=2), SUBSTACK=[])))
        assert "boolean-slot" in codes(validate_project(p))

    def test_boolean_slot_accepts_diamond(self):
        p = one_sprite(
            flag(blk("control_if", CONDITION=blk("operator_equals", OPERAND1=1, OPERAND2=1), SUBSTACK=[]))
        )
        assert validate_project(p) == []

    def test_test_block_in_program_script(self):
        p = one_sprite(flag(blk("test_yield")))
        assert "test-block-in-program" in codes(validate_project(p))

    def test_test_reporter_allowed_in_program(self):
        p = one_sprite(flag(blk("motion_setx", X=attr("x"))))
        assert validate_project(p) == []

    def test_hat_in_body(self):
        p = one_sprite(script(None, blk("test_start", fields={"NAME": "x"})))
        assert "hat-in-body" in codes(validate_project(p))

    def test_statement_not_a_hat(self):
        p = one_sprite(script(blk("motion_setx", X=1)))
        assert "not-a-hat" in codes(validate_project(p))

    def test_missing_input(self):
        p = one_sprite(flag(blk("motion_gotoxy", X=1)))
        assert "missing-input" in codes(validate_project(p))

    def test_missing_field(self):
        p = one_sprite(flag(blk("looks_switchcostumeto")))
        assert "missing-field" in codes(validate_project(p))

    def test_unknown_costume(self):
        p = one_sprite(flag(blk("looks_switchcostumeto", fields={"COSTUME": "ghost"})), costumes=["a"])
        assert "unresolved-costume" in codes(validate_project(p))

    def test_unknown_variable(self):
        p = one_sprite(flag(blk("data_setvariableto", VALUE=1, fields={"VARIABLE": "nope"})))
        assert "unresolved-variable" in codes(validate_project(p))

    def test_known_variable_local_and_stage(self):
        sp = sprite("Cat", scripts=[flag(blk("data_setvariableto", VALUE=1, fields={"VARIABLE": "v"}))], variables={"v": 0.0})
        assert validate_project(project(sp)) == []

    def test_unknown_key(self):
        p = one_sprite(script(blk("event_whenkeypressed", fields={"KEY": "banana"})))
        assert "unknown-key" in codes(validate_project(p))

    def test_unknown_attribute(self):
        p = one_sprite(tscript("t", assert_eq(attr("weight"), 1)))
        assert "unknown-attribute" in codes(validate_project(p))

    def test_duplicate_block_ids(self):
        p = one_sprite(flag(blk("motion_setx", X=1), blk("motion_setx", X=2)))
        clash = replace(
            p.sprites[0].scripts[0].body[1], block_id=p.sprites[0].scripts[0].body[0].block_id
        )
        body = (p.sprites[0].scripts[0].body[0], clash)
        broken = replace(
            p,
            sprites=(
                replace(
                    p.sprites[0],
                    scripts=(replace(p.sprites[0].scripts[0], body=body),),
                ),
            ),
        )
        assert "duplicate-id" in codes(validate_project(broken))

    def test_duplicate_sprite_names(self):
        p = project(sprite("Cat"), sprite("Cat"))
        assert "duplicate-sprite" in codes(validate_project(p))

    def test_cap_block_must_be_last(self):
        p = one_sprite(flag(blk("control_stop", fields={"STOP_OPTION": "all"}), blk("motion_setx", X=1)))
        assert "cap-not-last" in codes(validate_project(p))

    def test_empty_test_name(self):
        p = one_sprite(tscript(""))
        assert "empty-test-name" in codes(validate_project(p))

    def test_bad_region_color(self):
        from bbt.blocks import ColorRegion, StageDef

        p = project(sprite("Cat"), stage=StageDef(color_regions=(ColorRegion("brown", (0, 0, 1, 1)),)))
        assert "bad-color" in codes(validate_project(p))

    def test_stage_cannot_use_current_sprite(self):
        from bbt.blocks import StageDef

        stage = StageDef(scripts=(tscript("t", assert_eq(attr("x"), 0)),))
        from bbt.build import assign_ids
        from bbt.blocks import Project

        p = assign_ids(Project(stage=stage, sprites=()))
        assert "stage-self-reference" in codes(validate_project(p))
