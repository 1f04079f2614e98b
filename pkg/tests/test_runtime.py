import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbt.build import blk, project, script, sprite
from bbt.blocks import ColorRegion, StageDef
from bbt.errors import EvaluationError
from bbt.runtime import evaluate, touching, touching_color
from bbt.scheduler import FRAMES_PER_SECOND, Scheduler

from conftest import attr, flag, one_sprite


def ev(sched, thread, block):
    return evaluate(sched, thread, block)


def run_program(p, frames=1, seed=0, event="green_flag", **event_args):
    s = Scheduler(p, seed=seed)
    s.dispatch_event(event, **event_args)
    for _ in range(frames):
        s.run_frame()
    return s


class TestMotion:
    def test_goto_sets_position(self):
        s = run_program(one_sprite(flag(blk("motion_gotoxy", X=-170, Y=-150))))
        assert (s.state.sprites[0].x, s.state.sprites[0].y) == (-170, -150)

    def test_move_steps_along_direction_90(self):
        s = run_program(one_sprite(flag(blk("motion_movesteps", STEPS=5))))
        assert s.state.sprites[0].x == pytest.approx(5)
        assert s.state.sprites[0].y == pytest.approx(0)

    @pytest.mark.parametrize("direction", [0, 30, 45, 90, 135, 180, -90, -45])
    def test_move_steps_matches_trigonometry(self, direction):
        p = one_sprite(flag(blk("motion_pointindirection", DIRECTION=direction), blk("motion_movesteps", STEPS=10)))
        s = run_program(p)
        rad = math.radians(90 - direction)
        assert s.state.sprites[0].x == pytest.approx(10 * math.cos(rad))
        assert s.state.sprites[0].y == pytest.approx(10 * math.sin(rad))

    @pytest.mark.parametrize(
        "target,expected",
        [((0, 10), 0), ((10, 0), 90), ((-10, 0), -90), ((0, -10), 180), ((10, 10), 45)],
    )
    def test_point_towards_mouse(self, target, expected):
        p = one_sprite(flag(blk("motion_pointtowards", fields={"TOWARDS": "mouse-pointer"})))
        s = Scheduler(p)
        s.inject_input(mouse_x=target[0], mouse_y=target[1])
        s.dispatch_event("green_flag")
        s.run_frame()
        assert s.state.sprites[0].direction == pytest.approx(expected)

    def test_direction_wraps_into_half_open_range(self):
        p = one_sprite(flag(blk("motion_pointindirection", DIRECTION=270)))
        s = run_program(p)
        assert s.state.sprites[0].direction == -90

    def test_position_clamped_to_stage(self):
        s = run_program(one_sprite(flag(blk("motion_gotoxy", X=9999, Y=-9999))))
        assert (s.state.sprites[0].x, s.state.sprites[0].y) == (240, -180)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.tuples(st.sampled_from(["x", "y", "step"]), st.floats(-3000, 3000, allow_nan=False)), max_size=6))
    def test_clamp_invariant_over_random_motion(self, moves):
        body = []
        for kind, v in moves:
            if kind == "x":
                body.append(blk("motion_changexby", DX=float(v)))
            elif kind == "y":
                body.append(blk("motion_changeyby", DY=float(v)))
            else:
                body.append(blk("motion_movesteps", STEPS=float(v)))
        s = run_program(one_sprite(flag(*(body or [blk("motion_movesteps", STEPS=0)]))))
        assert -240 <= s.state.sprites[0].x <= 240
        assert -180 <= s.state.sprites[0].y <= 180

    def test_if_on_edge_bounce_reverses_and_leaves_edge(self):
        p = one_sprite(
            flag(
                blk("control_forever", SUBSTACK=[blk("motion_movesteps", STEPS=10), blk("motion_ifonedgebounce")]),
            )
        )
        s = Scheduler(p)
        s.dispatch_event("green_flag")
        cat = s.state.sprites[0]
        s.advance_until(lambda sc: touching(sc, cat, "edge"), budget=60)
        s.run_frame()  # the frame after bouncing
        assert not touching(s, cat, "edge")
        assert cat.direction == pytest.approx(-90)


class TestLooks:
    def test_say_and_think(self):
        s = run_program(one_sprite(flag(blk("looks_say", MESSAGE="hi"))))
        assert s.state.sprites[0].bubble_text == "hi"
        assert s.state.sprites[0].bubble_kind == "say"

    def test_say_number_renders_like_a_value(self):
        s = run_program(one_sprite(flag(blk("looks_say", MESSAGE=blk("operator_add", NUM1=1, NUM2=2)))))
        assert s.state.sprites[0].bubble_text == "3"

    def test_say_for_secs_clears_after_exact_frames(self):
        p = one_sprite(flag(blk("looks_sayforsecs", MESSAGE="hi", SECS=1)))
        s = Scheduler(p)
        s.dispatch_event("green_flag")
        for _ in range(FRAMES_PER_SECOND):
            s.run_frame()
            assert s.state.sprites[0].bubble_text == "hi"
        s.run_frame()
        assert s.state.sprites[0].bubble_text == ""

    def test_say_for_secs_does_not_clear_newer_bubble(self):
        p = one_sprite(
            flag(blk("looks_sayforsecs", MESSAGE="first", SECS=0.1)),
            flag(blk("control_wait", DURATION=0.05), blk("looks_say", MESSAGE="second")),
        )
        s = Scheduler(p)
        s.dispatch_event("green_flag")
        for _ in range(20):
            s.run_frame()
        assert s.state.sprites[0].bubble_text == "second"

    def test_costume_switching(self):
        p = one_sprite(
            flag(blk("looks_switchcostumeto", fields={"COSTUME": "b"}), blk("looks_nextcostume")),
            costumes=["a", "b"],
        )
        s = run_program(p)
        assert s.state.sprites[0].costume_index == 0  # b then wrap to a

    def test_show_hide_and_size(self):
        p = one_sprite(flag(blk("looks_hide"), blk("looks_setsizeto", SIZE=50), blk("looks_changesizeby", CHANGE=-60)))
        s = run_program(p)
        assert s.state.sprites[0].visible is False
        assert s.state.sprites[0].size == 0  # floored at zero


class TestCollision:
    def region_project(self):
        stage = StageDef(color_regions=(ColorRegion("#663300", (-20.0, 40.0, 20.0, 180.0)),))
        return project(sprite("Boat", scripts=[]), stage=stage)

    def test_touching_edge_boundary(self):
        p = one_sprite()
        s = Scheduler(p)
        cat = s.state.sprites[0]
        cat.x = 219.0
        assert not touching(s, cat, "edge")
        cat.x = 220.0  # half-width 20 from the 240 boundary
        assert touching(s, cat, "edge")

    def test_disjoint_sprites_do_not_touch(self):
        p = project(sprite("A"), sprite("B", x=100.0))
        s = Scheduler(p)
        assert not touching(s, s.state.sprites[0], "B")

    def test_overlapping_sprites_touch_symmetrically(self):
        p = project(sprite("A"), sprite("B", x=30.0))
        s = Scheduler(p)
        assert touching(s, s.state.sprites[0], "B")
        assert touching(s, s.state.sprites[1], "A")

    def test_shared_edge_is_not_touching(self):
        # boxes meet exactly at x=20: zero-area overlap does not count
        p = project(sprite("A"), sprite("B", x=40.0))
        s = Scheduler(p)
        assert not touching(s, s.state.sprites[0], "B")

    def test_invisible_sprites_touch_nothing(self):
        p = project(sprite("A"), sprite("B", x=0.0))
        s = Scheduler(p)
        s.state.sprites[0].visible = False
        assert not touching(s, s.state.sprites[0], "B")

    def test_unknown_target_is_false_with_diagnostic(self):
        s = Scheduler(one_sprite())
        assert not touching(s, s.state.sprites[0], "Ghost")
        assert s.diagnostics

    def test_touching_color_overlap(self):
        s = Scheduler(self.region_project())
        boat = s.state.sprites[0]
        boat.x, boat.y = 0.0, 100.0
        assert touching_color(s, boat, "#663300")
        assert not touching_color(s, boat, "#ffcc00")

    def test_touching_color_without_regions(self):
        s = Scheduler(one_sprite())
        assert not touching_color(s, s.state.sprites[0], "#663300")

    def test_touching_color_adjacent_edge_is_false(self):
        s = Scheduler(self.region_project())
        boat = s.state.sprites[0]
        boat.x, boat.y = -40.0, 100.0  # box right edge exactly at region's left edge
        assert not touching_color(s, boat, "#663300")

    def test_touching_mouse(self):
        s = Scheduler(one_sprite())
        s.inject_input(mouse_x=5, mouse_y=5)
        assert touching(s, s.state.sprites[0], "mouse-pointer")
        s.inject_input(mouse_x=100, mouse_y=0)
        assert not touching(s, s.state.sprites[0], "mouse-pointer")


class TestOperators:
    @pytest.mark.parametrize(
        "op,inputs,expected",
        [
            ("operator_add", {"NUM1": 2, "NUM2": 3}, 5.0),
            ("operator_subtract", {"NUM1": 2, "NUM2": 3}, -1.0),
            ("operator_multiply", {"NUM1": 2.5, "NUM2": 4}, 10.0),
            ("operator_divide", {"NUM1": 9, "NUM2": 2}, 4.5),
            ("operator_divide", {"NUM1": 9, "NUM2": 0}, 0.0),  # no infinities
            ("operator_mod", {"NUM1": 7, "NUM2": 3}, 1.0),
            ("operator_mod", {"NUM1": -7, "NUM2": 3}, 2.0),  # sign follows divisor
            ("operator_mod", {"NUM1": 7, "NUM2": 0}, 0.0),
            ("operator_round", {"NUM": 2.5}, 3.0),
            ("operator_round", {"NUM": -2.5}, -2.0),  # rounds half up
            ("operator_length", {"STRING": "apple"}, 5.0),
            ("operator_length", {"STRING": 100}, 3.0),
            ("operator_letter_of", {"LETTER": 1, "STRING": "apple"}, "a"),
            ("operator_letter_of", {"LETTER": 9, "STRING": "apple"}, ""),
            ("operator_join", {"STRING1": "a", "STRING2": 1}, "a1"),
            ("operator_equals", {"OPERAND1": "5", "OPERAND2": 5}, True),
            ("operator_gt", {"OPERAND1": "b", "OPERAND2": "A"}, True),
            ("operator_lt", {"OPERAND1": 3, "OPERAND2": "10"}, True),
            ("operator_and", {"OPERAND1": True, "OPERAND2": False}, False),
            ("operator_or", {"OPERAND1": True, "OPERAND2": False}, True),
            ("operator_not", {"OPERAND": False}, True),
        ],
    )
    def test_operator_semantics(self, sched, thread, op, inputs, expected):
        assert ev(sched, thread, blk(op, **inputs)) == expected

    def test_random_between_integer_bounds(self, sched, thread):
        draws = {ev(sched, thread, blk("operator_random", FROM=1, TO=10)) for _ in range(100)}
        assert all(isinstance(d, float) and d.is_integer() and 1 <= d <= 10 for d in draws)
        assert len(draws) > 3

    def test_random_between_fractional_bounds(self, sched, thread):
        d = ev(sched, thread, blk("operator_random", FROM=0.5, TO=1.0))
        assert 0.5 <= d <= 1.0 and not float(d).is_integer()

    def test_random_is_seed_reproducible(self):
        vals = []
        for _ in range(2):
            p = one_sprite(flag(blk("motion_setx", X=blk("operator_random", FROM=1, TO=240))))
            s = run_program(p, seed=99)
            vals.append(s.state.sprites[0].x)
        assert vals[0] == vals[1]


class TestVariables:
    def make(self):
        sp = sprite(
            "Cat",
            scripts=[
                flag(
                    blk("data_setvariableto", VALUE=5, fields={"VARIABLE": "local"}),
                    blk("data_changevariableby", VALUE=2, fields={"VARIABLE": "global"}),
                )
            ],
            variables={"local": 0.0},
        )
        return project(sp, stage=StageDef(variables={"global": 1.0}))

    def test_local_and_stage_scopes(self):
        s = run_program(self.make())
        assert s.state.sprites[0].variables["local"] == 5
        assert s.state.stage.variables["global"] == 3

    def test_read_back(self, sched, thread):
        sched.state.sprites[0].variables["v"] = 7.0
        assert ev(sched, thread, blk("data_variable", fields={"VARIABLE": "v"})) == 7.0


class TestAttributes:
    def boat(self):
        return project(
            sprite("Boat", x=1.0, y=2.0, direction=45.0, size=75.0, volume=40.0, costumes=["normal", "damaged"], current_costume=1)
        )

    @pytest.mark.parametrize(
        "prop,expected",
        [
            ("x", 1.0),
            ("y", 2.0),
            ("direction", 45.0),
            ("costume number", 2.0),
            ("costume name", "damaged"),
            ("size", 75.0),
            ("volume", 40.0),
            ("say text", ""),
            ("clone count", 0.0),
            ("running scripts count", 0.0),
        ],
    )
    def test_read_by_name(self, prop, expected):
        s = Scheduler(self.boat())
        from bbt.scheduler import PROGRAM, Thread
        from bbt.blocks import Script

        t = Thread(id=0, script=Script(None), owner=s.state.sprites[0], origin=PROGRAM, stack=[])
        assert ev(s, t, attr(prop, "Boat")) == expected

    def test_unknown_sprite_raises_evaluation_error(self, sched, thread):
        with pytest.raises(EvaluationError):
            ev(sched, thread, attr("x", "Ghost"))

    def test_running_scripts_count_sees_program_threads(self):
        p = one_sprite(
            flag(blk("control_forever", SUBSTACK=[blk("motion_changexby", DX=1)])),
            flag(blk("motion_setx", X=blk("test_attribute_of", fields={"PROPERTY": "running scripts count", "OBJECT": "Cat"}))),
        )
        s = run_program(p)
        assert s.state.sprites[0].x == 2.0


class TestClones:
    def cloning_project(self):
        return one_sprite(
            flag(
                blk("control_create_clone_of", fields={"CLONE_OPTION": "myself"}),
                blk("control_create_clone_of", fields={"CLONE_OPTION": "myself"}),
            ),
            script(blk("control_start_as_clone"), blk("motion_changeyby", DY=7)),
        )

    def test_clone_count_and_start_hats(self):
        s = run_program(self.cloning_project(), frames=2)
        assert len(s.state.clones) == 2
        assert all(c.y == 7 for c in s.state.clones)
        assert s.state.sprites[0].y == 0

    def test_clone_attribute_count(self, sched, thread):
        sched.create_clone(sched.state.sprites[0])
        sched.create_clone(sched.state.sprites[0])
        assert ev(sched, thread, attr("clone count", "Cat")) == 2.0

    def test_delete_this_clone(self):
        p = one_sprite(
            flag(blk("control_create_clone_of", fields={"CLONE_OPTION": "myself"})),
            script(blk("control_start_as_clone"), blk("control_delete_this_clone")),
        )
        s = run_program(p, frames=2)
        assert s.state.clones == []

    def test_broadcast_reaches_clones(self):
        p = one_sprite(
            flag(blk("control_create_clone_of", fields={"CLONE_OPTION": "myself"})),
            script(blk("event_whenbroadcastreceived", fields={"MESSAGE": "go"}), blk("motion_changexby", DX=3)),
        )
        s = run_program(p, frames=1)
        s.dispatch_event("broadcast", message="go")
        s.run_frame()
        assert s.state.sprites[0].x == 3
        assert s.state.clones[0].x == 3


class TestBroadcastAndWait:
    def test_waits_for_receivers(self):
        p = one_sprite(
            flag(
                blk("event_broadcastandwait", MESSAGE="work"),
                blk("looks_say", MESSAGE="after"),
            ),
            script(
                blk("event_whenbroadcastreceived", fields={"MESSAGE": "work"}),
                blk("control_repeat", TIMES=3, SUBSTACK=[blk("motion_changexby", DX=1)]),
            ),
        )
        s = Scheduler(p)
        s.dispatch_event("green_flag")
        s.run_frame()
        assert s.state.sprites[0].bubble_text == ""
        for _ in range(4):
            s.run_frame()
        assert s.state.sprites[0].x == 3
        assert s.state.sprites[0].bubble_text == "after"

    def test_no_receivers_continues_immediately(self):
        p = one_sprite(flag(blk("event_broadcastandwait", MESSAGE="void"), blk("looks_say", MESSAGE="after")))
        s = run_program(p)
        assert s.state.sprites[0].bubble_text == "after"


class TestSensingReporters:
    def test_mouse_reporters(self, sched, thread):
        sched.inject_input(mouse_x=12, mouse_y=-9)
        assert ev(sched, thread, blk("sensing_mousex")) == 12
        assert ev(sched, thread, blk("sensing_mousey")) == -9

    def test_key_pressed(self, sched, thread):
        keyb = blk("sensing_keypressed", fields={"KEY": "space"})
        anyb = blk("sensing_keypressed", fields={"KEY": "any"})
        assert ev(sched, thread, keyb) is False
        sched.inject_input(key_down="space")
        assert ev(sched, thread, keyb) is True
        assert ev(sched, thread, anyb) is True

    def test_distance_to_mouse(self, sched, thread):
        sched.inject_input(mouse_x=3, mouse_y=4)
        assert ev(sched, thread, blk("sensing_distanceto", fields={"DISTANCETOMENU": "mouse-pointer"})) == 5.0


class TestMoreNativeSemantics:
    def test_point_towards_sprite(self):
        p = project(
            sprite("A", scripts=[flag(blk("motion_pointtowards", fields={"TOWARDS": "B"}))]),
            sprite("B", x=0.0, y=50.0),
        )
        s = run_program(p)
        assert s.state.sprites[0].direction == pytest.approx(0)

    def test_think_sets_bubble_kind(self):
        s = run_program(one_sprite(flag(blk("looks_think", MESSAGE="hmm"))))
        assert s.state.sprites[0].bubble_kind == "think"
        assert s.state.sprites[0].bubble_text == "hmm"

    def test_plain_broadcast_does_not_wait(self):
        p = one_sprite(
            flag(blk("event_broadcast", MESSAGE="go"), blk("looks_say", MESSAGE="sent")),
            script(
                blk("event_whenbroadcastreceived", fields={"MESSAGE": "go"}),
                blk("control_wait", DURATION=1),
                blk("motion_setx", X=9),
            ),
        )
        s = run_program(p)
        assert s.state.sprites[0].bubble_text == "sent"  # sender never blocked
        assert s.state.sprites[0].x == 0

    def test_sprite_size_scales_bounding_box(self):
        # 40x40 costume at 200% size -> 80x80 box: sprites 55 apart touch
        p = project(sprite("A", size=200.0), sprite("B", x=55.0))
        s = Scheduler(p)
        assert touching(s, s.state.sprites[0], "B")
        s.state.sprites[0].size = 100.0
        assert not touching(s, s.state.sprites[0], "B")

    def test_costume_bounding_box_from_project_file(self):
        from bbt.project_io import parse_project, serialize_project
        from bbt.blocks import Costume

        p = project(sprite("A", costumes=[Costume("big", 100.0, 60.0)]))
        again = parse_project(serialize_project(p))
        assert again == p
        s = Scheduler(again)
        assert s.state.sprites[0].bounding_box() == (-50.0, -30.0, 50.0, 30.0)
