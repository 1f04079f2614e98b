#!/usr/bin/env python3
"""Regenerate the fixture projects under src/bbt/fixtures/.

The boat-race family shares one stage layout: the boat starts in a grey
harbour area at the bottom left, a brown wall bars the upper middle of
the stage, and a gold beach strip runs along the right edge. The boat
chases the mouse pointer, so tests steer it by moving the mouse.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from bbt import StageDef, validate_project  # noqa: E402
from bbt.blocks import ColorRegion  # noqa: E402
from bbt.build import blk, project, script, sprite, test_script  # noqa: E402
from bbt.project_io import extract_suite, save_project, save_suite  # noqa: E402

OUT_DIR = Path(__file__).resolve().parents[1] / "src" / "bbt" / "fixtures"

HARBOUR = "#888888"
WALL = "#663300"
BEACH = "#ffcc00"


def attr(prop, obj="current sprite"):
    return blk("test_attribute_of", fields={"PROPERTY": prop, "OBJECT": obj})


def assert_eq(actual, expected):
    return blk("test_assert_equals", ACTUAL=actual, EXPECTED=expected)


def assert_true(cond):
    return blk("test_assert_true", CONDITION=cond)


def touching_color(color):
    return blk("sensing_touchingcolor", COLOR=color)


def say_length():
    return blk("operator_length", STRING=attr("say text"))


def flag_script(*body):
    return script(blk("event_whenflagclicked"), *body)


# ---------------------------------------------------------------------------
# Figure 1: initialisation check


def fig1(correct: bool):
    x, y = (-170, -150) if correct else (0, 0)
    init = flag_script(
        blk("motion_gotoxy", X=x, Y=y),
        blk("looks_switchcostumeto", fields={"COSTUME": "normal"}),
    )
    test = test_script(
        "Test 1",
        blk("test_green_flag"),
        assert_eq(attr("x"), -170),
        assert_eq(attr("y"), -150),
        assert_eq(attr("costume name"), "normal"),
    )
    return project(
        sprite("Boat", scripts=[init, test], costumes=["normal", "damaged", "festive"], current_costume=2)
    )


# ---------------------------------------------------------------------------
# Figure 4: the edge race, with and without an explicit yield


def fig4():
    watcher = flag_script(
        blk(
            "control_forever",
            SUBSTACK=[
                blk(
                    "control_if",
                    CONDITION=blk("sensing_touchingobject", fields={"TOUCHINGOBJECTMENU": "edge"}),
                    SUBSTACK=[blk("looks_say", MESSAGE="Touched Edge!")],
                )
            ],
        )
    )
    mover = flag_script(
        blk("control_forever", SUBSTACK=[blk("motion_movesteps", STEPS=10)])
    )

    def edge_test(name, with_yield):
        body = [
            blk("test_green_flag"),
            blk(
                "control_wait_until",
                CONDITION=blk("sensing_touchingobject", fields={"TOUCHINGOBJECTMENU": "edge"}),
            ),
        ]
        if with_yield:
            body.append(blk("test_yield"))
        body += [assert_eq(attr("say text"), "Touched Edge!"), blk("test_restore")]
        return test_script(name, *body)

    return project(
        sprite(
            "Cat",
            scripts=[watcher, mover, edge_test("edge without yield", False), edge_test("edge with yield", True)],
        )
    )


# ---------------------------------------------------------------------------
# Figure 5: key-triggered movement, with and without waiting for scripts


def fig5():
    mover = script(
        blk("event_whenkeypressed", fields={"KEY": "right arrow"}),
        blk("control_repeat", TIMES=10, SUBSTACK=[blk("motion_movesteps", STEPS=5)]),
    )
    broken = test_script(
        "move right (broken)",
        blk("test_press_key", fields={"KEY": "right arrow"}),
        assert_eq(attr("x"), 50),
        blk("test_restore"),
    )
    fixed = test_script(
        "move right (fixed)",
        blk("test_press_key", fields={"KEY": "right arrow"}),
        blk("test_wait_all_scripts_done"),
        assert_eq(attr("x"), 50),
        blk("test_restore"),
    )
    return project(sprite("Cat", scripts=[mover, broken, fixed]))


# ---------------------------------------------------------------------------
# Boat Race: golden solution, test suite, and broken student variants


def boat_stage():
    return StageDef(
        color_regions=(
            ColorRegion(HARBOUR, (-200.0, -180.0, -140.0, -120.0)),
            ColorRegion(WALL, (-20.0, 40.0, 20.0, 180.0)),
            ColorRegion(BEACH, (200.0, -180.0, 240.0, 180.0)),
        )
    )


def boat_scripts(
    *,
    init_xy=(-170, -150),
    follow=True,
    crash_say=True,
    crash_costume=True,
    crash_script=True,
    beach_say=True,
    beach_costume=True,
    beach_script=True,
):
    scripts = [
        flag_script(
            blk("motion_gotoxy", X=init_xy[0], Y=init_xy[1]),
            blk("looks_switchcostumeto", fields={"COSTUME": "normal"}),
        )
    ]
    if follow:
        scripts.append(
            flag_script(
                blk(
                    "control_forever",
                    SUBSTACK=[
                        blk("motion_pointtowards", fields={"TOWARDS": "mouse-pointer"}),
                        blk(
                            "control_if",
                            CONDITION=blk(
                                "operator_gt",
                                OPERAND1=blk("sensing_distanceto", fields={"DISTANCETOMENU": "mouse-pointer"}),
                                OPERAND2=10,
                            ),
                            SUBSTACK=[blk("motion_movesteps", STEPS=5)],
                        ),
                    ],
                )
            )
        )
    if crash_script:
        reaction = []
        if crash_say:
            reaction.append(blk("looks_say", MESSAGE="Crash!"))
        if crash_costume:
            reaction.append(blk("looks_switchcostumeto", fields={"COSTUME": "damaged"}))
        scripts.append(
            flag_script(
                blk(
                    "control_forever",
                    SUBSTACK=[blk("control_if", CONDITION=touching_color(WALL), SUBSTACK=reaction)],
                )
            )
        )
    if beach_script:
        reaction = []
        if beach_say:
            reaction.append(blk("looks_say", MESSAGE="You made it!"))
        if beach_costume:
            reaction.append(blk("looks_switchcostumeto", fields={"COSTUME": "festive"}))
        scripts.append(
            flag_script(
                blk(
                    "control_forever",
                    SUBSTACK=[blk("control_if", CONDITION=touching_color(BEACH), SUBSTACK=reaction)],
                )
            )
        )
    return scripts


def boat_tests():
    return [
        test_script(
            "starts in harbour",
            blk("test_green_flag"),
            assert_eq(attr("costume name"), "normal"),
            assert_true(touching_color(HARBOUR)),
            blk("test_restore"),
        ),
        test_script(
            "follows the mouse",
            blk("test_green_flag"),
            blk("test_mouse_move", X=150, Y=-150),
            blk("control_wait", DURATION=2),
            blk(
                "test_assert_less",
                VALUE=blk("sensing_distanceto", fields={"DISTANCETOMENU": "mouse-pointer"}),
                BOUND=50,
            ),
            blk("test_restore"),
        ),
        test_script(
            "says on wall crash",
            blk("test_green_flag"),
            blk("test_mouse_move", X=0, Y=160),
            blk("control_wait_until", CONDITION=touching_color(WALL)),
            blk("test_yield"),
            blk("test_assert_greater", VALUE=say_length(), BOUND=0),
            blk("test_restore"),
        ),
        test_script(
            "damaged after crash",
            blk("test_green_flag"),
            blk("test_mouse_move", X=0, Y=160),
            blk("control_wait_until", CONDITION=touching_color(WALL)),
            blk("test_yield"),
            assert_eq(attr("costume name"), "damaged"),
            blk("test_restore"),
        ),
        test_script(
            "says on reaching beach",
            blk("test_green_flag"),
            blk("test_mouse_move", X=220, Y=-150),
            blk("control_wait_until", CONDITION=touching_color(BEACH)),
            blk("test_yield"),
            blk("test_assert_greater", VALUE=say_length(), BOUND=0),
            blk("test_restore"),
        ),
        test_script(
            "festive on the beach",
            blk("test_green_flag"),
            blk("test_mouse_move", X=220, Y=-150),
            blk("control_wait_until", CONDITION=touching_color(BEACH)),
            blk("test_yield"),
            assert_eq(attr("costume name"), "festive"),
            blk("test_restore"),
        ),
    ]


def boat_project(scripts, with_tests=False):
    all_scripts = list(scripts) + (boat_tests() if with_tests else [])
    return project(
        sprite(
            "Boat",
            scripts=all_scripts,
            costumes=["normal", "damaged", "festive"],
            current_costume=2,
        ),
        stage=boat_stage(),
    )


def fig8():
    broken = test_script(
        "crash costume (broken)",
        blk("test_green_flag"),
        blk("test_mouse_move", X=0, Y=160),
        assert_true(touching_color(WALL)),
        assert_eq(attr("costume name"), "damaged"),
        blk("test_restore"),
    )
    fixed = test_script(
        "crash costume (fixed)",
        blk("test_green_flag"),
        blk("test_mouse_move", X=0, Y=160),
        blk("control_wait_until", CONDITION=touching_color(WALL)),
        blk("test_yield"),
        assert_eq(attr("costume name"), "damaged"),
        blk("test_restore"),
    )
    return project(
        sprite(
            "Boat",
            scripts=boat_scripts() + [broken, fixed],
            costumes=["normal", "damaged", "festive"],
            current_costume=2,
        ),
        stage=boat_stage(),
    )


def main(out_dir: Path | None = None):
    out = Path(out_dir) if out_dir is not None else OUT_DIR
    out.mkdir(parents=True, exist_ok=True)
    projects = {
        "fig1_correct.proj.json": fig1(correct=True),
        "fig1_faulty.proj.json": fig1(correct=False),
        "fig4_edge_race.proj.json": fig4(),
        "fig5_key_movement.proj.json": fig5(),
        "fig8_loop_sensing.proj.json": fig8(),
        "boatrace_gold.proj.json": boat_project(boat_scripts(), with_tests=True),
        "boatrace_bad_init.proj.json": boat_project(boat_scripts(init_xy=(0, 0))),
        "boatrace_no_follow.proj.json": boat_project(boat_scripts(follow=False)),
        "boatrace_silent_crash.proj.json": boat_project(boat_scripts(crash_say=False)),
        "boatrace_no_damage.proj.json": boat_project(boat_scripts(crash_costume=False)),
        "boatrace_no_beach.proj.json": boat_project(boat_scripts(beach_script=False)),
        "boatrace_plain_beach.proj.json": boat_project(boat_scripts(beach_costume=False)),
    }
    for name, p in projects.items():
        diags = validate_project(p)
        if diags:
            raise SystemExit(f"{name}: {[str(d) for d in diags]}")
        save_project(p, out / name)
        print(f"wrote {name}")

    suite = extract_suite(projects["boatrace_gold.proj.json"], name="boatrace")
    save_suite(suite, out / "boatrace.bbt.json")
    print("wrote boatrace.bbt.json")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else None)
