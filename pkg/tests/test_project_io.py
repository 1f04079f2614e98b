import json

import pytest
from hypothesis import given, settings

from bbt import fixtures
from bbt.blocks import STAGE, strip_ids
from bbt.build import blk, project, sprite
from bbt.errors import EmptySuiteError, ProjectLoadError, ProjectParseError
from bbt.project_io import (
    BatchTestSuite,
    extract_suite,
    inject_suite,
    parse_project,
    parse_suite,
    serialize_project,
    serialize_suite,
)
from bbt.validate import validate_project

from conftest import assert_eq, attr, flag, one_sprite, projects, tscript


class TestParse:
    def test_fig1_fixture(self):
        p = parse_project(fixtures.load("fig1_correct.proj.json"))
        assert len(p.sprites) == 1
        assert p.sprites[0].name == "Boat"
        assert len(p.sprites[0].scripts) == 2
        tests = list(p.test_scripts())
        assert len(tests) == 1
        assert tests[0][1].test_name == "Test 1"

    def test_empty_project_is_valid(self):
        p = parse_project(b'{"formatVersion": 1, "stage": {}, "sprites": []}')
        assert p.sprites == ()
        assert list(p.scripts_with_owner()) == []

    def test_truncated_document_reports_offset(self):
        data = fixtures.load("fig1_correct.proj.json")[:100]
        with pytest.raises(ProjectParseError) as exc:
            parse_project(data)
        assert exc.value.offset is not None

    def test_structural_error_reports_path(self):
        doc = {"formatVersion": 1, "stage": {}, "sprites": [{"name": "A", "scripts": [{"hat": None, "body": [{"id": "x"}]}]}]}
        with pytest.raises(ProjectParseError) as exc:
            parse_project(json.dumps(doc))
        assert "sprites[0]" in exc.value.path

    def test_wrong_version(self):
        with pytest.raises(ProjectParseError):
            parse_project(b'{"formatVersion": 2, "sprites": []}')

    def test_validation_failure_lists_diagnostics(self):
        doc = {
            "formatVersion": 1,
            "stage": {},
            "sprites": [
                {
                    "name": "A",
                    "scripts": [{"hat": None, "body": [{"op": "motion_gotoxy", "inputs": {"X": 1}}]}],
                }
            ],
        }
        with pytest.raises(ProjectLoadError) as exc:
            parse_project(json.dumps(doc))
        assert any(d.code == "missing-input" for d in exc.value.diagnostics)

    def test_missing_ids_are_filled_uniquely(self):
        doc = {
            "formatVersion": 1,
            "stage": {},
            "sprites": [
                {
                    "name": "A",
                    "scripts": [
                        {
                            "hat": {"op": "event_whenflagclicked"},
                            "body": [{"op": "motion_setx", "inputs": {"X": 1}}],
                        }
                    ],
                }
            ],
        }
        p = parse_project(json.dumps(doc))
        ids = [b.block_id for _, _, bl in iter_blocks(p) for b in [bl]]
        assert all(ids)
        assert len(set(ids)) == len(ids)


def iter_blocks(p):
    from bbt.blocks import iter_project_blocks

    return iter_project_blocks(p)


class TestRoundTrip:
    def test_fixtures_round_trip(self):
        for name in fixtures.names():
            if not name.endswith(".proj.json"):
                continue
            data = fixtures.load(name)
            p = parse_project(data)
            assert parse_project(serialize_project(p)) == p
            assert serialize_project(p) == data  # serializer is stable

    @settings(max_examples=60, deadline=None)
    @given(projects())
    def test_random_projects_round_trip(self, p):
        assert validate_project(p) == []
        assert parse_project(serialize_project(p)) == p


class TestSuites:
    def test_extract_preserves_order(self):
        p = parse_project(fixtures.load("boatrace_gold.proj.json"))
        suite = extract_suite(p, name="boatrace")
        assert suite.test_names() == [
            "starts in harbour",
            "follows the mouse",
            "says on wall crash",
            "damaged after crash",
            "says on reaching beach",
            "festive on the beach",
        ]
        assert all(t.sprite_name == "Boat" for t in suite.tests)

    def test_extract_empty_project_raises(self):
        p = one_sprite(flag(blk("motion_setx", X=1)))
        with pytest.raises(EmptySuiteError):
            extract_suite(p)

    def test_suite_file_round_trip(self):
        suite = parse_suite(fixtures.load("boatrace.bbt.json"))
        assert parse_suite(serialize_suite(suite)) == suite

    def test_suite_rejects_duplicate_names(self):
        p = one_sprite(tscript("a"), name="Cat")
        suite = extract_suite(p)
        doubled = BatchTestSuite(suite.suite_name, suite.tests + suite.tests)
        with pytest.raises(ProjectParseError):
            parse_suite(serialize_suite(doubled))

    def test_suite_rejects_non_test_scripts(self):
        raw = json.loads(serialize_suite(parse_suite(fixtures.load("boatrace.bbt.json"))))
        raw["tests"][0]["script"]["hat"] = {"op": "event_whenflagclicked", "id": "zz"}
        with pytest.raises(ProjectParseError):
            parse_suite(json.dumps(raw))


class TestInject:
    def suite(self):
        return parse_suite(fixtures.load("boatrace.bbt.json"))

    def test_inject_replaces_tests(self):
        target = parse_project(fixtures.load("boatrace_gold.proj.json"))
        injected = inject_suite(target, self.suite())
        assert len(list(injected.test_scripts())) == 6
        # program scripts untouched
        progs = [s for _, s in injected.scripts_with_owner() if not s.is_test]
        assert progs == [s for _, s in target.scripts_with_owner() if not s.is_test]

    def test_inject_is_idempotent(self):
        target = parse_project(fixtures.load("boatrace_no_follow.proj.json"))
        once = inject_suite(target, self.suite())
        twice = inject_suite(once, self.suite())
        assert once == twice

    def test_extract_after_inject_matches_suite(self):
        target = parse_project(fixtures.load("boatrace_no_beach.proj.json"))
        injected = inject_suite(target, self.suite())
        back = extract_suite(injected, name="boatrace")
        assert back.test_names() == self.suite().test_names()
        for got, want in zip(back.tests, self.suite().tests):
            assert got.sprite_name == want.sprite_name
            assert strip_ids(got.script) == strip_ids(want.script)

    def test_inject_block_ids_stay_unique(self):
        target = parse_project(fixtures.load("boatrace_gold.proj.json"))
        injected = inject_suite(target, self.suite())
        ids = [b.block_id for _, _, b in iter_blocks(injected)]
        assert len(set(ids)) == len(ids)

    def test_inject_empty_suite_clears_tests(self):
        target = parse_project(fixtures.load("boatrace_gold.proj.json"))
        injected = inject_suite(target, BatchTestSuite("empty", ()))
        assert list(injected.test_scripts()) == []

    def test_unmatched_sprite_becomes_record(self):
        target = project(sprite("Ship", scripts=[flag(blk("motion_setx", X=1))]))
        injected = inject_suite(target, self.suite())
        assert len(injected.unmatched_tests) == 6
        assert injected.unmatched_tests[0].sprite_name == "Boat"
        assert list(injected.test_scripts()) == []

    def test_unmatched_records_survive_serialization(self):
        target = project(sprite("Ship"))
        injected = inject_suite(target, self.suite())
        again = parse_project(serialize_project(injected))
        assert again == injected
