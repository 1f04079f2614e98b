"""Shared builders and hypothesis strategies for test projects."""

import pytest
from hypothesis import strategies as st

from bbt.build import blk, project, script, sprite
from bbt.build import test_script as tscript
from bbt.scheduler import PROGRAM, Scheduler, Thread
from bbt.blocks import Script


def attr(prop, obj="current sprite"):
    return blk("test_attribute_of", fields={"PROPERTY": prop, "OBJECT": obj})


def assert_eq(actual, expected):
    return blk("test_assert_equals", ACTUAL=actual, EXPECTED=expected)


def flag(*body):
    return script(blk("event_whenflagclicked"), *body)


def one_sprite(*scripts, name="Cat", **kwargs):
    return project(sprite(name, scripts=list(scripts), **kwargs))


@pytest.fixture
def sched():
    """Scheduler over a single bare sprite, plus a detached thread for
    direct expression evaluation."""
    p = one_sprite(costumes=["a", "b"], variables={"v": 0.0})
    return Scheduler(p, seed=0)


@pytest.fixture
def thread(sched):
    return Thread(id=0, script=Script(None), owner=sched.state.sprites[0], origin=PROGRAM, stack=[])


# ---------------------------------------------------------------------------
# random-project strategies

_numbers = st.one_of(
    st.integers(min_value=-100, max_value=100).map(float),
    st.floats(min_value=-100, max_value=100, allow_nan=False, width=32).map(float),
)
_texts = st.text(alphabet="abcXYZ 09", max_size=6)

num_exprs = st.recursive(
    st.one_of(_numbers, _texts),
    lambda child: st.builds(
        lambda op, a, b: blk(op, NUM1=a, NUM2=b),
        st.sampled_from(["operator_add", "operator_subtract", "operator_multiply", "operator_divide"]),
        child,
        child,
    ),
    max_leaves=4,
)

bool_exprs = st.one_of(
    st.booleans(),
    st.builds(
        lambda op, a, b: blk(op, OPERAND1=a, OPERAND2=b),
        st.sampled_from(["operator_gt", "operator_lt", "operator_equals"]),
        num_exprs,
        num_exprs,
    ),
)

_simple_stmts = st.one_of(
    st.builds(lambda n: blk("motion_movesteps", STEPS=n), num_exprs),
    st.builds(lambda x, y: blk("motion_gotoxy", X=x, Y=y), num_exprs, num_exprs),
    st.builds(lambda n: blk("motion_changexby", DX=n), num_exprs),
    st.builds(lambda t: blk("looks_say", MESSAGE=t), _texts),
    st.builds(lambda n: blk("data_changevariableby", VALUE=n, fields={"VARIABLE": "v"}), num_exprs),
    st.builds(lambda: blk("looks_nextcostume")),
    st.builds(
        lambda a, b: blk("motion_movesteps", STEPS=blk("operator_random", FROM=a, TO=b)),
        st.integers(1, 5).map(float),
        st.integers(6, 10).map(float),
    ),
    st.builds(lambda s: blk("control_wait", DURATION=s), st.floats(0.0, 0.25).map(float)),
)

_stmts = st.one_of(
    _simple_stmts,
    st.builds(
        lambda n, body: blk("control_repeat", TIMES=float(n), SUBSTACK=body),
        st.integers(1, 4),
        st.lists(_simple_stmts, min_size=1, max_size=3),
    ),
    st.builds(
        lambda cond, body: blk("control_if", CONDITION=cond, SUBSTACK=body),
        bool_exprs,
        st.lists(_simple_stmts, min_size=1, max_size=2),
    ),
)

_scripts = st.builds(lambda body: script(blk("event_whenflagclicked"), *body), st.lists(_stmts, min_size=1, max_size=4))


@st.composite
def projects(draw):
    n_sprites = draw(st.integers(1, 2))
    sprites = []
    for i, name in enumerate(["Alpha", "Beta"][:n_sprites]):
        scripts = draw(st.lists(_scripts, min_size=1, max_size=2))
        sprites.append(sprite(name, scripts=scripts, costumes=["c1", "c2"], variables={"v": 0.0}))
    return project(*sprites)
