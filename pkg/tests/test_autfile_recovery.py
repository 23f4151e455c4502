import pytest
from hypothesis import given, settings

from conftest import FIXTURES, aut, dfas
from recosync import EventClass, InputError, ParseError, language_equal, make_recoverable, make_recoverable_set
from recosync.autfile import dump_aut, parse_aut, read_aut, to_dot
from recosync.recovery import RecoveryBinding, default_event, dump_bindings, parse_bindings

GOOD = """\
automaton M  # a machine
events
  a c
  b u
states
  0 initial marked
  1
transitions
  0 a 1
  1 b 0
end
"""


def test_parse_roundtrip():
    a = parse_aut(GOOD)
    assert a.name == "M" and a.initial == "0" and a.marked == {"0"}
    assert dump_aut(parse_aut(dump_aut(a))) == dump_aut(a)


def test_dump_is_canonical():
    a = aut("A", {"b": "u", "a": "c"}, [("1", "b", "0"), ("0", "a", "1"), ("0", "b", "0")])
    assert dump_aut(a).splitlines()[6:] == [
        "  1",
        "transitions",
        "  0 b 0",
        "  0 a 1",
        "  1 b 0",
        "end",
    ]


@pytest.mark.parametrize(
    "text, line",
    [
        ("events\n", 1),
        ("automaton M\nevents\n  a x\nend\n", 3),
        ("automaton M\nstates\n  0 initial\nevents\n", 4),
        ("automaton M\nevents\n  a c\nstates\n  0 initial\ntransitions\n  0 a\nend\n", 7),
        ("automaton M\nstates\n  0 initial\nend\nautomaton N\n", 5),
        ("automaton M\nstates\n  0 start\nend\n", 3),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_aut(text, "m.aut")
    assert info.value.line == line
    assert "m.aut" in str(info.value)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "automaton M\nstates\n  0\nend\n",
        "automaton M\nstates\n  0 initial\n  1 initial\nend\n",
        "automaton M\nevents\n  a c\nstates\n  0 initial\n",
        "automaton M\nevents\n  a c\n  a c\nstates\n  0 initial\nend\n",
        "automaton M\nevents\n  a c\nstates\n  0 initial\ntransitions\n  0 a 1\nend\n",
    ],
)
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse_aut(text)


def test_all_fixtures_load_and_roundtrip():
    files = sorted(FIXTURES.rglob("*.aut"))
    assert len(files) > 20
    for f in files:
        a = read_aut(f)
        assert dump_aut(parse_aut(dump_aut(a))) == dump_aut(a)


def test_golden_files_are_canonical():
    for f in (FIXTURES / "small_factory").glob("*_golden.aut"):
        a = read_aut(f)
        assert language_equal(a, parse_aut(dump_aut(a)))


def test_dot_output():
    dot = to_dot(parse_aut(GOOD))
    assert dot.startswith('digraph "M"')
    assert '"0" -> "1" [label="a"];' in dot


@settings(max_examples=100, deadline=None)
@given(dfas())
def test_dump_parse_roundtrip_random(a):
    b = parse_aut(dump_aut(a))
    assert set(b.states) == set(a.states)
    assert set(b.transitions()) == set(a.transitions())
    assert b.marked == a.marked


# -- recovery -----------------------------------------------------------------

def test_make_recoverable_example_a():
    a = read_aut(FIXTURES / "example_a.aut")
    b = make_recoverable(a, "r")
    assert b.table.kind("r") is EventClass.RECOVERY
    assert {q: b.successors(q)["r"] for q in b.states} == {"0": "0", "1": "0"}
    assert b.n_transitions == a.n_transitions + a.n_states
    assert a.n_transitions == 4  # the original is untouched


def test_make_recoverable_rejects_existing_event():
    a = read_aut(FIXTURES / "example_a.aut")
    with pytest.raises(InputError):
        make_recoverable(a, "a")


def test_make_recoverable_set_defaults_and_bindings():
    m = aut("M", {"a": "c"}, [("0", "a", "0")])
    e = aut("E", {"a": "c"}, [("0", "a", "0")])
    out, bindings = make_recoverable_set([m], [e], {"M": "rm"})
    assert [a.name for a in out] == ["M", "E"]
    assert bindings == [RecoveryBinding("M", "rm", "plant"), RecoveryBinding("E", default_event("E"), "spec")]
    assert parse_bindings(dump_bindings(bindings)) == bindings


@pytest.mark.parametrize(
    "events",
    [{"M": "r", "E": "r"}, {"M": "a"}, {"X": "r"}],
)
def test_make_recoverable_set_rejects(events):
    m = aut("M", {"a": "c"}, [("0", "a", "0")])
    e = aut("E", {"a": "c"}, [("0", "a", "0")])
    with pytest.raises(InputError):
        make_recoverable_set([m], [e], events)


def test_bindings_parse_errors():
    with pytest.raises(ParseError):
        parse_bindings("M r1\n")
    with pytest.raises(ParseError):
        parse_bindings("M r1 machine\n")


def test_fms_manifest_has_sixteen_events(fms):
    plants, specs = fms
    assert len(plants) == 8 and len(specs) == 8
    rec = {e for a in plants + specs for e in a.table.recovery}
    assert len(rec) == 16


def test_fms_event_convention(fms):
    plants, specs = fms
    for a in plants + specs:
        for ev in a.table:
            if ev.kind is EventClass.RECOVERY:
                continue
            expect = EventClass.CONTROLLABLE if int(ev.id) % 2 else EventClass.UNCONTROLLABLE
            assert ev.kind is expect, (a.name, ev.id)
