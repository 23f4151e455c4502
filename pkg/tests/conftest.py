import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from recosync import Automaton, Event, EventTable, make_recoverable  # noqa: E402
from recosync.cases import fixture_dir, load_case  # noqa: E402

FIXTURES = fixture_dir()


def aut(name, events, transitions, initial="0", marked=("0",), states=None):
    """Shorthand: ``events`` maps id -> 'c'|'u'|'r'; states default to those mentioned."""
    table = EventTable([Event(e, k) for e, k in events.items()])
    if states is None:
        states = [initial]
        for s, _, d in transitions:
            for q in (s, d):
                if q not in states:
                    states.append(q)
    return Automaton(name, table, states, transitions, initial, marked)


@pytest.fixture(scope="session")
def small_factory():
    return load_case("small-factory")


@pytest.fixture(scope="session")
def fms():
    return load_case("fms")


EVENT_POOL = ("a", "b", "c", "d", "e", "f")


@st.composite
def dfas(draw, name="A", alphabet=None, kinds=None, max_states=4, complete=False, mark_initial=False):
    """A small random DFA, states '0'..'n-1', initial '0'."""
    n = draw(st.integers(1, max_states))
    if alphabet is None:
        alphabet = draw(st.lists(st.sampled_from(EVENT_POOL), min_size=1, max_size=3, unique=True))
    if kinds is None:
        kinds = {e: draw(st.sampled_from("cu")) for e in alphabet}
    states = [str(i) for i in range(n)]
    trans = []
    for q in states:
        for e in alphabet:
            choice = st.sampled_from(states)
            tgt = draw(choice if complete else st.one_of(st.none(), choice))
            if tgt is not None:
                trans.append((q, e, tgt))
    marked = draw(st.lists(st.sampled_from(states), max_size=n, unique=True))
    if mark_initial and "0" not in marked:
        marked.append("0")
    table = EventTable([Event(e, kinds[e]) for e in alphabet])
    return Automaton(name, table, states, trans, "0", marked)


@st.composite
def systems(draw, max_plants=3, max_specs=2):
    """Recoverable plants and specifications, at most five components of at most four states.

    Every specification only uses events of some plant, so local plants exist.
    """
    kinds = {e: draw(st.sampled_from("cu")) for e in EVENT_POOL}
    n_plants = draw(st.integers(1, max_plants))
    n_specs = draw(st.integers(1, min(max_specs, 5 - n_plants)))
    plants = []
    for i in range(n_plants):
        alpha = draw(st.lists(st.sampled_from(EVENT_POOL), min_size=1, max_size=3, unique=True))
        g = draw(dfas(name=f"G{i}", alphabet=alpha, kinds=kinds, mark_initial=True))
        plants.append(make_recoverable(g, f"rG{i}"))
    used = sorted({e for p in plants for e in p.alphabet if not e.startswith("r")})
    specs = []
    for j in range(n_specs):
        alpha = draw(st.lists(st.sampled_from(used), min_size=1, max_size=3, unique=True))
        e = draw(dfas(name=f"E{j}", alphabet=alpha, kinds=kinds, mark_initial=True))
        specs.append(make_recoverable(e, f"rE{j}"))
    return plants, specs
