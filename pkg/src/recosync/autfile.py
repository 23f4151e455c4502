"""Reading and writing the line-oriented ``.aut`` automaton format."""
from __future__ import annotations

from pathlib import Path

from .automaton import Automaton, Event, EventClass, EventTable
from .errors import InputError, ParseError

AUT_GRAMMAR = """\
automaton <name>
events
  <event-id> <c|u|r>        # controllable|uncontrollable|recovery
states
  <state-id> [initial] [marked]
transitions
  <src> <event-id> <dst>
end
"""

_SECTIONS = ("events", "states", "transitions")


def _lines(text):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def parse_aut(text: str, path=None) -> Automaton:
    name = None
    section = None
    events, states, transitions = [], [], []
    initial = []
    marked = []
    done = False
    for no, toks in _lines(text):
        if done:
            raise ParseError("content after 'end'", path, no)
        head = toks[0]
        if name is None:
            if head != "automaton" or len(toks) != 2:
                raise ParseError("expected 'automaton <name>'", path, no)
            name = toks[1]
            continue
        if len(toks) == 1 and head in _SECTIONS:
            if section is not None and _SECTIONS.index(head) <= _SECTIONS.index(section):
                raise ParseError(f"section '{head}' out of order", path, no)
            section = head
            continue
        if toks == ["end"]:
            done = True
            continue
        if section == "events":
            if len(toks) != 2 or toks[1] not in ("c", "u", "r"):
                raise ParseError("expected '<event-id> <c|u|r>'", path, no)
            try:
                events.append(Event(toks[0], EventClass(toks[1])))
            except InputError as exc:
                raise ParseError(str(exc), path, no) from None
        elif section == "states":
            flags = toks[1:]
            if any(f not in ("initial", "marked") for f in flags) or len(set(flags)) != len(flags):
                raise ParseError("expected '<state-id> [initial] [marked]'", path, no)
            states.append(toks[0])
            if "initial" in flags:
                initial.append(toks[0])
            if "marked" in flags:
                marked.append(toks[0])
        elif section == "transitions":
            if len(toks) != 3:
                raise ParseError("expected '<src> <event-id> <dst>'", path, no)
            transitions.append(tuple(toks))
        else:
            raise ParseError(f"unexpected line {' '.join(toks)!r}", path, no)
    if name is None:
        raise ParseError("empty automaton file", path)
    if not done:
        raise ParseError("missing 'end'", path)
    if len(initial) > 1 or (states and not initial):
        raise ParseError("exactly one initial state is required", path)
    try:
        table = EventTable(events)
        if len(table) != len(events):
            raise InputError("duplicate event declaration")
        return Automaton(name, table, states, transitions, initial[0] if initial else None, marked)
    except InputError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), path) from None


def read_aut(path) -> Automaton:
    path = Path(path)
    return parse_aut(path.read_text(encoding="utf-8"), path)


def dump_aut(a: Automaton) -> str:
    """Canonical text: events in table order, states and transitions sorted."""
    out = [f"automaton {a.name}", "events"]
    for ev in a.table:
        out.append(f"  {ev.id} {ev.kind.value}")
    out.append("states")
    init = a.initial
    marked = a.marked
    for q in sorted(a.states):
        flags = []
        if q == init:
            flags.append("initial")
        if q in marked:
            flags.append("marked")
        out.append("  " + " ".join([q] + flags))
    out.append("transitions")
    rank = a.table.rank
    for src, e, dst in sorted(a.transitions(), key=lambda t: (t[0], rank(t[1]))):
        out.append(f"  {src} {e} {dst}")
    out.append("end")
    return "\n".join(out) + "\n"


def write_aut(a: Automaton, path) -> None:
    Path(path).write_text(dump_aut(a), encoding="utf-8")


def to_dot(a: Automaton) -> str:
    out = [f'digraph "{a.name}" {{', "  rankdir=LR;", '  __init [shape=point];']
    for q in a.states:
        shape = "doublecircle" if q in a.marked else "circle"
        out.append(f'  "{q}" [shape={shape}];')
    if a.initial is not None:
        out.append(f'  __init -> "{a.initial}";')
    for src, e, dst in a.transitions():
        out.append(f'  "{src}" -> "{dst}" [label="{e}"];')
    out.append("}")
    return "\n".join(out) + "\n"
