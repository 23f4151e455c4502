"""Adding recovery (reset) events to plant and specification models."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .automaton import Automaton, Event, EventClass, EventTable
from .errors import InputError, ParseError

PLANT = "plant"
SPEC = "spec"


@dataclass(frozen=True)
class RecoveryBinding:
    automaton: str
    event: str
    kind: str  # "plant" or "spec"

    def __post_init__(self):
        if self.kind not in (PLANT, SPEC):
            raise InputError(f"binding kind must be plant or spec, got {self.kind!r}")

    def line(self) -> str:
        return f"{self.automaton} {self.event} {self.kind}"


def make_recoverable(a: Automaton, r: str, table: EventTable | None = None) -> Automaton:
    """Return ``a`` with a reset event ``r`` leading every state to the initial one.

    ``r`` must be new to ``a``.  If ``table`` is given it must declare ``r``
    as a recovery event; otherwise ``r`` is registered as one.
    """
    if r in a.table:
        raise InputError(f"{a.name}: recovery event {r!r} already in the alphabet")
    if table is not None and r in table and table.kind(r) is not EventClass.RECOVERY:
        raise InputError(f"{r!r} is not a recovery event")
    if a.is_empty:
        raise InputError(f"{a.name}: cannot add recovery to an empty automaton")
    new_table = a.table.merge(EventTable([Event(r, EventClass.RECOVERY)]))
    init = a._initial
    rows = []
    for row in a._succ:
        row = dict(row)
        row[r] = init
        rows.append(row)
    return Automaton._raw(a.name, new_table, a._names, rows, init, a._marked, a._index)


def default_event(name: str) -> str:
    return f"r_{name}"


def make_recoverable_set(plants, specs, events=None):
    """Transform every plant and specification.

    ``events`` optionally maps automaton names to recovery event ids; the
    default id is ``r_<name>``.  Returns ``(automata, bindings)`` with the
    plants first.
    """
    events = dict(events or {})
    names = [a.name for a in list(plants) + list(specs)]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise InputError(f"duplicate automaton names: {', '.join(dupes)}")
    unknown = sorted(set(events) - set(names))
    if unknown:
        raise InputError(f"recovery events given for unknown automata: {', '.join(unknown)}")
    chosen = {n: events.get(n, default_event(n)) for n in names}
    taken = {}
    for n, r in chosen.items():
        if r in taken:
            raise InputError(f"recovery event {r!r} assigned to both {taken[r]} and {n}")
        taken[r] = n
    every = set()
    for a in list(plants) + list(specs):
        every.update(a.alphabet)
    clash = sorted(r for r in taken if r in every)
    if clash:
        raise InputError(f"recovery events already used as ordinary events: {', '.join(clash)}")

    out, bindings = [], []
    for kind, group in ((PLANT, plants), (SPEC, specs)):
        for a in group:
            out.append(make_recoverable(a, chosen[a.name]))
            bindings.append(RecoveryBinding(a.name, chosen[a.name], kind))
    return out, bindings


def parse_bindings(text: str, path=None) -> list:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if len(line) != 3:
            raise ParseError("expected '<automaton> <event> <plant|spec>'", path, no)
        try:
            out.append(RecoveryBinding(*line))
        except InputError as exc:
            raise ParseError(str(exc), path, no) from None
    return out


def read_bindings(path) -> list:
    path = Path(path)
    return parse_bindings(path.read_text(encoding="utf-8"), path)


def dump_bindings(bindings) -> str:
    return "".join(b.line() + "\n" for b in bindings)
