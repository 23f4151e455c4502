"""Deterministic finite automata over a classified event alphabet.

States and events are plain strings.  Internally an automaton keeps its
states in a list and one ``{event: target_index}`` dict per state, so the
transition function is deterministic by construction and partial by
default.  Words are tuples of event ids.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

from .errors import InputError

Word = tuple  # tuple[str, ...]

#: Separator used for the names of composite states.
SEP = "|"


class EventClass(str, enum.Enum):
    CONTROLLABLE = "c"
    UNCONTROLLABLE = "u"
    RECOVERY = "r"


def _check_token(token, what):
    if not isinstance(token, str) or not token or any(ch.isspace() for ch in token) or "#" in token:
        raise InputError(f"invalid {what} id {token!r}")


@dataclass(frozen=True)
class Event:
    id: str
    kind: EventClass

    def __post_init__(self):
        _check_token(self.id, "event")
        object.__setattr__(self, "kind", EventClass(self.kind))


class EventTable:
    """Ordered registry of events and their classes.

    The order is the tie-breaking order used everywhere (shortest words,
    serialization, permutations).  An id registered twice with the same
    class is merged; with different classes it is an error.
    """

    __slots__ = ("_kinds", "_rank")

    def __init__(self, events: Iterable = ()):
        kinds: dict[str, EventClass] = {}
        for ev in events:
            if not isinstance(ev, Event):
                ev = Event(*ev)
            prev = kinds.get(ev.id)
            if prev is None:
                kinds[ev.id] = ev.kind
            elif prev is not ev.kind:
                raise InputError(
                    f"event {ev.id!r} declared as {prev.name.lower()} and as {ev.kind.name.lower()}"
                )
        self._kinds = kinds
        self._rank = {eid: i for i, eid in enumerate(kinds)}

    def __iter__(self) -> Iterator[Event]:
        return (Event(eid, kind) for eid, kind in self._kinds.items())

    def __len__(self):
        return len(self._kinds)

    def __contains__(self, eid):
        return eid in self._kinds

    def __eq__(self, other):
        if not isinstance(other, EventTable):
            return NotImplemented
        return list(self._kinds.items()) == list(other._kinds.items())

    def __hash__(self):
        return hash(tuple(self._kinds.items()))

    def __repr__(self):
        body = " ".join(f"{e}:{k.value}" for e, k in self._kinds.items())
        return f"EventTable({body})"

    @property
    def ids(self) -> tuple:
        return tuple(self._kinds)

    def kind(self, eid) -> EventClass:
        try:
            return self._kinds[eid]
        except KeyError:
            raise InputError(f"unknown event {eid!r}") from None

    def rank(self, eid) -> int:
        try:
            return self._rank[eid]
        except KeyError:
            raise InputError(f"unknown event {eid!r}") from None

    def of_kind(self, *kinds) -> tuple:
        return tuple(e for e, k in self._kinds.items() if k in kinds)

    @property
    def controllable(self) -> frozenset:
        return frozenset(self.of_kind(EventClass.CONTROLLABLE))

    @property
    def uncontrollable(self) -> frozenset:
        return frozenset(self.of_kind(EventClass.UNCONTROLLABLE))

    @property
    def recovery(self) -> frozenset:
        return frozenset(self.of_kind(EventClass.RECOVERY))

    def merge(self, *others: "EventTable") -> "EventTable":
        events = list(self)
        for other in others:
            events.extend(other)
        return EventTable(events)

    def subset(self, ids) -> "EventTable":
        ids = set(ids)
        for eid in ids:
            self.kind(eid)
        return EventTable(ev for ev in self if ev.id in ids)

    def without(self, ids) -> "EventTable":
        ids = set(ids)
        return EventTable(ev for ev in self if ev.id not in ids)

    def sort(self, ids) -> list:
        return sorted(ids, key=self.rank)


class Automaton:
    """A deterministic automaton ``(Q, Σ, δ, q0, Qm)``.

    ``table`` is the alphabet together with the class of every event.  An
    automaton without states is allowed (the empty supervisor); its
    ``initial`` is ``None``.
    """

    __slots__ = ("name", "table", "_names", "_index", "_succ", "_initial", "_marked")

    def __init__(self, name, table: EventTable, states: Iterable[str], transitions: Iterable,
                 initial: Optional[str], marked: Iterable[str] = ()):
        _check_token(name, "automaton")
        names = list(states)
        index = {}
        for q in names:
            _check_token(q, "state")
            if q in index:
                raise InputError(f"{name}: duplicate state {q!r}")
            index[q] = len(index)
        succ: list[dict] = [{} for _ in names]
        for src, ev, dst in transitions:
            if src not in index or dst not in index:
                raise InputError(f"{name}: transition {src} {ev} {dst} uses an unknown state")
            if ev not in table:
                raise InputError(f"{name}: transition {src} {ev} {dst} uses an event outside the alphabet")
            row = succ[index[src]]
            if ev in row and row[ev] != index[dst]:
                raise InputError(f"{name}: nondeterministic transitions on {ev!r} from {src!r}")
            row[ev] = index[dst]
        if names:
            if initial not in index:
                raise InputError(f"{name}: initial state {initial!r} is not a state")
            init = index[initial]
        elif initial is not None:
            raise InputError(f"{name}: initial state {initial!r} is not a state")
        else:
            init = None
        mk = set()
        for q in marked:
            if q not in index:
                raise InputError(f"{name}: marked state {q!r} is not a state")
            mk.add(index[q])
        self._set(name, table, names, index, succ, init, frozenset(mk))

    def _set(self, name, table, names, index, succ, initial, marked):
        self.name = name
        self.table = table
        self._names = names
        self._index = index
        self._succ = succ
        self._initial = initial
        self._marked = marked

    @classmethod
    def _raw(cls, name, table, names, succ, initial, marked, index=None) -> "Automaton":
        a = cls.__new__(cls)
        if index is None:
            index = {q: i for i, q in enumerate(names)}
        a._set(name, table, names, index, succ, initial, frozenset(marked))
        return a

    @classmethod
    def empty(cls, name, table) -> "Automaton":
        return cls._raw(name, table, [], [], None, ())

    def __repr__(self):
        return f"<Automaton {self.name}: {self.n_states} states, {self.n_transitions} transitions>"

    def __len__(self):
        return len(self._names)

    @property
    def states(self) -> tuple:
        return tuple(self._names)

    @property
    def initial(self) -> Optional[str]:
        return None if self._initial is None else self._names[self._initial]

    @property
    def marked(self) -> frozenset:
        return frozenset(self._names[i] for i in self._marked)

    @property
    def alphabet(self) -> tuple:
        return self.table.ids

    @property
    def is_empty(self) -> bool:
        return not self._names

    @property
    def n_states(self) -> int:
        return len(self._names)

    @property
    def n_transitions(self) -> int:
        return sum(len(row) for row in self._succ)

    def count_transitions(self, events) -> int:
        events = set(events)
        return sum(1 for row in self._succ for e in row if e in events)

    def index(self, q) -> int:
        try:
            return self._index[q]
        except KeyError:
            raise InputError(f"{self.name}: unknown state {q!r}") from None

    def has_state(self, q) -> bool:
        return q in self._index

    def is_marked(self, q) -> bool:
        return self.index(q) in self._marked

    def successors(self, q) -> dict:
        names = self._names
        return {e: names[t] for e, t in self._succ[self.index(q)].items()}

    def transitions(self) -> Iterator[tuple]:
        """Yield ``(src, event, dst)`` in state order, then alphabet order."""
        names = self._names
        rank = self.table.rank
        for i, row in enumerate(self._succ):
            for e in sorted(row, key=rank):
                yield names[i], e, names[row[e]]

    def renamed(self, name) -> "Automaton":
        _check_token(name, "automaton")
        return Automaton._raw(name, self.table, self._names, self._succ, self._initial,
                              self._marked, self._index)


def _check_word(a: Automaton, w):
    for e in w:
        if e not in a.table:
            raise InputError(f"{a.name}: unknown event {e!r}")


def step(a: Automaton, q, w) -> Optional[str]:
    """Extended transition function; ``None`` when some step is undefined."""
    i = a.index(q)
    _check_word(a, w)
    succ = a._succ
    for e in w:
        i = succ[i].get(e)
        if i is None:
            return None
    return a._names[i]


def step_set(a: Automaton, states, w) -> frozenset:
    """Image of a set of states under ``w``; undefined branches are dropped."""
    out = set()
    for q in states:
        t = step(a, q, w)
        if t is not None:
            out.add(t)
    return frozenset(out)


def active_events(a: Automaton, q) -> frozenset:
    return frozenset(a._succ[a.index(q)])


def project_word(w, target_alphabet) -> Word:
    keep = set(target_alphabet)
    return tuple(e for e in w if e in keep)


def parallel(*automata: Automaton, name=None) -> Automaton:
    """Synchronous product of one or more automata, accessible part only.

    Shared events synchronize, private events interleave.  Composite state
    names are the component names joined with ``|``; since component names
    may themselves be composite the result is flat for nested calls.
    """
    if not automata:
        raise InputError("parallel needs at least one automaton")
    table = automata[0].table.merge(*(a.table for a in automata[1:]))
    if name is None:
        name = SEP.join(a.name for a in automata)
    _check_token(name, "automaton")
    if any(a.is_empty for a in automata):
        return Automaton.empty(name, table)

    succs = [a._succ for a in automata]
    plan = []
    for e in table.ids:
        owners = tuple(i for i, a in enumerate(automata) if e in a.table)
        plan.append((e, owners[0] if len(owners) == 1 else owners))

    init = tuple(a._initial for a in automata)
    index = {init: 0}
    order = [init]
    rows = []
    k = 0
    while k < len(order):
        t = order[k]
        k += 1
        row = {}
        for e, owners in plan:
            if owners.__class__ is int:
                n = succs[owners][t[owners]].get(e)
                if n is None:
                    continue
                nt = t[:owners] + (n,) + t[owners + 1:]
            else:
                lst = list(t)
                for i in owners:
                    n = succs[i][t[i]].get(e)
                    if n is None:
                        break
                    lst[i] = n
                else:
                    nt = tuple(lst)
                if n is None:
                    continue
            j = index.get(nt)
            if j is None:
                j = index[nt] = len(order)
                order.append(nt)
            row[e] = j
        rows.append(row)

    comp_names = [a._names for a in automata]
    names = [SEP.join(cn[x] for cn, x in zip(comp_names, t)) for t in order]
    marks = [a._marked for a in automata]
    marked = [j for j, t in enumerate(order) if all(x in m for m, x in zip(marks, t))]
    return Automaton._raw(name, table, names, rows, 0, marked)


def inverse_project(a: Automaton, target_alphabet, table: Optional[EventTable] = None) -> Automaton:
    """Lift ``a`` to a larger alphabet by self-loops on every new event.

    ``target_alphabet`` is an :class:`EventTable` or an iterable of ids; in
    the latter case classes of new events come from ``table``.
    """
    if isinstance(target_alphabet, EventTable):
        target = target_alphabet
    else:
        ids = list(target_alphabet)
        source = a.table if table is None else a.table.merge(table)
        target = source.subset(ids)
    missing = [e for e in a.alphabet if e not in target]
    if missing:
        raise InputError(f"{a.name}: target alphabet lacks {', '.join(missing)}")
    new_table = a.table.merge(target)
    extra = [e for e in new_table.ids if e not in a.table]
    if not extra:
        return a
    rows = []
    for i, row in enumerate(a._succ):
        r = dict(row)
        for e in extra:
            r[e] = i
        rows.append(r)
    return Automaton._raw(a.name, new_table, a._names, rows, a._initial, a._marked, a._index)


def _reachable(a: Automaton, allowed=None) -> list:
    """Indices reachable from the initial state, in BFS order."""
    if a._initial is None:
        return []
    seen = {a._initial}
    order = [a._initial]
    k = 0
    succ = a._succ
    while k < len(order):
        i = order[k]
        k += 1
        for e, j in succ[i].items():
            if j not in seen and (allowed is None or e in allowed):
                seen.add(j)
                order.append(j)
    return order


def _coreachable(a: Automaton, allowed=None) -> set:
    """Indices from which a marked state is reachable."""
    pred: list[list] = [[] for _ in a._names]
    for i, row in enumerate(a._succ):
        for e, j in row.items():
            if allowed is None or e in allowed:
                pred[j].append(i)
    seen = set(a._marked)
    stack = list(seen)
    while stack:
        j = stack.pop()
        for i in pred[j]:
            if i not in seen:
                seen.add(i)
                stack.append(i)
    return seen


def subautomaton(a: Automaton, keep, name=None) -> Automaton:
    """Restrict to the state indices in ``keep`` (order preserved)."""
    keep = sorted(set(keep))
    if a._initial is None or a._initial not in set(keep):
        return Automaton.empty(name or a.name, a.table)
    remap = {old: new for new, old in enumerate(keep)}
    rows = []
    for old in keep:
        rows.append({e: remap[j] for e, j in a._succ[old].items() if j in remap})
    names = [a._names[i] for i in keep]
    marked = [remap[i] for i in a._marked if i in remap]
    return Automaton._raw(name or a.name, a.table, names, rows, remap[a._initial], marked)


def accessible(a: Automaton) -> Automaton:
    reach = _reachable(a)
    if len(reach) == a.n_states:
        return a
    return subautomaton(a, reach)


def coaccessible_states(a: Automaton, allowed_events=None) -> frozenset:
    """States that reach a marked state using only ``allowed_events``.

    ``None`` means the whole alphabet.
    """
    allowed = None if allowed_events is None else set(allowed_events)
    names = a._names
    return frozenset(names[i] for i in _coreachable(a, allowed))


def trim(a: Automaton) -> Automaton:
    co = _coreachable(a)
    if a._initial is None or a._initial not in co:
        return Automaton.empty(a.name, a.table)
    b = subautomaton(a, co) if len(co) < a.n_states else a
    return accessible(b)


def remove_events(a: Automaton, events, name=None) -> Automaton:
    """Drop ``events`` from the alphabet and delete their transitions."""
    events = set(events)
    table = a.table.without(events)
    rows = [{e: j for e, j in row.items() if e not in events} for row in a._succ]
    return Automaton._raw(name or a.name, table, a._names, rows, a._initial, a._marked, a._index)


class Verdict(NamedTuple):
    ok: bool
    witness: Optional[Word] = None

    def __bool__(self):
        return self.ok


def language_equal(a: Automaton, b: Automaton, mode="generated") -> Verdict:
    """Decide ``L(a) == L(b)`` (or ``Lm``) on the accessible parts.

    On inequality the witness is a shortest word in the symmetric
    difference, least in event-table order among those.
    """
    if mode not in ("generated", "marked"):
        raise InputError(f"unknown language mode {mode!r}")
    table = a.table.merge(b.table)
    events = table.ids
    sa, sb = a._succ, b._succ
    ma, mb = a._marked, b._marked
    if mode == "marked":
        live_a, live_b = _coreachable(a), _coreachable(b)
    else:
        live_a, live_b = set(range(a.n_states)), set(range(b.n_states))

    def alive(i, live):
        return i is not None and i in live

    def differ(p, q):
        if mode == "generated":
            return (p is None) != (q is None)
        return (p is not None and p in ma) != (q is not None and q in mb)

    start = (a._initial if alive(a._initial, live_a) else None,
             b._initial if alive(b._initial, live_b) else None)
    if start == (None, None):
        return Verdict(True)
    parent = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        if differ(*pair):
            word = []
            while parent[pair] is not None:
                pair, e = parent[pair]
                word.append(e)
            return Verdict(False, tuple(reversed(word)))
        p, q = pair
        for e in events:
            np = sa[p].get(e) if p is not None else None
            nq = sb[q].get(e) if q is not None else None
            if not alive(np, live_a):
                np = None
            if not alive(nq, live_b):
                nq = None
            nxt = (np, nq)
            if nxt == (None, None) or nxt in parent:
                continue
            parent[nxt] = (pair, e)
            queue.append(nxt)
    return Verdict(True)


def format_word(w) -> str:
    return " ".join(w) if w else "ε"
