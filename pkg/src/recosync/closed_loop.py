"""Scripted closed-loop simulation with hidden observations and recovery.

Plants hold the ground truth.  Each supervisor keeps its own estimate and
advances only on events it observes; hiding an event from a supervisor
leaves its estimate behind the plant.  Recovery replays a synchronizing
word as real events, which every owner observes.
"""
from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .automaton import Automaton, EventClass, Word
from .errors import (
    ConfigurationError,
    ControlViolation,
    InputError,
    ParseError,
    PhysicalImpossibility,
)
from .sync import reset_word

SCN_GRAMMAR = """\
exec <event> [hide <sup>,...|all]   # execute; hidden supervisors do not observe it
recover <sup>|all                   # replay the supervisor's recovery word
assert-plant <plant>[,<plant>...] <state>[|<state>...]
assert-sup <sup> <state>
assert-enabled <event> true|false
assert-deadlock [<sup>]             # no non-recovery event enabled (in <sup>'s alphabet)
"""


@dataclass(frozen=True)
class Model:
    """Plants and supervisors under simulation, plus their recovery words."""

    plants: tuple
    supervisors: tuple
    sync_words: dict = field(default_factory=dict)
    global_word: Optional[Word] = None

    def __post_init__(self):
        names = [a.name for a in self.plants + self.supervisors]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise InputError(f"duplicate model names: {', '.join(dupes)}")
        kinds = {}
        for a in self.plants + self.supervisors:
            for ev in a.table:
                if kinds.setdefault(ev.id, ev.kind) is not ev.kind:
                    raise InputError(f"event {ev.id!r} has conflicting classes")
            if a.is_empty:
                raise InputError(f"{a.name} is empty")
        object.__setattr__(self, "_kinds", kinds)
        object.__setattr__(self, "_plants", {a.name: a for a in self.plants})
        object.__setattr__(self, "_sups", {a.name: a for a in self.supervisors})

    @classmethod
    def build(cls, plants, supervisors, sync_words=None) -> "Model":
        """Model whose missing recovery words default to :func:`reset_word`."""
        words = dict(sync_words or {})
        for s in supervisors:
            if words.get(s.name) is None:
                w = reset_word(s)
                if w is not None:
                    words[s.name] = w
        return cls(tuple(plants), tuple(supervisors), words)

    def kind(self, e) -> EventClass:
        try:
            return self._kinds[e]
        except KeyError:
            raise InputError(f"unknown event {e!r}") from None

    @property
    def events(self) -> list:
        return list(self._kinds)

    def plant(self, name) -> Automaton:
        try:
            return self._plants[name]
        except KeyError:
            raise InputError(f"unknown plant {name!r}") from None

    def supervisor(self, name) -> Automaton:
        try:
            return self._sups[name]
        except KeyError:
            raise InputError(f"unknown supervisor {name!r}") from None

    def recovery_word(self, scope) -> Word:
        if scope == "all":
            if self.global_word is not None:
                return tuple(self.global_word)
            # Every recovery event once: each component ends at its initial state.
            return tuple(e for e, k in self._kinds.items() if k is EventClass.RECOVERY)
        self.supervisor(scope)
        w = self.sync_words.get(scope)
        if w is None:
            raise ConfigurationError(f"supervisor {scope} has no synchronizing word")
        return tuple(w)


@dataclass(frozen=True)
class ClosedLoopState:
    plant_states: dict
    supervisor_states: dict
    history: Word = ()
    hidden: tuple = ()  # (event, frozenset of supervisors that missed it)
    notes: tuple = ()


def initial_state(model: Model) -> ClosedLoopState:
    return ClosedLoopState(
        {p.name: p.initial for p in model.plants},
        {s.name: s.initial for s in model.supervisors},
    )


def _hidden_set(model: Model, hidden_from) -> frozenset:
    if hidden_from in (None, (), frozenset()):
        return frozenset()
    if hidden_from == "all" or (not isinstance(hidden_from, str) and "all" in hidden_from):
        return frozenset(s.name for s in model.supervisors)
    if isinstance(hidden_from, str):
        hidden_from = [hidden_from]
    for n in hidden_from:
        model.supervisor(n)
    return frozenset(hidden_from)


def exec_event(model: Model, s: ClosedLoopState, e, hidden_from=()) -> ClosedLoopState:
    """Execute ``e`` in the plants; supervisors not in ``hidden_from`` observe it."""
    kind = model.kind(e)
    hidden = _hidden_set(model, hidden_from)
    if hidden and kind is EventClass.RECOVERY:
        raise InputError(f"recovery event {e!r} cannot be hidden")
    plants = dict(s.plant_states)
    for p in model.plants:
        if e in p.table:
            nxt = p.successors(plants[p.name]).get(e)
            if nxt is None:
                raise PhysicalImpossibility(f"{e} is not possible in {p.name} at {plants[p.name]}")
            plants[p.name] = nxt
    sups = dict(s.supervisor_states)
    notes = list(s.notes)
    for sup in model.supervisors:
        if e not in sup.table or sup.name in hidden:
            continue
        nxt = sup.successors(sups[sup.name]).get(e)
        if nxt is None:
            if kind is EventClass.CONTROLLABLE:
                raise ControlViolation(f"{e} is disabled by {sup.name} at {sups[sup.name]}")
            notes.append(f"{sup.name} has no {e} at {sups[sup.name]}; estimate kept")
            continue
        sups[sup.name] = nxt
    hid = s.hidden + ((e, hidden),) if hidden else s.hidden
    return ClosedLoopState(plants, sups, s.history + (e,), hid, tuple(notes))


def enabled_now(model: Model, s: ClosedLoopState) -> list:
    """Events enabled by the plants and, if controllable, by every owning supervisor's estimate."""
    out = []
    for e in model.events:
        if not all(e in p.successors(s.plant_states[p.name]) for p in model.plants if e in p.table):
            continue
        if model.kind(e) is EventClass.CONTROLLABLE and not all(
            e in sup.successors(s.supervisor_states[sup.name])
            for sup in model.supervisors
            if e in sup.table
        ):
            continue
        out.append(e)
    return out


def recover(model: Model, s: ClosedLoopState, scope) -> tuple:
    """Replay the recovery word for ``scope``; returns ``(state, word)``."""
    w = model.recovery_word(scope)
    for e in w:
        s = exec_event(model, s, e)
    return s, w


# -- scenarios ---------------------------------------------------------------

@dataclass(frozen=True)
class Directive:
    line: int
    op: str
    args: tuple
    hide: tuple = ()

    def text(self) -> str:
        out = " ".join((self.op,) + self.args)
        if self.hide:
            out += " hide " + ",".join(self.hide)
        return out


_ARITY = {
    "exec": (1, 1),
    "recover": (1, 1),
    "assert-plant": (2, 2),
    "assert-sup": (2, 2),
    "assert-enabled": (2, 2),
    "assert-deadlock": (0, 1),
}


def parse_scenario(text: str, path=None) -> list:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        toks = shlex.split(raw, comments=True)
        if not toks:
            continue
        op, args = toks[0], toks[1:]
        hide = ()
        if op == "exec" and len(args) == 3 and args[1] == "hide":
            hide = tuple(x for x in args[2].split(",") if x)
            if not hide:
                raise ParseError("empty hide list", path, no)
            args = args[:1]
        if op not in _ARITY:
            raise ParseError(f"unknown directive {op!r}", path, no)
        lo, hi = _ARITY[op]
        if not lo <= len(args) <= hi:
            raise ParseError(f"wrong number of arguments for {op}", path, no)
        if op == "assert-enabled" and args[1] not in ("true", "false"):
            raise ParseError("expected true or false", path, no)
        out.append(Directive(no, op, tuple(args), hide))
    return out


def read_scenario(path) -> list:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), path)


def _resolve(model: Model, d: Directive, path=None):
    """Check names in ``d`` against the model; raise ParseError with the line."""
    try:
        if d.op == "exec":
            model.kind(d.args[0])
            if d.hide:
                _hidden_set(model, d.hide)
                if model.kind(d.args[0]) is EventClass.RECOVERY:
                    raise InputError(f"recovery event {d.args[0]!r} cannot be hidden")
        elif d.op == "recover":
            if d.args[0] != "all":
                model.supervisor(d.args[0])
        elif d.op == "assert-plant":
            names = d.args[0].split(",")
            for n in names:
                model.plant(n)
            if len(d.args[1].split("|")) != len(names):
                raise InputError("state tuple does not match plant list")
        elif d.op == "assert-sup":
            model.supervisor(d.args[0])
        elif d.op == "assert-enabled":
            model.kind(d.args[0])
        elif d.op == "assert-deadlock" and d.args:
            model.supervisor(d.args[0])
    except InputError as exc:
        raise ParseError(str(exc), path, d.line) from None


def _deadlocked(model: Model, s: ClosedLoopState, sup=None) -> bool:
    scope = None if sup is None else model.supervisor(sup).table
    for e in enabled_now(model, s):
        if model.kind(e) is EventClass.RECOVERY:
            continue
        if scope is None or e in scope:
            return False
    return True


@dataclass
class ScenarioResult:
    transcript: str
    assertions: list  # (line, text, passed)
    state: ClosedLoopState

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.assertions)


def _snapshot(model: Model, s: ClosedLoopState) -> list:
    plants = " ".join(f"{n}={q}" for n, q in s.plant_states.items())
    sups = " ".join(f"{n}={q}" for n, q in s.supervisor_states.items())
    return [f"  plants: {plants}", f"  supervisors: {sups}", f"  enabled: {' '.join(enabled_now(model, s))}"]


def run_scenario(directives, model: Model, path=None) -> ScenarioResult:
    """Run every directive in order; assertion failures are recorded, not raised."""
    directives = list(directives)
    for d in directives:
        _resolve(model, d, path)
    s = initial_state(model)
    lines: list = []
    results = []
    for k, d in enumerate(directives, 1):
        head = f"[{k}] line {d.line}: {d.text()}"
        noted = len(s.notes)
        if d.op == "exec":
            s = exec_event(model, s, d.args[0], d.hide)
            lines.append(head)
        elif d.op == "recover":
            s, w = recover(model, s, d.args[0])
            lines.append(f"{head}  word: {' '.join(w)}")
        else:
            if d.op == "assert-plant":
                names = d.args[0].split(",")
                got = "|".join(s.plant_states[n] for n in names)
                ok = got == d.args[1]
            elif d.op == "assert-sup":
                got = s.supervisor_states[d.args[0]]
                ok = got == d.args[1]
            elif d.op == "assert-enabled":
                got = str(d.args[0] in enabled_now(model, s)).lower()
                ok = got == d.args[1]
            else:
                ok = _deadlocked(model, s, d.args[0] if d.args else None)
                got = "deadlock" if ok else "live"
            results.append((d.line, d.text(), ok))
            lines.append(f"{head}  -> {'PASS' if ok else 'FAIL'} (got {got})")
            continue
        lines.extend(f"  note: {n}" for n in s.notes[noted:])
        lines.extend(_snapshot(model, s))
    transcript = "".join(line + "\n" for line in lines)
    return ScenarioResult(transcript, results, s)
