"""Monolithic and local modular supervisor synthesis with recovery events.

Recovery events are treated as uncontrollable when pruning for
controllability and are ignored when testing for blocking.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .automaton import (
    Automaton,
    EventClass,
    EventTable,
    Verdict,
    Word,
    _reachable,
    language_equal,
    parallel,
    remove_events,
    subautomaton,
    trim,
)
from .errors import InputError
from .sync import EXACT_LIMIT, recovery_sync_word

UNCONTROLLABLE_EXIT = "uncontrollable-exit"
BLOCKING = "blocking"

#: Blocking rules for :func:`supc`.
STRICT = "strict"
WITH_RECOVERY = "with-recovery"

MONOLITHIC = "monolithic"
MODULAR = "modular"


def _table_of(*automata) -> EventTable:
    return automata[0].table.merge(*(a.table for a in automata[1:]))


def _forced(table: EventTable) -> frozenset:
    return frozenset(table.of_kind(EventClass.UNCONTROLLABLE, EventClass.RECOVERY))


def build_target(plants, specs, name=None) -> Automaton:
    """Accessible composition of all plants followed by all specifications."""
    automata = list(plants) + list(specs)
    if not automata:
        raise InputError("nothing to compose")
    return parallel(*automata, name=name)


def local_plants(plants, specs) -> dict:
    """For each specification, the composition of the plants it shares events with.

    Recovery events do not count as shared.
    """
    plants = list(plants)
    out = {}
    for spec in specs:
        own = {e for e in spec.alphabet if spec.table.kind(e) is not EventClass.RECOVERY}
        chosen = [
            p for p in plants
            if own & {e for e in p.alphabet if p.table.kind(e) is not EventClass.RECOVERY}
        ]
        if not chosen:
            raise InputError(f"specification {spec.name} shares no events with any plant")
        out[spec.name] = parallel(*chosen, name="G_" + spec.name) if len(chosen) > 1 else chosen[0]
    return out


def _plant_map(target: Automaton, plant: Automaton):
    """Plant state index for every reachable target state, or None if not a function."""
    tp = [None] * target.n_states
    if target._initial is None:
        return tp
    tp[target._initial] = plant._initial
    ptab = plant.table
    psucc = plant._succ
    queue = deque([target._initial])
    while queue:
        i = queue.popleft()
        g = tp[i]
        for e, j in target._succ[i].items():
            if e in ptab:
                ng = psucc[g].get(e)
                if ng is None:
                    raise InputError(
                        f"{target.name}: event {e!r} at {target._names[i]!r} is impossible in plant {plant.name}"
                    )
            else:
                ng = g
            if tp[j] is None:
                tp[j] = ng
                queue.append(j)
            elif tp[j] != ng:
                return None
    return tp


def supc(target: Automaton, plant: Automaton, table: Optional[EventTable] = None, log=None,
         blocking=STRICT) -> Automaton:
    """Supremal controllable, nonblocking sub-automaton of ``target`` w.r.t. ``plant``.

    A state is bad when an uncontrollable or recovery event possible in the
    plant is missing from it, or when it is reachable but cannot reach a
    marked state without recovery events.  Bad states are removed until a
    fixpoint; the result is empty if the initial state goes.  If ``log`` is
    a list, ``(state, reason)`` pairs are appended to it in removal order.

    ``blocking=WITH_RECOVERY`` lets recovery transitions count when testing
    whether a marked state is still reachable.  Supervisors built that way
    can violate nonblocking-without-recovery; the mode exists to reproduce
    reference figures computed under that rule.
    """
    if blocking not in (STRICT, WITH_RECOVERY):
        raise InputError(f"unknown blocking rule {blocking!r}")
    if table is None:
        table = _table_of(target, plant)
    if target.is_empty:
        return target
    tp = _plant_map(target, plant)
    if tp is None:
        target = parallel(target, plant, name=target.name)
        tp = _plant_map(target, plant)
    forced = _forced(table)
    recovery = table.recovery if blocking == STRICT else frozenset()
    ptab = plant.table
    psucc = plant._succ
    succ = target._succ
    n = target.n_states

    forced_here = [e for e in table.ids if e in forced]
    pred_forced: list[list] = [[] for _ in range(n)]
    for i, row in enumerate(succ):
        for e, j in row.items():
            if e in forced:
                pred_forced[j].append(i)

    removed = bytearray(n)
    logbook = [] if log is None else log
    names = target._names

    def remove(seeds, reason):
        stack = [(j, reason) for j in seeds]
        while stack:
            j, why = stack.pop()
            if removed[j]:
                continue
            removed[j] = 1
            logbook.append((names[j], why))
            for i in pred_forced[j]:
                if not removed[i]:
                    stack.append((i, UNCONTROLLABLE_EXIT))

    seeds = []
    for i in _reachable(target):
        g = tp[i]
        row = succ[i]
        for e in forced_here:
            if e in row:
                continue
            if e not in ptab or e in psucc[g]:
                seeds.append(i)
                break
    remove(seeds, UNCONTROLLABLE_EXIT)

    while True:
        if removed[target._initial]:
            return Automaton.empty(target.name, target.table)
        reach = [target._initial]
        seen = {target._initial}
        k = 0
        while k < len(reach):
            i = reach[k]
            k += 1
            for j in succ[i].values():
                if not removed[j] and j not in seen:
                    seen.add(j)
                    reach.append(j)
        pred: dict = {i: [] for i in reach}
        for i in reach:
            for e, j in succ[i].items():
                if e not in recovery and j in seen:
                    pred[j].append(i)
        co = {i for i in reach if i in target._marked}
        stack = list(co)
        while stack:
            j = stack.pop()
            for i in pred[j]:
                if i not in co:
                    co.add(i)
                    stack.append(i)
        stuck = [i for i in reach if i not in co]
        if not stuck:
            return subautomaton(target, reach)
        remove(stuck, BLOCKING)


@dataclass
class Supervisor:
    name: str
    automaton: Automaton
    plant: Automaton
    specs: tuple
    bad_states: list = field(default_factory=list)
    sync_word: Optional[Word] = None
    sync_method: Optional[str] = None

    @property
    def is_empty(self) -> bool:
        return self.automaton.is_empty

    def stats(self) -> "SupervisorStats":
        a = self.automaton
        return SupervisorStats(
            name=self.name,
            states=a.n_states,
            transitions=a.n_transitions,
            recovery_transitions=a.count_transitions(a.table.recovery),
            sync_word=self.sync_word,
        )


@dataclass(frozen=True)
class SupervisorStats:
    name: str
    states: int
    transitions: int
    recovery_transitions: int
    sync_word: Optional[Word]

    @property
    def sync_word_length(self) -> Optional[int]:
        return None if self.sync_word is None else len(self.sync_word)

    def row(self) -> str:
        w = "-" if self.sync_word is None else " ".join(self.sync_word)
        n = "-" if self.sync_word is None else str(len(self.sync_word))
        return f"{self.name}\t{self.states}\t{self.transitions}\t{self.recovery_transitions}\t{n}\t{w}"


STATS_HEADER = "name\tstates\ttransitions\trecovery-transitions\tsync-word-length\tsync-word"


@dataclass
class SynthesisResult:
    mode: str
    supervisors: list
    nonconflict: Optional[Verdict] = None

    @property
    def empty(self) -> list:
        return [s.name for s in self.supervisors if s.is_empty]

    @property
    def bad_state_log(self) -> list:
        return [(s.name, q, why) for s in self.supervisors for q, why in s.bad_states]

    def stats(self) -> list:
        return [s.stats() for s in self.supervisors]

    def stats_tsv(self) -> str:
        return "".join(line + "\n" for line in [STATS_HEADER] + [st.row() for st in self.stats()])


def _synthesize_one(name, plant, specs, max_states, sync=True, blocking=STRICT) -> Supervisor:
    target = build_target([plant], specs, name=name)
    log: list = []
    s = supc(target, plant, log=log, blocking=blocking)
    s = s.renamed(name)
    word = method = None
    if sync and not s.is_empty:
        word, method = recovery_sync_word(s, max_states)
    return Supervisor(name, s, plant, tuple(e.name for e in specs), log, word, method)


def synthesize_monolithic(plants, specs, name="S", max_states=EXACT_LIMIT, sync=True,
                          blocking=STRICT) -> SynthesisResult:
    plants = list(plants)
    plant = parallel(*plants, name="G") if len(plants) > 1 else plants[0]
    sup = _synthesize_one(name, plant, list(specs), max_states, sync, blocking)
    return SynthesisResult(MONOLITHIC, [sup])


def merge_specs(specs, groups) -> list:
    """Replace each group of specification names by their composition.

    The merged automaton takes the place of the group's first member and is
    named by joining the member names with ``|``.
    """
    by_name = {s.name: s for s in specs}
    merged_into = {}
    for group in groups:
        group = list(group)
        missing = [g for g in group if g not in by_name]
        if missing:
            raise InputError(f"unknown specifications in merge group: {', '.join(missing)}")
        for g in group:
            if g in merged_into:
                raise InputError(f"specification {g} appears in two merge groups")
            merged_into[g] = group
    out = []
    for s in specs:
        group = merged_into.get(s.name)
        if group is None:
            out.append(s)
        elif group[0] == s.name:
            out.append(parallel(*(by_name[g] for g in group)))
    return out


def synthesize_modular(plants, specs, names=None, max_states=EXACT_LIMIT, sync=True,
                       check=True, blocking=STRICT) -> SynthesisResult:
    """One supervisor per specification over its local plant.

    ``names`` optionally gives the supervisor names in specification order
    (default ``S_<spec>``).  Empty supervisors are kept in the result.
    """
    specs = list(specs)
    if names is None:
        names = ["S_" + s.name for s in specs]
    names = list(names)
    if len(names) != len(specs):
        raise InputError("one supervisor name per specification is required")
    if len(set(names)) != len(names):
        raise InputError("supervisor names must be unique")
    locals_ = local_plants(plants, specs)
    sups = [
        _synthesize_one(n, locals_[spec.name], [spec], max_states, sync, blocking)
        for n, spec in zip(names, specs)
    ]
    result = SynthesisResult(MODULAR, sups)
    live = [s.automaton for s in sups if not s.is_empty]
    if check and live:
        result.nonconflict = check_nonconflict(live)
    return result


def check_nonconflict(supervisors, table: Optional[EventTable] = None, trim_each=True) -> Verdict:
    """Nonconflict test ignoring recovery events.

    Left side: each supervisor with its recovery transitions deleted and
    then trimmed, composed.  Right side: the composition with recovery
    transitions deleted, trimmed.  The generated languages must agree; the
    witness is a shortest word in the difference.  ``trim_each=False``
    skips the per-supervisor trim on the left.
    """
    supervisors = list(supervisors)
    if not supervisors:
        return Verdict(True)
    if table is None:
        table = _table_of(*supervisors)
    recovery = table.recovery
    stripped = [remove_events(s, recovery) for s in supervisors]
    left_parts = [trim(s) for s in stripped] if trim_each else stripped
    left = parallel(*left_parts, name="left")
    # Deleting recovery transitions before composing gives the same accessible part.
    right = trim(parallel(*stripped, name="right"))
    return language_equal(left, right, "generated")


def audit_controllable(sup: Automaton, plant: Automaton, table: Optional[EventTable] = None) -> list:
    """Violations of controllability: ``(sup_state, plant_state, event)`` triples."""
    if sup.is_empty:
        return []
    if table is None:
        table = _table_of(sup, plant)
    forced = [e for e in table.ids if e in _forced(table)]
    start = (sup._initial, plant._initial)
    seen = {start}
    queue = deque([start])
    bad = []
    while queue:
        s, g = queue.popleft()
        srow = sup._succ[s]
        grow = plant._succ[g]
        for e in forced:
            if (e not in plant.table or e in grow) and e not in srow:
                bad.append((sup._names[s], plant._names[g], e))
        for e, ns in srow.items():
            if e in plant.table:
                ng = grow.get(e)
                if ng is None:
                    bad.append((sup._names[s], plant._names[g], e))
                    continue
            else:
                ng = g
            if (ns, ng) not in seen:
                seen.add((ns, ng))
                queue.append((ns, ng))
    return bad


def audit_nonblocking(sup: Automaton) -> list:
    """States reachable without recovery events that cannot reach a marked state without them."""
    if sup.is_empty:
        return []
    recovery = sup.table.recovery
    allowed = [e for e in sup.alphabet if e not in recovery]
    reach = _reachable(sup, set(allowed))
    stripped = remove_events(sup, recovery)
    co = set()
    pred: list[list] = [[] for _ in range(sup.n_states)]
    for i, row in enumerate(stripped._succ):
        for j in row.values():
            pred[j].append(i)
    stack = list(sup._marked)
    co.update(stack)
    while stack:
        j = stack.pop()
        for i in pred[j]:
            if i not in co:
                co.add(i)
                stack.append(i)
    return [sup._names[i] for i in reach if i not in co]
