"""Synchronizing words: checks, exact search, greedy search, recovery words."""
from __future__ import annotations

import itertools
import warnings
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .automaton import Automaton, EventClass, EventTable, Word, coaccessible_states
from .errors import InputError, SearchLimitError

#: Default state-count bound for the exact subset search.
EXACT_LIMIT = 20

EXACT = "exact-subset-bfs"
GREEDY = "greedy-pairwise"
PERMUTATION = "recovery-permutation"


def _run(a: Automaton, i, w):
    succ = a._succ
    for e in w:
        i = succ[i].get(e)
        if i is None:
            return None
    return i


def is_sync_word(a: Automaton, w, target=None) -> bool:
    """True iff ``w`` is defined from every state and all runs end together.

    With ``target`` the common end state must be that state; pass
    ``a.initial`` for the check with respect to the initial state.
    """
    if a.is_empty:
        return False
    w = tuple(w)
    for e in w:
        if e not in a.table:
            raise InputError(f"{a.name}: unknown event {e!r}")
    goal = None if target is None else a.index(target)
    end = None
    for i in range(a.n_states):
        j = _run(a, i, w)
        if j is None:
            return False
        if end is None:
            end = j
        elif j != end:
            return False
    return goal is None or end == goal


def _event_maps(a: Automaton):
    """Per event: target list (-1 = undefined) and the mask of undefined states."""
    n = a.n_states
    maps = []
    for e in a.alphabet:
        tgt = [-1] * n
        undefined = 0
        for i, row in enumerate(a._succ):
            j = row.get(e)
            if j is None:
                undefined |= 1 << i
            else:
                tgt[i] = j
        maps.append((e, tgt, undefined))
    return maps


def shortest_sync_word(a: Automaton, target=None, max_states=EXACT_LIMIT) -> Optional[Word]:
    """Shortest synchronizing word by breadth-first search over state subsets.

    Only events defined on the whole current subset may be applied.  Among
    shortest words the least one in alphabet order is returned; ``None``
    when no synchronizing word exists.
    """
    n = a.n_states
    if n == 0:
        return None
    if n > max_states:
        raise SearchLimitError(
            f"{a.name}: {n} states exceeds the exact-search bound of {max_states}; use the greedy heuristic"
        )
    goal = None if target is None else 1 << a.index(target)
    maps = _event_maps(a)
    full = (1 << n) - 1

    def done(mask):
        return mask == goal if goal is not None else mask & (mask - 1) == 0

    parent = {full: None}
    queue = deque([full])
    while queue:
        mask = queue.popleft()
        if done(mask):
            word = []
            while parent[mask] is not None:
                mask, e = parent[mask]
                word.append(e)
            return tuple(reversed(word))
        for e, tgt, undefined in maps:
            if mask & undefined:
                continue
            img = 0
            m = mask
            while m:
                low = m & -m
                img |= 1 << tgt[low.bit_length() - 1]
                m ^= low
            if img not in parent:
                parent[img] = (mask, e)
                queue.append(img)
    return None


def _merge_word(a: Automaton, p, q, events):
    """Shortest word taking states ``p`` and ``q`` to a common state."""
    succ = a._succ
    start = (p, q) if p < q else (q, p)
    parent = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        x, y = pair
        for e in events:
            nx = succ[x].get(e)
            if nx is None:
                continue
            ny = succ[y].get(e)
            if ny is None:
                continue
            if nx == ny:
                word = [e]
                while parent[pair] is not None:
                    pair, pe = parent[pair]
                    word.append(pe)
                return tuple(reversed(word))
            nxt = (nx, ny) if nx < ny else (ny, nx)
            if nxt not in parent:
                parent[nxt] = (pair, e)
                queue.append(nxt)
    return None


def _image(a: Automaton, states, w):
    out = set()
    for i in states:
        j = _run(a, i, w)
        if j is None:
            return None
        out.add(j)
    return out


def greedy_sync_word(a: Automaton, target=None, pair_limit=64) -> Optional[Word]:
    """Synchronizing word by repeated pair merging (not necessarily shortest).

    Each round first looks for a single event, defined on the whole current
    set, that merges two of its states; otherwise it searches the pair
    automaton for a merging word.  When the current set has at most
    ``pair_limit`` states every pair is tried and the shortest usable word
    wins, above that the first usable pair in state order is taken.
    """
    if a.is_empty:
        return None
    events = a.alphabet
    succ = a._succ
    current = set(range(a.n_states))
    word: list = []
    while len(current) > 1:
        chosen = None
        for e in events:
            img = set()
            for i in current:
                j = succ[i].get(e)
                if j is None:
                    img = None
                    break
                img.add(j)
            if img is not None and len(img) < len(current):
                chosen, nxt = (e,), img
                break
        if chosen is None:
            ordered = sorted(current)
            best = None
            for p, q in itertools.combinations(ordered, 2):
                u = _merge_word(a, p, q, events)
                if u is None or (best is not None and len(u) >= len(best[0])):
                    continue
                img = _image(a, current, u)
                if img is None:
                    continue
                best = (u, img)
                if len(ordered) > pair_limit:
                    break
            if best is None:
                return None
            chosen, nxt = best
        word.extend(chosen)
        current = nxt
    if target is not None:
        (end,) = current
        path = _path(a, end, a.index(target))
        if path is None:
            return None
        word.extend(path)
    return tuple(word)


def _path(a: Automaton, src, dst):
    if src == dst:
        return ()
    parent = {src: None}
    queue = deque([src])
    while queue:
        i = queue.popleft()
        for e, j in a._succ[i].items():
            if j in parent:
                continue
            parent[j] = (i, e)
            if j == dst:
                word = []
                while parent[j] is not None:
                    j, pe = parent[j]
                    word.append(pe)
                return tuple(reversed(word))
            queue.append(j)
    return None


def recovery_permutations(table: EventTable, restrict_to) -> list:
    """Every ordering of the given recovery events, in lexicographic table order."""
    ids = set(restrict_to)
    for e in ids:
        if table.kind(e) is not EventClass.RECOVERY:
            raise InputError(f"{e!r} is not a recovery event")
    ordered = table.sort(ids)
    return [tuple(p) for p in itertools.permutations(ordered)]


@dataclass(frozen=True)
class SyncAnalysis:
    synchronizing: bool
    wrt_initial: bool
    shortest_word: Optional[Word]
    method: str
    target: Optional[str] = None

    @property
    def minimal(self) -> bool:
        return self.method == EXACT


def analyze(a: Automaton, max_states=EXACT_LIMIT) -> SyncAnalysis:
    """Classify ``a``; the reported word synchronizes to the initial state when possible."""
    if a.is_empty:
        return SyncAnalysis(False, False, None, EXACT)
    if a.n_states <= max_states:
        w0 = shortest_sync_word(a, a.initial, max_states)
        if w0 is not None:
            return SyncAnalysis(True, True, w0, EXACT, a.initial)
        w = shortest_sync_word(a, None, max_states)
        if w is None:
            return SyncAnalysis(False, False, None, EXACT)
        end = _run(a, 0, w)
        return SyncAnalysis(True, False, w, EXACT, a._names[end])
    w = greedy_sync_word(a)
    if w is None:
        return SyncAnalysis(False, False, None, GREEDY)
    end = a._names[_run(a, 0, w)]
    if end != a.initial:
        w0 = greedy_sync_word(a, a.initial)
        if w0 is not None:
            return SyncAnalysis(True, True, w0, GREEDY, a.initial)
        return SyncAnalysis(True, False, w, GREEDY, end)
    return SyncAnalysis(True, True, w, GREEDY, end)


def recovery_sync_word(a: Automaton, max_states=EXACT_LIMIT):
    """A word resetting ``a`` to its initial state, and how it was found.

    Exact search within ``max_states``; above that the recovery-event
    permutations are tried in order, then the greedy heuristic.  Every
    returned word has been checked with :func:`is_sync_word`.
    """
    if a.is_empty:
        return None, None
    if a.n_states <= max_states:
        w = shortest_sync_word(a, a.initial, max_states)
        return (w, EXACT) if w is not None else (None, None)
    rec = [e for e in a.alphabet if a.table.kind(e) is EventClass.RECOVERY]
    if rec and len(rec) <= 8:
        for w in recovery_permutations(a.table, rec):
            if is_sync_word(a, w, a.initial):
                return w, PERMUTATION
    w = greedy_sync_word(a, a.initial)
    if w is not None and is_sync_word(a, w, a.initial):
        return w, GREEDY
    return None, None


def reset_word(a: Automaton) -> Optional[Word]:
    """A word made of every recovery event of ``a`` once, synchronizing to the initial state.

    Unlike the shortest word this one resets every component, so replaying
    it on the real system also resets the plants behind ``a``.  Permutations
    are tried in table order (only the first when there are more than 8).
    """
    if a.is_empty:
        return None
    rec = [e for e in a.alphabet if a.table.kind(e) is EventClass.RECOVERY]
    if not rec:
        return None
    perms = recovery_permutations(a.table, rec) if len(rec) <= 8 else [tuple(a.table.sort(rec))]
    for w in perms:
        if is_sync_word(a, w, a.initial):
            return w
    return None


class Prop1Verdict(NamedTuple):
    ok: bool
    clause: Optional[str] = None
    prefix: Optional[Word] = None
    sync: Optional[Word] = None
    suffix: Optional[Word] = None
    reason: Optional[str] = None

    def __bool__(self):
        return self.ok


def _words(a: Automaton, max_len):
    """All ``(word, state_index)`` with ``word`` in L(a), ``len(word) <= max_len``."""
    out = [((), a._initial)]
    frontier = out[:]
    for _ in range(max_len):
        nxt = []
        for w, i in frontier:
            for e in a.alphabet:
                j = a._succ[i].get(e)
                if j is not None:
                    nxt.append((w + (e,), j))
        out.extend(nxt)
        frontier = nxt
    return out


def check_prop1(a: Automaton, max_len=4, clauses="abc", sync=None) -> Prop1Verdict:
    """Brute-force check of the three language inclusions of a synchronizing DFA.

    (a) L·I·L ⊆ L, (b) L·I·Lm ⊆ Lm, (c) Lm·I·Lm ⊆ Lm, tested for every
    pair of words ``s``, ``t`` with ``len(s) + len(t) <= max_len`` and one
    synchronizing word ``w`` (by default the one from :func:`recovery_sync_word`).
    Every pair is covered; pairs whose prefix ``s·w`` ends in the same
    state share one scan over ``t``.
    """
    if a.is_empty:
        return Prop1Verdict(False, reason="not synchronizing")
    if sync is None:
        sync, _ = recovery_sync_word(a)
    if sync is None or not is_sync_word(a, sync, a.initial):
        return Prop1Verdict(False, reason="not synchronizing")
    words = _words(a, max_len)
    marked = a._marked
    gen = words
    mk = [(w, i) for w, i in words if i in marked]
    plans = {"a": (gen, gen, False), "b": (gen, mk, True), "c": (mk, mk, True)}
    for clause in clauses:
        left, right, need_mark = plans[clause]
        # The verdict for s.w.t depends only on the state after s.w, so the
        # scan over t is shared between prefixes ending in the same state.
        first_bad: dict = {}
        for s, i in left:
            budget = max_len - len(s)
            q = _run(a, i, sync)
            key = (q, budget)
            if key not in first_bad:
                bad = None
                for t, _ in right:
                    if len(t) > budget:
                        continue
                    end = None if q is None else _run(a, q, t)
                    if end is None or (need_mark and end not in marked):
                        bad = t
                        break
                first_bad[key] = bad
            if first_bad[key] is not None:
                return Prop1Verdict(False, clause, s, sync, first_bad[key])
    return Prop1Verdict(True, sync=sync)


def check_sync_coaccessible(a: Automaton) -> Optional[bool]:
    """Accessible and synchronizing w.r.t. the initial state implies coaccessible.

    Returns whether every state is coaccessible, or ``None`` (with a warning)
    when ``a`` has no marked states and the check is vacuous.
    """
    if not a._marked:
        warnings.warn(f"{a.name}: no marked states, coaccessibility check skipped", stacklevel=2)
        return None
    return len(coaccessible_states(a)) == a.n_states
