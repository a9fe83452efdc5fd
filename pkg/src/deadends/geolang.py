"""Regular languages of geodesics and the pumping bound on dead-end depth.

A deterministic automaton whose language is a set of geodesic words hitting
every group element caps dead-end depth at twice its state count: any long
geodesic can be pumped into a strictly longer one that stays 2n-close to
the original endpoint.  This module holds the automaton plumbing, the
pumping step, and the verifier that certifies soundness and completeness
of a candidate language against a breadth-first ball.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from .core import (
    DeadendError,
    GenAlphabet,
    Letter,
    MarkedGroup,
    UnknownLetter,
    Word,
)
from .search import BallIndex, ClaimViolation, depth


class TooShort(DeadendError):
    """Word shorter than the state count cannot contain a pumpable loop."""


class SoundnessUnverified(DeadendError):
    """Operation requires a DFA that passed verification on this ball."""


@dataclass(frozen=True)
class Dfa:
    """Deterministic partial automaton over a generating alphabet.

    Missing transitions reject.  Transitions are stored as a mapping
    (state, letter) -> state and never mutated after construction.
    """

    n_states: int
    start: int
    accept: frozenset[int]
    trans: dict[tuple[int, Letter], int]
    alphabet: GenAlphabet

    def __post_init__(self):
        if not (0 <= self.start < self.n_states):
            raise DeadendError("start state %d out of range" % self.start)
        for s in self.accept:
            if not (0 <= s < self.n_states):
                raise DeadendError("accept state %d out of range" % s)
        for (s, lt), s2 in self.trans.items():
            self.alphabet.check(lt)
            if not (0 <= s < self.n_states and 0 <= s2 < self.n_states):
                raise DeadendError("transition %r -> %r out of range" % ((s, lt), s2))

    def step(self, state: int, letter: Letter) -> Optional[int]:
        return self.trans.get((state, letter))

    def to_json_obj(self) -> dict:
        return {
            "states": self.n_states,
            "start": self.start,
            "accept": sorted(self.accept),
            "trans": [
                {"from": s, "letter": self.alphabet.token(lt), "to": s2}
                for (s, lt), s2 in sorted(
                    self.trans.items(), key=lambda kv: (kv[0][0], kv[0][1])
                )
            ],
        }

    @classmethod
    def from_json_obj(cls, obj: dict, alphabet: GenAlphabet) -> "Dfa":
        trans: dict[tuple[int, Letter], int] = {}
        for row in obj["trans"]:
            key = (int(row["from"]), alphabet.letter(row["letter"]))
            if key in trans:
                raise DeadendError("duplicate transition for %r" % (key,))
            trans[key] = int(row["to"])
        return cls(
            n_states=int(obj["states"]),
            start=int(obj["start"]),
            accept=frozenset(int(s) for s in obj["accept"]),
            trans=trans,
            alphabet=alphabet,
        )


def dfa_run(dfa: Dfa, w: Word) -> tuple[Optional[int], tuple[int, ...]]:
    """Final state (None on reject) and the state trace up to the rejection."""
    state = dfa.start
    trace = [state]
    for lt in w.letters:
        nxt = dfa.step(state, lt)
        if nxt is None:
            return (None, tuple(trace))
        state = nxt
        trace.append(state)
    return (state, tuple(trace))


def dfa_accepts(dfa: Dfa, w: Word) -> bool:
    final, _ = dfa_run(dfa, w)
    return final is not None and final in dfa.accept


def pump_decompose(dfa: Dfa, w: Word) -> tuple[Word, Word, Word]:
    """Split an accepted w = abc with |bc| <= n, |b| > 0, and abbc accepted.

    Scans the last n+1 trace states for a repeat; picks the latest repeated
    pair (maximal loop start, then minimal loop end) so the output is
    reproducible when several states recur.
    """
    n = dfa.n_states
    if len(w) < n:
        raise TooShort("need |w| >= %d states to force a repeat, got %d" % (n, len(w)))
    final, trace = dfa_run(dfa, w)
    if final is None or final not in dfa.accept:
        raise DeadendError("pump_decompose requires an accepted word")
    lo = len(w) - n  # trace indices lo..len(w) are the last n+1 states
    best: Optional[tuple[int, int]] = None
    for i in range(len(w), lo - 1, -1):
        for j in range(i - 1, lo - 1, -1):
            if trace[i] == trace[j]:
                cand = (j, i)
                if best is None or cand > best:
                    best = cand
    if best is None:  # pragma: no cover - pigeonhole guarantees a repeat
        raise DeadendError("no repeated state among the last %d entries" % (n + 1))
    p, q = best
    a = Word(w.letters[:p])
    b = Word(w.letters[p:q])
    c = Word(w.letters[q:])
    if not dfa_accepts(dfa, a + b + b + c):  # pragma: no cover - loop invariant
        raise ClaimViolation("pumped word rejected despite state repeat")
    return (a, b, c)


@dataclass(frozen=True)
class VerifyReport:
    """Outcome of checking a DFA's language against a ball.

    sound: every accepted word of length <= radius is geodesic.
    complete: every ball element is some accepted word's evaluation at its
    exact distance.  The first failing word (soundness) or unreachable
    element rendering (completeness) is carried for diagnosis.
    """

    sound: bool
    complete: bool
    radius: int
    words_checked: int
    elements_covered: int
    counterexample_word: Optional[Word]
    counterexample_element: Optional[str]
    dfa: Dfa

    @property
    def ok(self) -> bool:
        return self.sound and self.complete


def _co_accessible(dfa: Dfa) -> set[int]:
    """States from which some accept state is reachable."""
    rev: dict[int, set[int]] = {}
    for (s, _lt), s2 in dfa.trans.items():
        rev.setdefault(s2, set()).add(s)
    alive = set(dfa.accept)
    frontier = deque(alive)
    while frontier:
        s = frontier.popleft()
        for p in rev.get(s, ()):
            if p not in alive:
                alive.add(p)
                frontier.append(p)
    return alive


def _suffix_to_accept(dfa: Dfa, alive: set[int]) -> dict[int, Word]:
    """Shortest word from each co-accessible state to acceptance."""
    out: dict[int, Word] = {s: Word(()) for s in dfa.accept}
    frontier = deque(dfa.accept)
    index: dict[int, list[tuple[Letter, int]]] = {}
    for (s, lt), s2 in sorted(dfa.trans.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        index.setdefault(s2, []).append((lt, s))
    while frontier:
        s = frontier.popleft()
        for lt, p in index.get(s, ()):
            if p in alive and p not in out:
                out[p] = Word((lt,)) + out[s]
                frontier.append(p)
    return out


def verify_language(dfa: Dfa, group: MarkedGroup, index: BallIndex) -> VerifyReport:
    """Certify the accepted language as geodesic and onto, up to the radius.

    Runs breadth-first search on the product of the trimmed automaton and
    the Cayley graph.  Soundness fails if an accepted word is longer than
    its element's distance; since trimming leaves only states that extend
    to acceptance, any arrival at an already-seen product state at a larger
    depth also convicts (the extension is a non-geodesic accepted word).
    Completeness fails if some ball element is never realized at its exact
    distance by an accepted word.
    """
    alive = _co_accessible(dfa)
    suffixes = _suffix_to_accept(dfa, alive)
    counter_word: Optional[Word] = None
    counter_elem: Optional[str] = None
    sound = True
    words_checked = 0
    covered: set = set()
    if dfa.start in alive:
        start_key = group.key(group.identity)
        seen: dict[tuple[int, Any], int] = {(dfa.start, start_key): 0}
        parents: dict[tuple[int, Any], tuple[Optional[tuple], Optional[Letter], Any]] = {
            (dfa.start, start_key): (None, None, group.identity)
        }

        def word_to(node: tuple) -> Word:
            letters: list[Letter] = []
            cur: Optional[tuple] = node
            while cur is not None:
                parent, lt, _e = parents[cur]
                if lt is not None:
                    letters.append(lt)
                cur = parent
            return Word(tuple(reversed(letters)))

        if dfa.start in dfa.accept:
            covered.add(start_key)
        frontier: list[tuple] = [(dfa.start, start_key)]
        d = 0
        while frontier and d < index.radius:
            d += 1
            nxt: list[tuple] = []
            for node in frontier:
                s, _ekey = node
                e = parents[node][2]
                for lt in dfa.alphabet.signed_letters():
                    s2 = dfa.step(s, lt)
                    if s2 is None or s2 not in alive:
                        continue
                    e2 = group.apply_letter(e, lt)
                    key2 = (s2, group.key(e2))
                    words_checked += 1
                    dist = index.distance(e2)  # words can't outrun the ball
                    prev = seen.get(key2)
                    if prev is not None:
                        if prev < d and sound:
                            sound = False
                            counter_word = word_to(node) + Word((lt,)) + suffixes[s2]
                        continue
                    seen[key2] = d
                    parents[key2] = (node, lt, e2)
                    if dist != d:
                        if sound:
                            sound = False
                            counter_word = word_to(key2) + suffixes[s2]
                        continue
                    if s2 in dfa.accept:
                        covered.add(group.key(e2))
                    nxt.append(key2)
            frontier = nxt
    missing = [
        e for e, _d in index.items_sorted() if group.key(e) not in covered
    ]
    complete = not missing
    if missing:
        counter_elem = group.render(missing[0])
    return VerifyReport(
        sound=sound,
        complete=complete,
        radius=index.radius,
        words_checked=words_checked,
        elements_covered=len(covered),
        counterexample_word=counter_word,
        counterexample_element=counter_elem,
        dfa=dfa,
    )


def extend_geodesic(
    dfa: Dfa,
    group: MarkedGroup,
    w: Word,
    index: BallIndex,
    verification: VerifyReport,
) -> tuple[Any, Word]:
    """Pump an accepted geodesic into a strictly longer one nearby.

    Returns (element of the pumped word, pumped word); the new element is
    strictly farther from the identity and within 2 n_states of the old
    endpoint, both distances certified against the ball.
    """
    if verification.dfa is not dfa or not verification.sound:
        raise SoundnessUnverified(
            "extend_geodesic needs a soundness-verified DFA for this ball"
        )
    n = dfa.n_states
    a, b, c = pump_decompose(dfa, w)
    pumped = a + b + b + c
    g = group.evaluate(w)
    g2 = group.evaluate(pumped)
    d_old = index.distance(g)
    d_new = index.distance(g2)
    if d_old != len(w) or d_new != len(pumped):
        raise ClaimViolation(
            "pumping broke geodesity: %d->%d vs %d->%d"
            % (len(w), d_old, len(pumped), d_new)
        )
    if d_new <= d_old:
        raise ClaimViolation("pumped endpoint is not farther out")
    hop = index.distance(group.evaluate(w.inverse() + pumped))
    if hop > 2 * n:
        raise ClaimViolation("pumped endpoint drifted %d > 2n = %d" % (hop, 2 * n))
    return (g2, pumped)


def depth_bound_check(
    dfa: Dfa,
    group: MarkedGroup,
    index: BallIndex,
    verification: VerifyReport,
) -> tuple[int, int]:
    """Max oracle depth over ball elements with margin, and the 2n bound.

    The cap adapts to the room left inside the ball: finding a farther
    element within cap certifies depth <= cap <= bound, while a miss is
    conclusive only when the full bound+1 window fit.  Elements on the
    boundary sphere are skipped.  Any certified depth above 2 n_states
    contradicts the pumping bound and raises ClaimViolation.
    """
    if verification.dfa is not dfa or not verification.ok:
        raise SoundnessUnverified("depth bound needs a fully verified DFA")
    bound = 2 * dfa.n_states
    max_depth = 0
    for e, dist in index.items_sorted():
        cap = min(bound + 1, index.radius - dist)
        if cap < 1:
            continue
        rep = depth(group, e, index, cap=cap)
        if rep.exceeds_cap:
            if cap == bound + 1:
                raise ClaimViolation(
                    "element %s has depth > %d" % (group.render(e), bound)
                )
            continue  # too close to the boundary to certify
        if rep.depth > bound:
            raise ClaimViolation(
                "element %s has depth %d > %d"
                % (group.render(e), rep.depth, bound)
            )
        max_depth = max(max_depth, rep.depth)
    return (max_depth, bound)


class FreeGroup(MarkedGroup):
    """Free group on k letters; elements are reduced words as letter tuples."""

    def __init__(self, rank: int = 2, names: Optional[Sequence[str]] = None):
        if rank < 1:
            raise DeadendError("rank must be >= 1")
        if names is None:
            base = "abcdefghijklmnopqrstuvwxyz"
            if rank > len(base):
                raise DeadendError("provide names for rank > 26")
            names = tuple(base[:rank])
        self.alphabet = GenAlphabet(tuple(names))

    @property
    def identity(self) -> tuple[Letter, ...]:
        return ()

    def apply_letter(self, element, letter: Letter):
        self.alphabet.check(letter)
        if element and element[-1] == (letter[0], -letter[1]):
            return element[:-1]
        return element + (letter,)

    def render(self, element) -> str:
        if not element:
            return "e"
        return " ".join(self.alphabet.token(lt) for lt in element)


def free_reduced_dfa(rank: int = 2) -> Dfa:
    """Reduced words over F_rank: 1 start state plus one per signed letter."""
    group = FreeGroup(rank)
    letters = group.alphabet.signed_letters()
    state_of = {lt: i + 1 for i, lt in enumerate(letters)}
    trans: dict[tuple[int, Letter], int] = {}
    for lt in letters:
        trans[(0, lt)] = state_of[lt]
    for last in letters:
        for lt in letters:
            if lt == (last[0], -last[1]):
                continue
            trans[(state_of[last], lt)] = state_of[lt]
    return Dfa(
        n_states=1 + len(letters),
        start=0,
        accept=frozenset(range(1 + len(letters))),
        trans=trans,
        alphabet=group.alphabet,
    )


def zn_sorted_dfa(n: int = 2) -> Dfa:
    """Sorted-block geodesics for Z^n: one sign-committed state per axis."""
    if n < 1:
        raise DeadendError("dimension must be >= 1")
    names = tuple("g%d" % i for i in range(n)) if n > 4 else tuple("abcd"[:n])
    alphabet = GenAlphabet(names)
    trans: dict[tuple[int, Letter], int] = {}

    def state_of(i: int, s: int) -> int:
        return 1 + 2 * i + (0 if s == 1 else 1)

    for i in range(n):
        for s in (1, -1):
            trans[(0, (i, s))] = state_of(i, s)
            trans[(state_of(i, s), (i, s))] = state_of(i, s)
            for j in range(i + 1, n):
                for s2 in (1, -1):
                    trans[(state_of(i, s), (j, s2))] = state_of(j, s2)
    return Dfa(
        n_states=1 + 2 * n,
        start=0,
        accept=frozenset(range(1 + 2 * n)),
        trans=trans,
        alphabet=alphabet,
    )


def builtin_dfas() -> dict[str, tuple[Dfa, MarkedGroup]]:
    """Catalog of fixture automata with matching marked groups."""
    from .abelian import standard_zn

    return {
        "f2_reduced": (free_reduced_dfa(2), FreeGroup(2)),
        "z2_sorted": (zn_sorted_dfa(2), standard_zn(2)),
    }
