"""Labeled Kripke structures tracking flow-chain suffixes of a net.

States are either a bare place p or a pair (t, p) for transitions t that the
formula's atom set observes. The successor structure is determined by the
place alone: on letter t the tracker moves to the transit targets of its
place under t (absent when t does not transit the place), and on the stutter
letter # it moves to the bare place. Labels are intersected with the atom
set. Initial states are derived per chain start (t, p).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .nets import PetriNetWithTransits

HASH = "#"


@dataclass(frozen=True)
class KState:
    place: str
    trans: str | None = None  # set when the producing transition is observed

    def ident(self) -> str:
        if self.trans is None:
            return self.place
        return "%s,%s" % (self.trans, self.place)


class LabeledKripkeStructure:
    def __init__(self, net: PetriNetWithTransits, ap: frozenset):
        self.net = net
        self.ap = ap
        self.letters: tuple[str, ...] = tuple(net.transitions) + (HASH,)
        self.states: list[KState] = []
        self.initial_of: dict[tuple[str, str], KState] = {}  # chain start -> state
        self.labels: dict[KState, frozenset] = {}
        # successor rows keyed by place: place -> letter -> ordered targets
        self.rows: dict[str, dict[str, tuple[KState, ...]]] = {}

    @property
    def initial_states(self) -> list[KState]:
        seen: list[KState] = []
        for s in self.initial_of.values():
            if s not in seen:
                seen.append(s)
        return seen

    def succ(self, s: KState, letter: str) -> tuple[KState, ...]:
        """Ordered successors of s under letter; empty when undefined."""
        return self.rows[s.place].get(letter, ())

    def edge_count(self) -> int:
        """Size of the stored successor relation plus one # edge per state."""
        transit_edges = sum(
            len(targets)
            for row in self.rows.values()
            for letter, targets in row.items()
            if letter != HASH
        )
        return transit_edges + len(self.states)


def _state_for(t: str, q: str, ap: frozenset) -> KState:
    return KState(q, t) if t in ap else KState(q)


def build_chain_kripke(net: PetriNetWithTransits, ap: frozenset) -> LabeledKripkeStructure:
    k = LabeledKripkeStructure(net, frozenset(ap))
    for t, p in net.chain_starts():
        k.initial_of[(t, p)] = _state_for(t, p, k.ap)
    queue = deque()
    seen: set[KState] = set()

    def visit(s: KState) -> None:
        if s not in seen:
            seen.add(s)
            k.states.append(s)
            k.labels[s] = (frozenset({s.place, s.trans}) if s.trans else frozenset({s.place})) & k.ap
            queue.append(s)

    for s in k.initial_of.values():
        visit(s)
    while queue:
        s = queue.popleft()
        if s.place not in k.rows:
            row: dict[str, tuple[KState, ...]] = {}
            for t in net.transitions:
                targets = net.transit_targets(s.place, t)
                if targets:
                    row[t] = tuple(_state_for(t, q, k.ap) for q in targets)
            row[HASH] = (KState(s.place),)
            k.rows[s.place] = row
        for targets in k.rows[s.place].values():
            for nxt in targets:
                visit(nxt)
    return k


def succ_ordered(k: LabeledKripkeStructure, s: KState, letter: str) -> list[KState]:
    return list(k.succ(s, letter))


def dump_kripke(k: LabeledKripkeStructure) -> str:
    out = ["format-version 1"]
    initials = set(k.initial_states)
    for s in k.states:
        parts = ["state", s.ident()]
        if s in initials:
            parts.append("initial")
        parts.append("labels={%s}" % ",".join(sorted(k.labels[s])))
        out.append(" ".join(parts))
    for s in k.states:
        for letter in k.letters:
            for nxt in k.succ(s, letter):
                out.append("edge %s --%s--> %s" % (s.ident(), letter, nxt.ident()))
    return "\n".join(out) + "\n"
