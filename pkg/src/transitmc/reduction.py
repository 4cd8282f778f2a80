"""Composition of the checked net with one tracker subnet per flow part,
and the matching rewrite of the formula into plain LTL.

The composed net runs the original net and, per flow subformula, one copy
of that subformula's Büchi automaton over firing letters. An activation
token circulates: an original transition hands it to the first subnet
tagged with the fired letter, each subnet reacts with exactly one step
(start a chain, follow an automaton edge, retire to the idle state, or,
while no chain has been picked up yet, skip the letter) and passes the
tag on, and the last subnet returns the token. A mode switch per component
moves the system from firing letters to an explicit stutter letter so
that finite runs of the original net are checked against their infinite
stutter extension.

The formula rewrite replaces each flow subformula by a recurrence check
on the Büchi places of its subnet, re-anchors the run part's temporal
operators on the positions where an original-part transition (or none at
all) just fired, and guards everything with a premise that keeps only
the composed runs that circulate the token and never starve a subnet of
real steps.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import logic
from .automata import BuchiAutomaton
from .kripke import HASH
from .logic import And, Atom, Flow, Formula, Next, Not, Or, Release, Until
from .nets import InhibitorNet, NetError, PetriNetWithTransits


@dataclass
class FlowPart:
    """Bookkeeping for one tracker subnet (1-based index)."""
    index: int
    init_place: str
    normal_place: str
    stutter_place: str
    acthash_place: str
    act_places: dict[str, str]
    state_places: dict[str, str]
    accepting_places: tuple
    ns_transition: str
    start_transitions: dict[tuple, str]
    none_transitions: dict[str, str]
    nonestop_transition: str
    edge_transitions: list[str] = field(default_factory=list)
    skip_transitions: dict[str, str] = field(default_factory=dict)

    def transitions(self) -> list[str]:
        out = [self.ns_transition]
        out.extend(self.start_transitions.values())
        out.extend(self.none_transitions.values())
        out.append(self.nonestop_transition)
        out.extend(self.edge_transitions)
        out.extend(self.skip_transitions.values())
        return out


@dataclass
class ReductionMetadata:
    original_places: tuple
    original_transitions: tuple
    act_o: str
    normal_o: str
    stutter_o: str
    ns_o: str
    stop_o: str
    flows: tuple
    all_transitions: tuple = ()
    label: dict = field(default_factory=dict)

    @property
    def observable(self) -> tuple:
        """Original-part transitions: the run formula is re-anchored on
        these plus the no-transition positions."""
        return self.original_transitions + (self.ns_o, self.stop_o)


def compose_mc_net(net: PetriNetWithTransits,
                   nbas: list[BuchiAutomaton]) -> tuple[InhibitorNet, ReductionMetadata]:
    """Sequential composition of the net with one subnet per automaton."""
    for name in list(net.places) + list(net.transitions):
        if "[" in name or "]" in name:
            raise NetError("net names may not contain brackets: %r" % name)
    for nba in nbas:
        if tuple(nba.letters) != tuple(net.transitions) + (HASH,):
            raise NetError("automaton letters do not match the net")

    n = len(nbas)
    out = InhibitorNet("%s[mc]" % net.name)
    labels: dict[str, str | None] = {}

    act_o, normal_o, stutter_o = "act[o]", "normal[o]", "stutter[o]"
    ns_o, stop_o = "ns[o]", "stop[o]"

    for p in net.places:
        out.add_place(p, init=net.places[p])
    out.add_place(act_o, init=True)
    out.add_place(normal_o, init=True)
    out.add_place(stutter_o)

    flows: list[FlowPart] = []
    for i in range(1, n + 1):
        nba = nbas[i - 1]
        part = FlowPart(
            index=i,
            init_place="init[%d]" % i,
            normal_place="normal[%d]" % i,
            stutter_place="stutter[%d]" % i,
            acthash_place="actstop[%d]" % i,
            act_places={t: "act[%s,%d]" % (t, i) for t in net.transitions},
            state_places={s: "%s[%d]" % (s, i) for s in nba.states},
            accepting_places=tuple(sorted(
                "%s[%d]" % (s, i) for s in nba.accepting)),
            ns_transition="ns[%d]" % i,
            start_transitions={},
            none_transitions={},
            nonestop_transition="nonestop[%d]" % i,
        )
        out.add_place(part.init_place, init=True)
        out.add_place(part.normal_place, init=True)
        out.add_place(part.stutter_place)
        out.add_place(part.acthash_place)
        for t in net.transitions:
            out.add_place(part.act_places[t])
        for s in nba.states:
            out.add_place(part.state_places[s])
        flows.append(part)

    def forward(i: int, letter: str) -> str:
        """Activation place the letter moves to after subnet i."""
        if i == n:
            return act_o
        nxt = flows[i]  # subnet i+1, zero-based list
        return nxt.acthash_place if letter == HASH else nxt.act_places[letter]

    # original part: copied transitions consume and hand on the token
    for t in net.transitions:
        out.add_transition(t)
        labels[t] = t
        for p in net.pre[t]:
            out.add_arc(p, t)
        for p in net.post[t]:
            out.add_arc(t, p)
        out.add_arc(act_o, t)
        out.add_arc(t, forward(0, t))
        out.add_inhibitor(stutter_o, t)

    out.add_transition(ns_o)
    labels[ns_o] = None
    out.add_arc(normal_o, ns_o)
    out.add_arc(ns_o, stutter_o)

    out.add_transition(stop_o)
    labels[stop_o] = HASH
    out.add_arc(act_o, stop_o)
    out.add_arc(stop_o, forward(0, HASH))
    out.add_inhibitor(normal_o, stop_o)

    # tracker subnets
    for i in range(1, n + 1):
        nba = nbas[i - 1]
        part = flows[i - 1]

        out.add_transition(part.ns_transition)
        labels[part.ns_transition] = None
        out.add_arc(part.normal_place, part.ns_transition)
        out.add_arc(part.ns_transition, part.stutter_place)

        for start in sorted(nba.init_map):
            t, p = start
            name = "start[%s,%s,%d]" % (t, p, i)
            part.start_transitions[start] = name
            out.add_transition(name)
            labels[name] = t
            out.add_arc(part.init_place, name)
            out.add_arc(part.act_places[t], name)
            out.add_arc(name, part.state_places[nba.init_map[start]])
            out.add_arc(name, forward(i, t))

        idle_place = part.state_places[nba.idle_state]
        for t in net.transitions:
            name = "none[%s,%d]" % (t, i)
            part.none_transitions[t] = name
            out.add_transition(name)
            labels[name] = t
            out.add_arc(part.init_place, name)
            out.add_arc(part.act_places[t], name)
            out.add_arc(name, idle_place)
            out.add_arc(name, forward(i, t))

        out.add_transition(part.nonestop_transition)
        labels[part.nonestop_transition] = HASH
        out.add_arc(part.init_place, part.nonestop_transition)
        out.add_arc(part.acthash_place, part.nonestop_transition)
        out.add_arc(part.nonestop_transition, idle_place)
        out.add_arc(part.nonestop_transition, forward(i, HASH))
        out.add_inhibitor(part.normal_place, part.nonestop_transition)

        for s in nba.states:
            for letter in nba.letters:
                for dst in nba.successors(s, letter):
                    tag = "stop" if letter == HASH else letter
                    name = "move[%s,%s,%s,%d]" % (s, tag, dst, i)
                    part.edge_transitions.append(name)
                    out.add_transition(name)
                    labels[name] = letter
                    out.add_arc(part.state_places[s], name)
                    out.add_arc(name, part.state_places[dst])
                    if letter == HASH:
                        out.add_arc(part.acthash_place, name)
                        out.add_inhibitor(part.normal_place, name)
                    else:
                        out.add_arc(part.act_places[letter], name)
                        out.add_inhibitor(part.stutter_place, name)
                    out.add_arc(name, forward(i, letter))

        for t in net.transitions:
            name = "skip[%s,%d]" % (t, i)
            part.skip_transitions[t] = name
            out.add_transition(name)
            labels[name] = t
            out.add_arc(part.act_places[t], name)
            out.add_arc(name, forward(i, t))
            out.add_inhibitor(part.stutter_place, name)
            for s in nba.states:
                if nba.successors(s, t):
                    out.add_inhibitor(part.state_places[s], name)

    meta = ReductionMetadata(
        original_places=tuple(net.places),
        original_transitions=tuple(net.transitions),
        act_o=act_o, normal_o=normal_o, stutter_o=stutter_o,
        ns_o=ns_o, stop_o=stop_o,
        flows=tuple(flows),
        all_transitions=tuple(out.transitions),
        label=labels,
    )
    return out, meta


# -- formula rewriting ---------------------------------------------------


def transform_formula(psi: Formula, meta: ReductionMetadata) -> Formula:
    """LTL formula over the composed net equivalent to psi over the net.

    Flow subformulas become recurrence checks over their subnet's Büchi
    places. The run part is then re-anchored: temporal operators whose
    subtree mentions transition atoms only look at positions where an
    original-part transition other than the mode switch, or no transition
    at all, just fired; every next-step operator either steps once (if
    nothing fired) or steps past the subnet positions to the next
    original-part firing. Finally the premise restricts attention to
    composed runs that circulate the token and give every subnet
    infinitely many non-skip steps.
    """
    flow_subs = [Not(logic.globally(logic.finally_(
        logic.disj(Atom(b) for b in part.accepting_places))))
        for part in meta.flows]
    counter = [0]

    def substitute(f: Formula) -> Formula:
        match f:
            case Flow():
                sub = flow_subs[counter[0]]
                counter[0] += 1
                return sub
            case And(left=l, right=r):
                return And(substitute(l), substitute(r))
            case Or(left=l, right=r):
                return Or(substitute(l), substitute(r))
            case Not(sub=s):
                return Not(substitute(s))
            case Next(sub=s):
                return Next(substitute(s))
            case Until(left=l, right=r):
                return Until(substitute(l), substitute(r))
            case Release(left=l, right=r):
                return Release(substitute(l), substitute(r))
            case _:
                return f

    body = substitute(psi)
    if counter[0] != len(meta.flows):
        raise logic.FormulaError(
            "%d flow subformulas but %d subnets composed"
            % (counter[0], len(meta.flows)))

    original = frozenset(meta.original_transitions)
    boundary = Or(
        logic.disj(Atom(t) for t in meta.original_transitions + (meta.stop_o,)),
        Not(logic.disj(Atom(t) for t in meta.all_transitions)))
    nothing = Not(logic.disj(Atom(t) for t in meta.all_transitions))
    unobservable = logic.disj(
        Atom(t) for t in meta.all_transitions if t not in set(meta.observable))
    observable = logic.disj(Atom(t) for t in meta.observable)

    def mentions_transition(f: Formula) -> bool:
        return bool(logic.atoms(f) & original)

    def rewrite(f: Formula) -> Formula:
        match f:
            case And(left=l, right=r):
                return And(rewrite(l), rewrite(r))
            case Or(left=l, right=r):
                return Or(rewrite(l), rewrite(r))
            case Not(sub=s):
                return Not(rewrite(s))
            case Next(sub=s):
                s = rewrite(s)
                return And(logic.implies(nothing, Next(s)),
                           logic.implies(Not(nothing),
                                         Next(Until(unobservable,
                                                    And(observable, s)))))
            case Until(left=l, right=r):
                l, r = rewrite(l), rewrite(r)
                if mentions_transition(l) or mentions_transition(r):
                    return Until(logic.implies(boundary, l), And(boundary, r))
                return Until(l, r)
            case Release(left=l, right=r):
                l, r = rewrite(l), rewrite(r)
                if mentions_transition(l) or mentions_transition(r):
                    return Release(And(boundary, l), logic.implies(boundary, r))
                return Release(l, r)
            case _:
                return f

    body = rewrite(body)

    premise_parts = [logic.globally(logic.finally_(Atom(meta.act_o)))]
    for part in meta.flows:
        fires = logic.disj(Atom(t) for t in part.transitions())
        skips = logic.disj(Atom(t) for t in part.skip_transitions.values())
        premise_parts.append(
            Not(logic.finally_(logic.globally(logic.implies(fires, skips)))))
    return logic.implies(logic.conj(premise_parts), body)
