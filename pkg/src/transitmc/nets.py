"""Safe Petri nets with transits, inhibitor arcs, markings, and traces.

Markings are frozensets of place names (1-safe nets only). The transit
relation of a transition t is a set of pairs (src, tgt) with src a place of
preset(t) or the chain-start token START, and tgt a place of postset(t).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

START = "START"

STOP = None  # edge label used for "the run stops here" in marking graphs


class NetError(ValueError):
    """Raised for structurally ill-formed nets or invalid firings."""


class PetriNetWithTransits:
    """A 1-safe Petri net refined with a transit relation."""

    def __init__(self, name: str = "net"):
        self.name = name
        self.places: dict[str, bool] = {}  # place -> initially marked
        self.transitions: list[str] = []
        self.pre: dict[str, set[str]] = {}
        self.post: dict[str, set[str]] = {}
        self.transits: dict[str, set[tuple[str, str]]] = {}

    # -- construction -------------------------------------------------

    def add_place(self, name: str, init: bool = False) -> None:
        if name == START:
            raise NetError("place may not be named %r" % START)
        if name in self.places or name in self.pre:
            raise NetError("duplicate identifier %r" % name)
        self.places[name] = init

    def add_transition(self, name: str) -> None:
        if name in self.pre or name in self.places:
            raise NetError("duplicate identifier %r" % name)
        self.transitions.append(name)
        self.pre[name] = set()
        self.post[name] = set()
        self.transits[name] = set()

    def add_arc(self, src: str, dst: str) -> None:
        """Add a flow arc place->transition or transition->place."""
        if src in self.places and dst in self.pre:
            self.pre[dst].add(src)
        elif src in self.pre and dst in self.places:
            self.post[src].add(dst)
        else:
            raise NetError("arc %r -> %r links neither place->transition "
                           "nor transition->place" % (src, dst))

    def add_transit(self, t: str, src: str, tgt: str) -> None:
        if t not in self.pre:
            raise NetError("unknown transition %r" % t)
        if src != START and src not in self.pre[t]:
            raise NetError("transit source %r not in preset of %r" % (src, t))
        if tgt not in self.post[t]:
            raise NetError("transit target %r not in postset of %r" % (tgt, t))
        self.transits[t].add((src, tgt))

    # -- structure ----------------------------------------------------

    @property
    def initial_marking(self) -> frozenset:
        return frozenset(p for p, init in self.places.items() if init)

    def preset(self, t: str) -> frozenset:
        return frozenset(self.pre[t])

    def postset(self, t: str) -> frozenset:
        return frozenset(self.post[t])

    def transit_targets(self, p: str, t: str) -> tuple[str, ...]:
        """Places the data in p moves to when t fires, sorted by name."""
        return tuple(sorted(tgt for src, tgt in self.transits[t] if src == p))

    def chain_starts(self) -> list[tuple[str, str]]:
        """All (t, p) pairs with a chain-starting transit (START, p) on t."""
        out = []
        for t in self.transitions:
            for src, tgt in sorted(self.transits[t]):
                if src == START:
                    out.append((t, tgt))
        return out

    def transit_triples(self) -> list[tuple[str, str, str]]:
        """All (t, src, tgt) transit triples, chain starts included."""
        out = []
        for t in self.transitions:
            for src, tgt in sorted(self.transits[t]):
                out.append((t, src, tgt))
        return out


class InhibitorNet(PetriNetWithTransits):
    """Petri net with transits plus inhibitor arcs (place must be empty)."""

    def __init__(self, name: str = "net"):
        super().__init__(name)
        self.inhibitors: dict[str, set[str]] = {}

    def add_transition(self, name: str) -> None:
        super().add_transition(name)
        self.inhibitors[name] = set()

    def add_inhibitor(self, p: str, t: str) -> None:
        if p not in self.places:
            raise NetError("unknown place %r" % p)
        if t not in self.pre:
            raise NetError("unknown transition %r" % t)
        self.inhibitors[t].add(p)

    def inhibitor_set(self, t: str) -> frozenset:
        return frozenset(self.inhibitors.get(t, ()))


def enabled(net: PetriNetWithTransits, m: frozenset) -> set[str]:
    """Transitions firable at marking m.

    A transition needs every preset place marked; in an inhibitor net it
    additionally needs every inhibitor place empty.
    """
    out = set()
    inhibitors = getattr(net, "inhibitors", None)
    for t in net.transitions:
        if not net.pre[t] <= m:
            continue
        if inhibitors and inhibitors[t] & m:
            continue
        out.add(t)
    return out


def fire(net: PetriNetWithTransits, m: frozenset, t: str) -> frozenset:
    """Successor marking (m \\ preset) ∪ postset; raises if t is disabled."""
    if t not in net.pre:
        raise NetError("unknown transition %r" % t)
    if t not in enabled(net, m):
        raise NetError("transition %r not enabled at %s" % (t, sorted(m)))
    return (m - net.pre[t]) | frozenset(net.post[t])


@dataclass(frozen=True)
class SafetyReport:
    status: str  # "safe" | "violation" | "cap_exceeded"
    marking: frozenset | None = None
    transition: str | None = None

    def __bool__(self) -> bool:
        return self.status == "safe"


def validate_safe(net: PetriNetWithTransits, exploration_cap: int = 100_000) -> SafetyReport:
    """Check 1-safety by exhaustive exploration up to exploration_cap markings.

    A firing violates safety when it adds a token to a place that keeps its
    token (i.e. postset intersects the marking left after consuming).
    """
    seen = {net.initial_marking}
    queue = deque(seen)
    while queue:
        m = queue.popleft()
        for t in sorted(enabled(net, m)):
            if frozenset(net.post[t]) & (m - net.pre[t]):
                return SafetyReport("violation", m, t)
            m2 = (m - net.pre[t]) | frozenset(net.post[t])
            if m2 not in seen:
                if len(seen) >= exploration_cap:
                    return SafetyReport("cap_exceeded")
                seen.add(m2)
                queue.append(m2)
    return SafetyReport("safe")


# -- marking graph ----------------------------------------------------


STOPPED = "<stopped>"  # GraphNode.ingoing sentinel for stop-closure nodes


@dataclass(frozen=True)
class GraphNode:
    marking: frozenset
    ingoing: str | None  # producing transition; None = initial; STOPPED


class MarkingGraph:
    """Reachability graph under ingoing semantics with stop closure.

    Nodes are (marking, ingoing transition). Every node has a stop edge
    to a dedicated stopped node for its marking, and stopped nodes only
    loop on themselves, so every finite firing sequence corresponds to
    exactly one infinite path stuttering on its last marking and no path
    stutters mid-run. Node atoms are the marking plus the ingoing
    transition's name (stopped and initial nodes carry no transition
    atom).
    """

    def __init__(self, initial: GraphNode):
        self.initial = initial
        self.edges: dict[GraphNode, list[tuple[str | None, GraphNode]]] = {}

    @property
    def nodes(self) -> list[GraphNode]:
        return list(self.edges)

    def successors(self, node: GraphNode) -> list[tuple[str | None, GraphNode]]:
        return self.edges[node]

    @staticmethod
    def atoms(node: GraphNode) -> frozenset:
        if node.ingoing is None or node.ingoing == STOPPED:
            return node.marking
        return node.marking | {node.ingoing}


class CapExceeded(RuntimeError):
    """Exploration exceeded the configured state cap."""


def marking_graph(net: PetriNetWithTransits, cap: int | None = None) -> MarkingGraph:
    initial = GraphNode(net.initial_marking, None)
    graph = MarkingGraph(initial)
    queue = deque([initial])
    graph.edges[initial] = []
    while queue:
        node = queue.popleft()
        succs = graph.edges[node]
        targets = []
        if node.ingoing == STOPPED:
            targets.append((STOP, node))
        else:
            for t in sorted(enabled(net, node.marking)):
                targets.append((t, GraphNode(fire(net, node.marking, t), t)))
            targets.append((STOP, GraphNode(node.marking, STOPPED)))
        for label, nxt in targets:
            if nxt not in graph.edges:
                if cap is not None and len(graph.edges) >= cap:
                    raise CapExceeded("marking graph larger than %d nodes" % cap)
                graph.edges[nxt] = []
                queue.append(nxt)
            succs.append((label, nxt))
    return graph


# -- traces and lassos ------------------------------------------------


@dataclass(frozen=True)
class LassoFiringSequence:
    """Firing sequence stem followed by loop repeated forever.

    An empty loop means the run stops after the stem and its marking
    stutters.
    """
    stem: tuple[str, ...]
    loop: tuple[str, ...] = ()

    @property
    def stopped(self) -> bool:
        return not self.loop

    def steps(self) -> tuple[str, ...]:
        return self.stem + self.loop


@dataclass(frozen=True)
class Trace:
    """Ultimately periodic trace: states[0..] then cycling states[loop_start:].

    Each state is the atom set {ingoing transition} ∪ marking (the initial
    state and stutter states carry no transition atom).
    """
    states: tuple[frozenset, ...]
    loop_start: int

    def state(self, i: int) -> frozenset:
        if i < len(self.states):
            return self.states[i]
        period = len(self.states) - self.loop_start
        return self.states[self.loop_start + (i - self.loop_start) % period]

    def positions(self) -> range:
        return range(len(self.states))

    def next_position(self, i: int) -> int:
        return i + 1 if i + 1 < len(self.states) else self.loop_start


def replay_lasso(net: PetriNetWithTransits, lasso: LassoFiringSequence) -> Trace:
    """Fire the lasso, checking enabledness and loop closure; build its trace."""
    m = net.initial_marking
    states = [m]
    for t in lasso.stem:
        m = fire(net, m, t)
        states.append(m | {t})
    loop_entry = m
    if lasso.stopped:
        states.append(m)  # global stutter on the stopped marking
        return Trace(tuple(states), len(states) - 1)
    for t in lasso.loop:
        m = fire(net, m, t)
        states.append(m | {t})
    if m != loop_entry:
        raise NetError("loop does not return to its entry marking")
    # states has 1 + |stem| + |loop| entries; the position after the final
    # loop step repeats the state entered by the first loop step, so the
    # cycle starts right after the stem.
    return Trace(tuple(states), len(lasso.stem) + 1)


def marking_after(net: PetriNetWithTransits, seq: tuple[str, ...]) -> frozenset:
    m = net.initial_marking
    for t in seq:
        m = fire(net, m, t)
    return m


# -- text format -------------------------------------------------------

FORMAT_HEADER = "format-version 1"


def parse_net(text: str, name: str = "net") -> PetriNetWithTransits:
    """Parse the line-based net format.

    place <id> [init] / transition <id> / arc <x> -> <y> /
    transit <t>: <place|START> -> <place> / inhibit <p> -o <t>.
    '#' starts a comment. Returns an InhibitorNet when any inhibit line
    occurs, else a PetriNetWithTransits.
    """
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line and line != FORMAT_HEADER:
            lines.append(line)
    net = InhibitorNet(name) if any(l.startswith("inhibit ") for l in lines) \
        else PetriNetWithTransits(name)
    for line in lines:
        kind, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if kind == "place":
                parts = rest.split()
                if len(parts) == 2 and parts[1] == "init":
                    net.add_place(parts[0], init=True)
                elif len(parts) == 1:
                    net.add_place(parts[0])
                else:
                    raise NetError("bad place line")
            elif kind == "transition":
                net.add_transition(rest)
            elif kind == "arc":
                src, arrow, dst = rest.partition("->")
                if not arrow:
                    raise NetError("arc needs '->'")
                net.add_arc(src.strip(), dst.strip())
            elif kind == "transit":
                t, colon, pair = rest.partition(":")
                if not colon:
                    raise NetError("transit needs ':'")
                src, arrow, dst = pair.partition("->")
                if not arrow:
                    raise NetError("transit needs '->'")
                net.add_transit(t.strip(), src.strip(), dst.strip())
            elif kind == "inhibit":
                p, arrow, t = rest.partition("-o")
                if not arrow:
                    raise NetError("inhibit needs '-o'")
                net.add_inhibitor(p.strip(), t.strip())
            else:
                raise NetError("unknown directive %r" % kind)
        except NetError as exc:
            raise NetError("%s (line: %r)" % (exc, line)) from None
    return net


def dump_net(net: PetriNetWithTransits) -> str:
    out = [FORMAT_HEADER]
    for p, init in net.places.items():
        out.append("place %s init" % p if init else "place %s" % p)
    for t in net.transitions:
        out.append("transition %s" % t)
    for t in net.transitions:
        for p in sorted(net.pre[t]):
            out.append("arc %s -> %s" % (p, t))
        for p in sorted(net.post[t]):
            out.append("arc %s -> %s" % (t, p))
    for t in net.transitions:
        for src, tgt in sorted(net.transits[t]):
            out.append("transit %s: %s -> %s" % (t, src, tgt))
    inhibitors = getattr(net, "inhibitors", None)
    if inhibitors:
        for t in net.transitions:
            for p in sorted(inhibitors[t]):
                out.append("inhibit %s -o %s" % (p, t))
    return "\n".join(out) + "\n"
