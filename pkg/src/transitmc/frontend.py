"""Physical access control frontend.

Building layouts (rooms, doors, policy updates) are encoded as safe Petri
nets with transits: rooms become always-marked places, controllable doors
get open/closed state places, and each room gets one splitting transition
per simultaneously-openable configuration of its internal outgoing doors.
People are not tokens; they are the flow chains the transit relation
threads through the rooms.

The module also generates the stock specification formulas: six property
templates over flow chains and the maximality/fairness run assumptions.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from . import logic
from .logic import (Atom, Exists, Flow, Forall, Formula, Next, Not,
                    Release, Until, conj, disj, finally_, globally, implies)
from .nets import PetriNetWithTransits, START

OUTSIDE = "outside"


class LayoutError(ValueError):
    """Raised for ill-formed building layouts."""


@dataclass(frozen=True)
class Door:
    name: str
    src: str
    dst: str
    controllable: bool = False


@dataclass(frozen=True)
class PolicyUpdate:
    """A named event that opens and closes sets of controllable doors."""
    name: str
    opens: tuple[str, ...]
    closes: tuple[str, ...]


@dataclass
class BuildingLayout:
    name: str = "building"
    rooms: list[str] = field(default_factory=list)
    doors: list[Door] = field(default_factory=list)
    entries: frozenset = frozenset()
    exits: frozenset = frozenset()
    updates: list[PolicyUpdate] = field(default_factory=list)

    def door(self, name: str) -> Door:
        for d in self.doors:
            if d.name == name:
                return d
        raise LayoutError("unknown door %r" % name)

    def internal_doors(self, room: str) -> list[Door]:
        """Outgoing room-to-room doors of a room, name order."""
        return sorted((d for d in self.doors
                       if d.src == room and d.dst != OUTSIDE),
                      key=lambda d: d.name)

    def validate(self) -> None:
        if len(set(self.rooms)) != len(self.rooms):
            raise LayoutError("duplicate room")
        if OUTSIDE in self.rooms:
            raise LayoutError("%r is reserved" % OUTSIDE)
        names = [d.name for d in self.doors]
        if len(set(names)) != len(names):
            raise LayoutError("duplicate door")
        valid = set(self.rooms) | {OUTSIDE}
        for d in self.doors:
            if d.src not in valid or d.dst not in valid:
                raise LayoutError("door %r endpoint is not a room" % d.name)
            if d.src == OUTSIDE and d.dst == OUTSIDE:
                raise LayoutError("door %r connects nothing" % d.name)
            if d.src == OUTSIDE and d.name not in self.entries:
                raise LayoutError("door %r from outside must be an entry" % d.name)
            if d.dst == OUTSIDE and d.name not in self.exits:
                raise LayoutError("door %r to outside must be an exit" % d.name)
        for name in self.entries:
            if self.door(name).src != OUTSIDE:
                raise LayoutError("entry %r does not come from outside" % name)
        for name in self.exits:
            if self.door(name).dst != OUTSIDE:
                raise LayoutError("exit %r does not go outside" % name)
        seen = set()
        for u in self.updates:
            if u.name in seen:
                raise LayoutError("duplicate update %r" % u.name)
            seen.add(u.name)
            for name in u.opens + u.closes:
                if not self.door(name).controllable:
                    raise LayoutError(
                        "update %r switches uncontrollable door %r"
                        % (u.name, name))


# -- layout text format ------------------------------------------------

_UPDATE_RE = re.compile(
    r"^(?P<name>\S+)\s*:\s*open\s*\{(?P<open>[^}]*)\}\s*"
    r"close\s*\{(?P<close>[^}]*)\}$")


def parse_layout(text: str, name: str = "building") -> BuildingLayout:
    """Parse the line-based layout format.

    room <id> / door <id>: <from> -> <to> [controllable] /
    entry <door> / exit <door> /
    update <name>: open{d1, d2} close{d3}.  '#' starts a comment.
    """
    layout = BuildingLayout(name)
    entries, exits = set(), set()
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line or line == "format-version 1":
            continue
        kind, _, rest = line.partition(" ")
        rest = rest.strip()
        if kind == "room":
            layout.rooms.append(rest)
        elif kind == "door":
            head, colon, pair = rest.partition(":")
            if not colon:
                raise LayoutError("door needs ':' (line: %r)" % line)
            src, arrow, dst = pair.partition("->")
            if not arrow:
                raise LayoutError("door needs '->' (line: %r)" % line)
            dst, controllable = dst.strip(), False
            if dst.endswith(" controllable"):
                dst, controllable = dst[: -len(" controllable")].strip(), True
            layout.doors.append(
                Door(head.strip(), src.strip(), dst, controllable))
        elif kind == "entry":
            entries.add(rest)
        elif kind == "exit":
            exits.add(rest)
        elif kind == "update":
            m = _UPDATE_RE.match(rest)
            if not m:
                raise LayoutError("bad update line: %r" % line)
            split = lambda s: tuple(x.strip() for x in s.split(",") if x.strip())
            layout.updates.append(PolicyUpdate(
                m.group("name"), split(m.group("open")), split(m.group("close"))))
        else:
            raise LayoutError("unknown directive %r (line: %r)" % (kind, line))
    layout.entries = frozenset(entries)
    layout.exits = frozenset(exits)
    layout.validate()
    return layout


def dump_layout(layout: BuildingLayout) -> str:
    out = ["format-version 1"]
    for r in layout.rooms:
        out.append("room %s" % r)
    for d in layout.doors:
        suffix = " controllable" if d.controllable else ""
        out.append("door %s: %s -> %s%s" % (d.name, d.src, d.dst, suffix))
    for name in sorted(layout.entries):
        out.append("entry %s" % name)
    for name in sorted(layout.exits):
        out.append("exit %s" % name)
    for u in layout.updates:
        out.append("update %s: open{%s} close{%s}"
                   % (u.name, ", ".join(u.opens), ", ".join(u.closes)))
    return "\n".join(out) + "\n"


# -- encoding -----------------------------------------------------------


def _config_name(room: str, config: list[Door], used: set) -> str:
    """Readable name for a splitting transition: room_target for a single
    door, room + joined target initials for a multi-door configuration."""
    targets = sorted(d.dst for d in config)
    if len(config) == 1:
        name = "%s_%s" % (room, targets[0])
    else:
        initials = [t[0] for t in targets]
        if len(set(initials)) == len(initials):
            name = "%s_%s" % (room, "".join(initials))
        else:
            name = "%s_%s" % (room, "_".join(targets))
    if name in used:
        name = "%s_via_%s" % (room, "_".join(sorted(d.name for d in config)))
    if name in used:
        raise LayoutError("cannot name the %r configuration %r uniquely"
                          % (room, [d.name for d in config]))
    used.add(name)
    return name


def building_to_pnwt(layout: BuildingLayout) -> PetriNetWithTransits:
    """Encode a building layout as a safe Petri net with transits.

    Rooms become places that stay marked forever. A controllable door d
    gets places o_d (initially marked: every policy starts permissive)
    and c_d. Each room gets one transition per configuration of its
    internal outgoing doors that can be simultaneously open: every
    non-empty subset containing all uncontrollable doors. The transition
    is guarded by the o_ places of its doors and the c_ places of the
    room's other controllable doors, so at most one configuration is
    enabled at a time; it splits every chain in the room into all target
    rooms and keeps the chains already there. Entry doors start chains,
    exit doors silently end them, and policy updates move o_/c_ tokens
    while every room's chains survive in place.
    """
    layout.validate()
    net = PetriNetWithTransits(layout.name)
    for room in layout.rooms:
        net.add_place(room, init=True)
    for d in layout.doors:
        if d.controllable:
            net.add_place("o_%s" % d.name, init=True)
            net.add_place("c_%s" % d.name)

    def loop(t: str, p: str) -> None:
        net.add_arc(p, t)
        net.add_arc(t, p)

    for d in sorted(layout.doors, key=lambda d: d.name):
        if d.name in layout.entries:
            net.add_transition(d.name)
            loop(d.name, d.dst)
            net.add_transit(d.name, START, d.dst)
            net.add_transit(d.name, d.dst, d.dst)
        elif d.name in layout.exits:
            net.add_transition(d.name)
            loop(d.name, d.src)

    used: set = set()
    splitters: dict[str, list[str]] = {}
    for room in layout.rooms:
        internal = layout.internal_doors(room)
        forced = [d for d in internal if not d.controllable]
        optional = [d for d in internal if d.controllable]
        for r in range(len(optional) + 1):
            for picked in itertools.combinations(optional, r):
                config = forced + list(picked)
                if not config:
                    continue
                t = _config_name(room, config, used)
                splitters.setdefault(room, []).append(t)
                net.add_transition(t)
                loop(t, room)
                for q in sorted({d.dst for d in config} - {room}):
                    loop(t, q)
                for d in picked:
                    loop(t, "o_%s" % d.name)
                for d in optional:
                    if d not in picked:
                        loop(t, "c_%s" % d.name)
                for d in config:
                    net.add_transit(t, room, d.dst)
                for q in sorted({d.dst for d in config} - {room}):
                    net.add_transit(t, q, q)

    for u in layout.updates:
        net.add_transition(u.name)
        for name in u.opens:
            net.add_arc("c_%s" % name, u.name)
            net.add_arc(u.name, "o_%s" % name)
        for name in u.closes:
            net.add_arc("o_%s" % name, u.name)
            net.add_arc(u.name, "c_%s" % name)
        for room in layout.rooms:
            loop(u.name, room)
            net.add_transit(u.name, room, room)

    _audit_exclusive(net, layout, splitters)
    return net


def _audit_exclusive(net: PetriNetWithTransits, layout: BuildingLayout,
                     splitters: dict) -> None:
    """Check that no two splitting transitions of one room can be enabled
    together: they must disagree on some door state place (one requires it
    open, the other closed)."""
    for room, movers in splitters.items():
        for a, b in itertools.combinations(movers, 2):
            opposed = any(
                ("o_%s" % d.name in net.pre[a] and "c_%s" % d.name in net.pre[b])
                or ("c_%s" % d.name in net.pre[a] and "o_%s" % d.name in net.pre[b])
                for d in layout.doors if d.controllable)
            if not opposed:
                raise LayoutError(
                    "door configurations %r and %r of room %r are not "
                    "mutually exclusive" % (a, b, room))


# -- specification templates --------------------------------------------

TEMPLATE_ARITY = {
    "permission": 1,
    "persistent-permission": 1,
    "prohibition": 1,
    "blocking": 2,
    "way-pointing": 2,
    "policy-update": 2,
    "emergency": 2,
}


def property_template(name: str, args: list) -> Formula:
    """Build one of the stock flow properties.

    Args may be atoms or formula fragments (strings are parsed). The
    result is a full specification with the flow quantifier in front.
    """
    if name not in TEMPLATE_ARITY:
        raise logic.FormulaError(
            "unknown template %r (choose from %s)"
            % (name, ", ".join(sorted(TEMPLATE_ARITY))))
    if len(args) != TEMPLATE_ARITY[name]:
        raise logic.FormulaError("template %r takes %d argument(s)"
                                 % (name, TEMPLATE_ARITY[name]))
    args = [logic.parse_subformula(a) if isinstance(a, str) else a
            for a in args]
    if name == "permission":
        return Flow(Exists(finally_(args[0])))
    if name == "persistent-permission":
        return Flow(Forall(globally(Exists(finally_(args[0])))))
    if name == "prohibition":
        return Flow(Forall(globally(Not(args[0]))))
    if name == "blocking":
        return Flow(Forall(globally(
            implies(args[0], Forall(globally(Not(args[1])))))))
    if name == "way-pointing":
        return Flow(Forall(Release(args[0], Not(args[1]))))
    if name == "policy-update":
        return Flow(Forall(globally(
            implies(args[0], Exists(finally_(args[1]))))))
    # emergency: nothing forbidden may happen until, with the position
    # entered by the emergency transition seen one step later, it fires
    return Flow(Forall(Until(Forall(globally(Not(args[0]))),
                             Next(args[1]))))


ASSUMPTION_KINDS = ("interleaving-max", "concurrency-max",
                    "weak-fair", "strong-fair")


def _pre_conj(net: PetriNetWithTransits, t: str) -> Formula:
    return conj(Atom(p) for p in sorted(net.pre[t]))


def assumption_template(kind: str, net: PetriNetWithTransits,
                        transition: str | None = None) -> Formula:
    """Build a maximality or fairness run assumption for a net.

    interleaving-max: whenever some transition is enabled, some fires
    next. concurrency-max: a transition enabled forever forces
    infinitely many firings competing for its preset. weak-fair /
    strong-fair constrain one transition (pass it as `transition`).
    """
    if kind == "interleaving-max":
        return globally(implies(
            disj(_pre_conj(net, t) for t in net.transitions),
            disj(Next(Atom(t)) for t in net.transitions)))
    if kind == "concurrency-max":
        parts = []
        for t in net.transitions:
            rivals = sorted({t2 for p in net.pre[t] for t2 in net.transitions
                             if p in net.pre[t2]})
            parts.append(implies(finally_(globally(_pre_conj(net, t))),
                                 globally(finally_(disj(
                                     Atom(t2) for t2 in rivals)))))
        return conj(parts)
    if kind in ("weak-fair", "strong-fair"):
        if transition is None or transition not in net.pre:
            raise logic.FormulaError(
                "%s needs a transition of the net" % kind)
        pre = _pre_conj(net, transition)
        fires = globally(finally_(Atom(transition)))
        if kind == "weak-fair":
            return implies(finally_(globally(pre)), fires)
        return implies(globally(finally_(pre)), fires)
    raise logic.FormulaError(
        "unknown assumption %r (choose from %s)"
        % (kind, ", ".join(ASSUMPTION_KINDS)))
