"""Alternating automata for branching-time formulas over chain trees.

The pipeline here turns a branching-time formula into a nondeterministic
Büchi word automaton in three steps:

* ``ctlstar_to_ata`` builds an alternating tree automaton. Formulas whose
  path bodies are single X/U/R steps over state formulas get the linear
  one-state-per-subformula rules; general path formulas are compiled to a
  tableau word automaton over placeholder atoms and simulated along tree
  paths (existentially for E, universally with a waiting/committed copy for
  A, which turns the co-Büchi avoidance obligation into a Büchi one).
* ``product_awa`` runs the tree automaton over a chain Kripke structure,
  storing one transition row per letter that actually moves the tracked
  place plus the stutter row.
* ``eliminate_alternation`` applies the breakpoint construction to thread
  sets. Threads carry a liveness mode (a dead thread follows the stutter
  row and is falsified if its place is transited again) and a shadow bit
  set when the thread persists through a letter that bypassed it; shadowed
  threads never count as fair, so a run that parks a thread forever and
  keeps it shadowed is rejected.

``awa_accepts`` decides single ultimately periodic words against the
alternating automaton directly, as a Büchi game between the automaton
(resolving disjunctions) and a pathfinder (picking the thread to follow).
It shares only the thread-step rules with the breakpoint construction, so
the two can check each other.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from . import logic
from .kripke import HASH, LabeledKripkeStructure
from .logic import And, Atom, Bool, Exists, Forall, Formula, Next, Not, Or, Release, Until
from .nets import CapExceeded
from .tableau import SymbolicNBA, build_tableau_nba, _has_accepting_cycle


# -- positive boolean formulas ------------------------------------------


class PositiveBooleanFormula:
    """Base class; instances are trees over opaque hashable atoms."""
    __slots__ = ()


@dataclass(frozen=True)
class PBTrue(PositiveBooleanFormula):
    __slots__ = ()


@dataclass(frozen=True)
class PBFalse(PositiveBooleanFormula):
    __slots__ = ()


@dataclass(frozen=True)
class PBAtom(PositiveBooleanFormula):
    value: object


@dataclass(frozen=True)
class PBAnd(PositiveBooleanFormula):
    parts: tuple


@dataclass(frozen=True)
class PBOr(PositiveBooleanFormula):
    parts: tuple


PB_TRUE = PBTrue()
PB_FALSE = PBFalse()


def pb_and(parts) -> PositiveBooleanFormula:
    flat = []
    for p in parts:
        if isinstance(p, PBFalse):
            return PB_FALSE
        if isinstance(p, PBTrue):
            continue
        if isinstance(p, PBAnd):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return PB_TRUE
    if len(flat) == 1:
        return flat[0]
    return PBAnd(tuple(flat))


def pb_or(parts) -> PositiveBooleanFormula:
    flat = []
    for p in parts:
        if isinstance(p, PBTrue):
            return PB_TRUE
        if isinstance(p, PBFalse):
            continue
        if isinstance(p, PBOr):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return PB_FALSE
    if len(flat) == 1:
        return flat[0]
    return PBOr(tuple(flat))


def pb_atoms(pb: PositiveBooleanFormula):
    match pb:
        case PBAtom(value=v):
            yield v
        case PBAnd(parts=ps) | PBOr(parts=ps):
            for p in ps:
                yield from pb_atoms(p)
        case _:
            pass


def pb_map(pb: PositiveBooleanFormula, fn) -> PositiveBooleanFormula:
    match pb:
        case PBAtom(value=v):
            return PBAtom(fn(v))
        case PBAnd(parts=ps):
            return pb_and(pb_map(p, fn) for p in ps)
        case PBOr(parts=ps):
            return pb_or(pb_map(p, fn) for p in ps)
        case _:
            return pb


def minimal_models(pb: PositiveBooleanFormula, key=None) -> tuple:
    """Inclusion-minimal satisfying atom sets, deterministically ordered."""
    models = _models(pb)
    if key is None:
        key = repr
    return tuple(sorted(models, key=lambda m: (len(m), sorted(key(a) for a in m))))


def _models(pb: PositiveBooleanFormula) -> list[frozenset]:
    match pb:
        case PBTrue():
            return [frozenset()]
        case PBFalse():
            return []
        case PBAtom(value=v):
            return [frozenset({v})]
        case PBOr(parts=ps):
            out: list[frozenset] = []
            for p in ps:
                out.extend(_models(p))
            return _antichain(out)
        case PBAnd(parts=ps):
            acc = [frozenset()]
            for p in ps:
                nxt = [a | b for a in acc for b in _models(p)]
                acc = _antichain(nxt)
                if not acc:
                    return []
            return acc
    raise TypeError("not a positive boolean formula: %r" % (pb,))


def _antichain(sets: list[frozenset]) -> list[frozenset]:
    kept: list[frozenset] = []
    for s in sorted(set(sets), key=lambda m: (len(m), sorted(map(repr, m)))):
        if not any(k <= s for k in kept):
            kept.append(s)
    return kept


# -- alternating tree automaton -----------------------------------------


@dataclass
class _EComp:
    """Existential path component: simulate the path formula's NBA."""
    nba: SymbolicNBA
    zmap: dict


@dataclass
class _AComp:
    """Universal path component: simulate the NBA of the negated path
    formula along every branch and require all its runs non-accepting."""
    nba: SymbolicNBA
    zmap: dict


class AlternatingTreeAutomaton:
    """States are PNF state subformulas plus path-component states.

    ``delta(state, sigma, k)`` yields a positive boolean formula over
    (direction, state) atoms for a node labeled ``sigma`` with ``k``
    ordered children. ``accepting(state)`` says whether a thread may stay
    in this state forever.
    """

    def __init__(self, phi: Formula, directions: int):
        self.formula = logic.nnf(phi)
        self.directions = directions
        self.initial = ("f", self.formula)
        self._comps: dict = {}

    # component construction, memoized per quantifier node

    def _component(self, node: Formula):
        if node not in self._comps:
            path, zmap = _pathify(node.sub)
            if isinstance(node, Exists):
                self._comps[node] = _EComp(build_tableau_nba(path), zmap)
            else:
                self._comps[node] = _AComp(
                    build_tableau_nba(Not(path)), zmap)
        return self._comps[node]

    # transition function

    def delta(self, state, sigma: frozenset, k: int) -> PositiveBooleanFormula:
        kind = state[0]
        if kind == "f":
            return self._tr(state[1], sigma, k)
        if kind == "nbwE":
            node, tab = state[1], state[2]
            return self._e_moves(node, self._component(node), tab, sigma, k)
        if kind == "nbwA":
            node, tab, committed = state[1], state[2], state[3]
            return self._a_moves(node, self._component(node), tab,
                                 committed, sigma, k)
        raise ValueError("unknown automaton state %r" % (state,))

    def accepting(self, state) -> bool:
        kind = state[0]
        if kind == "f":
            node = state[1]
            match node:
                case Exists(sub=Release()) | Forall(sub=Release()):
                    return True
                case _:
                    return False
        if kind == "nbwE":
            return state[2] in self._comps[state[1]].nba.accepting
        if kind == "nbwA":
            return state[3]
        return False

    # linear rules for single-step path bodies, tableau simulation else

    def _tr(self, f: Formula, sigma: frozenset, k: int) -> PositiveBooleanFormula:
        match f:
            case Bool(value=v):
                return PB_TRUE if v else PB_FALSE
            case Atom(name=a):
                return PB_TRUE if a in sigma else PB_FALSE
            case Not(sub=Atom(name=a)):
                return PB_TRUE if a not in sigma else PB_FALSE
            case And(left=l, right=r):
                return pb_and((self._tr(l, sigma, k), self._tr(r, sigma, k)))
            case Or(left=l, right=r):
                return pb_or((self._tr(l, sigma, k), self._tr(r, sigma, k)))
            case Exists(sub=body):
                if logic._is_state_formula(body):
                    return self._tr(body, sigma, k)
                match body:
                    case Next(sub=g) if logic._is_state_formula(g):
                        return pb_or(PBAtom((c, ("f", g))) for c in range(k))
                    case Until(left=l, right=r) if _state_pair(l, r):
                        loop = pb_or(PBAtom((c, ("f", f))) for c in range(k))
                        return pb_or((self._tr(r, sigma, k),
                                      pb_and((self._tr(l, sigma, k), loop))))
                    case Release(left=l, right=r) if _state_pair(l, r):
                        loop = pb_or(PBAtom((c, ("f", f))) for c in range(k))
                        return pb_and((self._tr(r, sigma, k),
                                       pb_or((self._tr(l, sigma, k), loop))))
                comp = self._component(f)
                out = []
                for init in comp.nba.initial:
                    out.append(self._e_moves(f, comp, init, sigma, k))
                return pb_or(out)
            case Forall(sub=body):
                if logic._is_state_formula(body):
                    return self._tr(body, sigma, k)
                match body:
                    case Next(sub=g) if logic._is_state_formula(g):
                        return pb_and(PBAtom((c, ("f", g))) for c in range(k))
                    case Until(left=l, right=r) if _state_pair(l, r):
                        loop = pb_and(PBAtom((c, ("f", f))) for c in range(k))
                        return pb_or((self._tr(r, sigma, k),
                                      pb_and((self._tr(l, sigma, k), loop))))
                    case Release(left=l, right=r) if _state_pair(l, r):
                        loop = pb_and(PBAtom((c, ("f", f))) for c in range(k))
                        return pb_and((self._tr(r, sigma, k),
                                       pb_or((self._tr(l, sigma, k), loop))))
                comp = self._component(f)
                out = []
                for init in comp.nba.initial:
                    out.append(self._a_moves(f, comp, init, False, sigma, k))
                return pb_and(out)
        raise logic.FormulaError("not a PNF state formula: %r" % (f,))

    def _e_moves(self, node, comp: _EComp, tab, sigma, k) -> PositiveBooleanFormula:
        out = []
        for cst, dst in comp.nba.successors(tab):
            here = self._check(comp.zmap, cst, sigma, k, positive=True)
            step = pb_or(PBAtom((c, ("nbwE", node, dst))) for c in range(k))
            out.append(pb_and((here, step)))
        return pb_or(out)

    def _a_moves(self, node, comp: _AComp, tab, committed, sigma, k) -> PositiveBooleanFormula:
        bad = comp.nba.accepting
        out = []
        for cst, dst in comp.nba.successors(tab):
            refute = self._check(comp.zmap, cst, sigma, k, positive=False)
            per_child = []
            for c in range(k):
                if committed:
                    opt = (PBAtom((c, ("nbwA", node, dst, True)))
                           if dst not in bad else PB_FALSE)
                else:
                    choices = [PBAtom((c, ("nbwA", node, dst, False)))]
                    if dst not in bad:
                        choices.append(PBAtom((c, ("nbwA", node, dst, True))))
                    opt = pb_or(choices)
                per_child.append(opt)
            out.append(pb_or((refute, pb_and(per_child))))
        return pb_and(out)

    def _check(self, zmap, cst, sigma, k, positive: bool) -> PositiveBooleanFormula:
        """Constraint satisfaction (or, for positive=False, refutation)."""
        parts = []
        if positive:
            for a in sorted(cst.pos):
                sub = zmap.get(a)
                parts.append(self._tr(sub, sigma, k) if sub is not None
                             else (PB_TRUE if a in sigma else PB_FALSE))
            for a in sorted(cst.neg):
                sub = zmap.get(a)
                parts.append(self._tr(logic.negate(sub), sigma, k)
                             if sub is not None
                             else (PB_TRUE if a not in sigma else PB_FALSE))
            return pb_and(parts)
        for a in sorted(cst.pos):
            sub = zmap.get(a)
            parts.append(self._tr(logic.negate(sub), sigma, k)
                         if sub is not None
                         else (PB_TRUE if a not in sigma else PB_FALSE))
        for a in sorted(cst.neg):
            sub = zmap.get(a)
            parts.append(self._tr(sub, sigma, k) if sub is not None
                         else (PB_TRUE if a in sigma else PB_FALSE))
        return pb_or(parts)


def _state_pair(l: Formula, r: Formula) -> bool:
    return logic._is_state_formula(l) and logic._is_state_formula(r)


def _pathify(path: Formula) -> tuple[Formula, dict]:
    """Replace maximal quantified subformulas with placeholder atoms."""
    zmap: dict[str, Formula] = {}
    assigned: dict[Formula, str] = {}

    def walk(f: Formula) -> Formula:
        match f:
            case Exists() | Forall():
                if f not in assigned:
                    name = "@z%d" % len(assigned)
                    assigned[f] = name
                    zmap[name] = f
                return Atom(assigned[f])
            case And(left=l, right=r):
                return And(walk(l), walk(r))
            case Or(left=l, right=r):
                return Or(walk(l), walk(r))
            case Until(left=l, right=r):
                return Until(walk(l), walk(r))
            case Release(left=l, right=r):
                return Release(walk(l), walk(r))
            case Next(sub=s):
                return Next(walk(s))
            case Not(sub=s):
                return Not(walk(s))
            case _:
                return f

    return walk(path), zmap


def ctlstar_to_ata(phi: Formula, directions: int) -> AlternatingTreeAutomaton:
    """Alternating tree automaton accepting the trees satisfying phi."""
    return AlternatingTreeAutomaton(phi, directions)


# -- product with a chain Kripke structure ------------------------------


class AlternatingWordAutomaton:
    """The tree automaton run over a chain Kripke structure, read as a
    word automaton over firing letters plus the stutter letter."""

    def __init__(self, kripke: LabeledKripkeStructure):
        self.kripke = kripke
        self.letters = kripke.letters
        self.states: list = []
        self.delta: dict = {}
        self.initial: dict = {}
        self.accepting: set = set()
        self._order: dict = {}

    def order_of(self, state) -> int:
        if state not in self._order:
            self._order[state] = len(self._order)
        return self._order[state]

    def rows_of(self, state) -> list:
        return [l for l in self.letters if (state, l) in self.delta]

    def models(self, pb: PositiveBooleanFormula) -> tuple:
        return minimal_models(pb, key=self.order_of)


def product_awa(ata: AlternatingTreeAutomaton,
                kripke: LabeledKripkeStructure) -> AlternatingWordAutomaton:
    """Store, for every reachable (tracker state, automaton state) pair,
    one transition row per letter that transits the tracked place plus
    the stutter row."""
    awa = AlternatingWordAutomaton(kripke)
    queue: deque = deque()

    def touch(pstate) -> None:
        if pstate not in awa._order:
            awa.order_of(pstate)
            awa.states.append(pstate)
            queue.append(pstate)
            if ata.accepting(pstate[1]):
                awa.accepting.add(pstate)

    for start in kripke.net.chain_starts():
        kinit = kripke.initial_of[start]
        pstate = (kinit, ata.initial)
        touch(pstate)
        awa.initial[start] = pstate

    while queue:
        pstate = queue.popleft()
        s, q = pstate
        sigma = kripke.labels[s]
        for letter in kripke.letters:
            succ = kripke.succ(s, letter)
            if not succ:
                continue
            pb = ata.delta(q, sigma, len(succ))
            mapped = pb_map(pb, lambda a: (succ[a[0]], a[1]))
            for atom in pb_atoms(mapped):
                touch(atom)
            awa.delta[(pstate, letter)] = mapped
    return awa


# -- thread-level step rules ---------------------------------------------

# A thread is (product state, dead, shadow). Live threads follow every
# letter that has a stored row at their place; on a letter without a row
# they either persist shadowed (the pseudo chain rebinds past this firing)
# or guess that the chain part ends here and take the stutter row into
# dead mode. A dead thread keeps taking stutter steps; a stored row for
# the current letter at its place falsifies the guess, because the real
# chain tree would have been extended there.


def thread_options(awa: AlternatingWordAutomaton, thread, letter) -> list:
    """All allowed successor thread sets; [] means the branch fails."""
    state, dead, shadow = thread

    def as_threads(model, *, dead, shadow=False):
        ths = [(a, dead, shadow) for a in model]
        ths.sort(key=lambda t: awa.order_of(t[0]))
        return ths

    stutter = awa.delta[(state, HASH)]
    if letter == HASH:
        return [as_threads(m, dead=True) for m in awa.models(stutter)]
    row = awa.delta.get((state, letter))
    if dead:
        if row is not None:
            return []
        return [as_threads(m, dead=True) for m in awa.models(stutter)]
    if row is not None:
        return [as_threads(m, dead=False) for m in awa.models(row)]
    options = [[(state, False, True)]]
    options.extend(as_threads(m, dead=True) for m in awa.models(stutter))
    return options


def thread_fair(awa: AlternatingWordAutomaton, thread) -> bool:
    state, _dead, shadow = thread
    return not shadow and state in awa.accepting


# -- alternation elimination ---------------------------------------------


class BuchiAutomaton:
    """Nondeterministic Büchi automaton with explicit named states.

    Letters are opaque and hashable: firing letters plus the stutter
    letter for flow automata, atom sets for formula automata.
    """

    def __init__(self, letters: tuple):
        self.letters = letters
        self.states: list[str] = []
        self.edges: dict[str, dict] = {}
        self.initial: list[str] = []
        self.accepting: frozenset = frozenset()
        self.init_map: dict = {}
        self.idle_state: str | None = None

    def add_state(self, name: str) -> None:
        self.states.append(name)
        self.edges[name] = {}

    def add_edge(self, src: str, letter, dst: str) -> None:
        self.edges[src].setdefault(letter, [])
        if dst not in self.edges[src][letter]:
            self.edges[src][letter].append(dst)

    def successors(self, state: str, letter) -> list[str]:
        return self.edges[state].get(letter, [])

    def lasso_accepts(self, stem: tuple, loop: tuple) -> bool:
        assert loop, "an infinite word needs a nonempty loop"
        word = tuple(stem) + tuple(loop)
        total = len(word)
        stem_len = len(stem)

        def nxt(i: int) -> int:
            j = i + 1
            return j if j < total else stem_len

        nodes = set()
        succ: dict = {}
        stack = [(s, 0) for s in self.initial]
        while stack:
            node = stack.pop()
            if node in nodes:
                continue
            nodes.add(node)
            state, pos = node
            outs = [(d, nxt(pos)) for d in self.successors(state, word[pos])]
            succ[node] = outs
            stack.extend(outs)
        return _has_accepting_cycle(
            nodes, lambda nd: succ[nd], lambda nd: nd[0] in self.accepting)

    def dump(self) -> str:
        lines = ["format-version 1"]
        initial = set(self.initial)
        for s in self.states:
            flags = ""
            if s in initial:
                flags += " initial"
            if s in self.accepting:
                flags += " accepting"
            lines.append("state %s%s" % (s, flags))
        for s in self.states:
            for letter in sorted(self.edges[s], key=str):
                for dst in self.edges[s][letter]:
                    lines.append("edge %s --%s--> %s" % (s, letter, dst))
        return "\n".join(lines) + "\n"


_COMBO_CAP = 200_000


def eliminate_alternation(awa: AlternatingWordAutomaton) -> BuchiAutomaton:
    """Breakpoint construction over thread sets.

    Macro states are (threads, owing) pairs: ``owing`` tracks threads that
    still have to pass a fair state before the next breakpoint. An extra
    idle state with self-loops on every letter is always present; the
    composed net sends trackers that never get a chain started there, so
    every run of the composed net extends to one over the full automaton.

    The result is total: a letter on which some thread has no option (a
    chain-over guess falsified by a later extension, or a label check
    that fails) leads to an absorbing non-accepting reject state rather
    than losing the row. Totality matters downstream: the composed net
    lets a tracker skip a letter only while no automaton state is active,
    so a started tracker must find a row for every letter, and a failed
    run has to park in reject instead of silently freezing.
    """
    nba = BuchiAutomaton(awa.letters)
    reject = "reject"

    def thread_key(th):
        return (awa.order_of(th[0]), th[1], th[2])

    macros: dict = {}
    queue: deque = deque()

    def name_of(macro) -> str:
        if macro not in macros:
            macros[macro] = "q%d" % len(macros)
            nba.add_state(macros[macro])
            queue.append(macro)
        return macros[macro]

    for start in sorted(awa.initial):
        th = (awa.initial[start], False, False)
        threads = frozenset({th})
        owing = frozenset(t for t in threads if not thread_fair(awa, t))
        nba.init_map[start] = name_of((threads, owing))
    dying: list[tuple[str, object]] = []
    while queue:
        macro = queue.popleft()
        src = macros[macro]
        threads, owing = macro
        ordered = sorted(threads, key=thread_key)
        for letter in awa.letters:
            per_thread = [thread_options(awa, th, letter) for th in ordered]
            if any(not opts for opts in per_thread):
                dying.append((src, letter))
                continue
            combos = 1
            for opts in per_thread:
                combos *= len(opts)
            if combos > _COMBO_CAP:
                raise CapExceeded(
                    "alternation elimination: %d successor combinations"
                    % combos)
            seen_succ = set()
            for combo in itertools.product(*per_thread):
                new_threads = frozenset(itertools.chain.from_iterable(combo))
                if owing:
                    moved = frozenset(itertools.chain.from_iterable(
                        opt for th, opt in zip(ordered, combo) if th in owing))
                    new_owing = frozenset(
                        t for t in moved if not thread_fair(awa, t))
                else:
                    new_owing = frozenset(
                        t for t in new_threads if not thread_fair(awa, t))
                succ = (new_threads, new_owing)
                if succ in seen_succ:
                    continue
                seen_succ.add(succ)
                nba.add_edge(src, letter, name_of(succ))

    nba.add_state(reject)
    for letter in awa.letters:
        nba.add_edge(reject, letter, reject)
    for src, letter in dying:
        nba.add_edge(src, letter, reject)

    idle = "idle"
    nba.add_state(idle)
    nba.idle_state = idle
    for letter in awa.letters:
        nba.add_edge(idle, letter, idle)

    nba.initial = sorted(set(nba.init_map.values()) | {idle},
                         key=nba.states.index)
    nba.accepting = frozenset(
        macros[m] for m in macros if not m[1])
    return nba


# -- direct word acceptance as a Büchi game ------------------------------

_WIN = ("win",)
_LOSE = ("lose",)


def awa_accepts(awa: AlternatingWordAutomaton, word: tuple) -> bool:
    """Does the alternating automaton accept stem·loop^ω from some start?

    ``word`` is a (stem, loop) pair of letter tuples. Decided as a Büchi
    game: the automaton resolves disjunctions (which minimal model to
    satisfy), the pathfinder picks which spawned thread to follow. The
    automaton wins iff every pathfinder choice yields a fair thread path.
    """
    stem, loop = word
    assert loop, "an infinite word needs a nonempty loop"
    letters = tuple(stem) + tuple(loop)
    total = len(letters)
    stem_len = len(stem)

    def nxt(i: int) -> int:
        j = i + 1
        return j if j < total else stem_len

    succ: dict = {_WIN: [_WIN], _LOSE: [_LOSE]}
    owner: dict = {_WIN: 0, _LOSE: 0}
    fair: set = {_WIN}

    def explore(node) -> None:
        stack = [node]
        while stack:
            nd = stack.pop()
            if nd in succ:
                continue
            if nd[0] == "A":
                _, thread, pos = nd
                owner[nd] = 0
                if thread_fair(awa, thread):
                    fair.add(nd)
                options = thread_options(awa, thread, letters[pos])
                if not options:
                    succ[nd] = [_LOSE]
                    continue
                outs = []
                for model in options:
                    if not model:
                        outs.append(_WIN)
                    else:
                        outs.append(("P", tuple(model), nxt(pos)))
                succ[nd] = outs
                stack.extend(outs)
            else:
                _, threads, pos = nd
                owner[nd] = 1
                outs = [("A", th, pos) for th in threads]
                succ[nd] = outs
                stack.extend(outs)

    roots = []
    for start in sorted(awa.initial):
        root = ("A", (awa.initial[start], False, False), 0)
        explore(root)
        roots.append(root)

    win = _buchi_game_win(succ, owner, fair)
    return any(root in win for root in roots)


def _buchi_game_win(succ: dict, owner: dict, fair: set) -> set:
    """Winning region of player 0 (wants infinitely many fair nodes)."""
    preds: dict = {n: [] for n in succ}
    for n, outs in succ.items():
        for m in outs:
            preds[m].append(n)

    def attractor(player: int, target: set, domain: set) -> set:
        attr = set(target) & domain
        degree = {}
        stack = list(attr)
        while stack:
            node = stack.pop()
            for p in preds[node]:
                if p not in domain or p in attr:
                    continue
                if owner[p] == player:
                    attr.add(p)
                    stack.append(p)
                else:
                    if p not in degree:
                        degree[p] = sum(1 for s in succ[p] if s in domain)
                    degree[p] -= 1
                    if degree[p] == 0:
                        attr.add(p)
                        stack.append(p)
        return attr

    domain = set(succ)
    while True:
        reach = attractor(0, fair & domain, domain)
        losing = domain - reach
        if not losing:
            return domain
        domain -= attractor(1, losing, domain)


# -- explicit LTL automata -----------------------------------------------


def ltl_to_nba(phi: Formula) -> BuchiAutomaton:
    """Büchi automaton over atom-set letters accepting the models of phi.

    The alphabet is the power set of the formula's atoms, so this stays
    practical only for small formulas; the checking engine matches the
    symbolic tableau against state atom sets directly instead.
    """
    symbolic = build_tableau_nba(phi)
    aps = sorted(logic.atoms(phi))
    letters = tuple(frozenset(c) for r in range(len(aps) + 1)
                    for c in itertools.combinations(aps, r))
    nba = BuchiAutomaton(letters)
    names: dict = {}
    queue: deque = deque()

    def name_of(tab) -> str:
        if tab not in names:
            names[tab] = "q%d" % len(names)
            nba.add_state(names[tab])
            queue.append(tab)
        return names[tab]

    nba.initial = [name_of(t) for t in symbolic.initial]
    while queue:
        tab = queue.popleft()
        src = names[tab]
        for cst, dst in symbolic.successors(tab):
            for letter in letters:
                if cst.matches(letter):
                    nba.add_edge(src, letter, name_of(dst))
    nba.accepting = frozenset(
        names[t] for t in names if t in symbolic.accepting)
    return nba
