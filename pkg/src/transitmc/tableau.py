"""LTL to Büchi translation via a symbolic-letter tableau.

States carry the obligations that must hold from the current position plus
the until-formulas discharged by the incoming step; edges carry literal
constraints (required-true and required-false atom sets) instead of concrete
letters, so one automaton serves explicit alphabets (expand the constraints),
lazy products against state graphs (match constraints against a state's atom
set), and the symbolic letters of path-formula components inside larger
automata. Generalized Büchi sets (one per until) are state-based — a state is
fair for `l U r` when the until is not obligated or was just discharged — and
a round-robin counter degeneralizes them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import logic
from .logic import And, Atom, Bool, Formula, Next, Not, Or, Release, Until


@dataclass(frozen=True)
class TabState:
    obligations: frozenset
    fulfilled: frozenset
    counter: int


@dataclass(frozen=True)
class Constraint:
    """Atoms a letter must contain and atoms it must not contain."""
    pos: frozenset
    neg: frozenset

    def matches(self, letter: frozenset) -> bool:
        return self.pos <= letter and not (self.neg & letter)


class SymbolicNBA:
    def __init__(self, formula: Formula):
        self.formula = formula
        self.states: list[TabState] = []
        self.initial: list[TabState] = []
        self.edges: dict[TabState, list[tuple[Constraint, TabState]]] = {}
        self.accepting: frozenset = frozenset()

    def successors(self, state: TabState) -> list[tuple[Constraint, TabState]]:
        return self.edges[state]


def _covers(obligations: frozenset) -> list[tuple[frozenset, frozenset, frozenset, frozenset]]:
    """Saturate a set of NNF formulas into propositional covers.

    Each cover is (pos literals, neg literals, next obligations, fulfilled
    untils): one way to satisfy the obligations now, with the temporal rest
    postponed to the next position.
    """
    results: list[tuple[frozenset, frozenset, frozenset, frozenset]] = []
    seen = set()

    def expand(todo: tuple, pos: frozenset, neg: frozenset,
               nxt: frozenset, ful: frozenset) -> None:
        while todo:
            f, todo = todo[0], todo[1:]
            match f:
                case Bool(value=True):
                    continue
                case Bool(value=False):
                    return
                case Atom(name=a):
                    if a in neg:
                        return
                    pos = pos | {a}
                case Not(sub=Atom(name=a)):
                    if a in pos:
                        return
                    neg = neg | {a}
                case And(left=l, right=r):
                    todo = (l, r) + todo
                case Or(left=l, right=r):
                    expand((l,) + todo, pos, neg, nxt, ful)
                    expand((r,) + todo, pos, neg, nxt, ful)
                    return
                case Until(left=l, right=r):
                    expand((r,) + todo, pos, neg, nxt, ful | {f})
                    expand((l,) + todo, pos, neg, nxt | {f}, ful)
                    return
                case Release(left=l, right=r):
                    expand((r, l) + todo, pos, neg, nxt, ful)
                    expand((r,) + todo, pos, neg, nxt | {f}, ful)
                    return
                case Next(sub=s):
                    nxt = nxt | {s}
                case _:
                    raise logic.FormulaError("not an NNF LTL node: %r" % (f,))
        key = (pos, neg, nxt, ful)
        if key not in seen:
            seen.add(key)
            results.append(key)

    expand(tuple(sorted(obligations, key=repr)), frozenset(), frozenset(),
           frozenset(), frozenset())
    return results


def _until_subformulas(f: Formula) -> list:
    out = []

    def walk(g):
        match g:
            case Until(left=l, right=r):
                out.append(g)
                walk(l)
                walk(r)
            case Release(left=l, right=r) | And(left=l, right=r) | Or(left=l, right=r):
                walk(l)
                walk(r)
            case Not(sub=s) | Next(sub=s):
                walk(s)
            case _:
                pass

    walk(f)
    # deterministic order, duplicates removed
    uniq = []
    for u in out:
        if u not in uniq:
            uniq.append(u)
    return uniq


def build_tableau_nba(phi: Formula) -> SymbolicNBA:
    """Symbolic NBA accepting exactly the infinite models of phi."""
    phi = logic.nnf(phi)
    nba = SymbolicNBA(phi)
    untils = _until_subformulas(phi)
    n = max(len(untils), 1)

    def fair(state: TabState) -> bool:
        if not untils:
            return True
        u = untils[state.counter]
        return u not in state.obligations or u in state.fulfilled

    cover_cache: dict[frozenset, list] = {}

    def covers_of(obligations: frozenset):
        if obligations not in cover_cache:
            cover_cache[obligations] = _covers(obligations)
        return cover_cache[obligations]

    init = TabState(frozenset({phi}), frozenset(), 0)
    queue = [init]
    nba.initial = [init]
    nba.edges[init] = []
    nba.states.append(init)
    while queue:
        state = queue.pop()
        bump = fair(state)
        for pos, neg, nxt, ful in covers_of(state.obligations):
            counter = (state.counter + 1) % n if bump else state.counter
            succ = TabState(nxt, ful, counter)
            if succ not in nba.edges:
                nba.edges[succ] = []
                nba.states.append(succ)
                queue.append(succ)
            nba.edges[state].append((Constraint(pos, neg), succ))
    nba.accepting = frozenset(s for s in nba.states if s.counter == 0 and fair(s))
    return nba


# -- acceptance helpers -------------------------------------------------


def _lasso_positions(stem_len: int, loop_len: int):
    total = stem_len + loop_len

    def nxt(i: int) -> int:
        j = i + 1
        return j if j < total else stem_len

    return total, nxt


def symbolic_lasso_accepts(nba: SymbolicNBA, stem: tuple, loop: tuple) -> bool:
    """Does the NBA accept the word stem · loop^ω of atom-set letters?"""
    assert loop, "an infinite word needs a nonempty loop"
    word = tuple(stem) + tuple(loop)
    total, nxt = _lasso_positions(len(stem), len(loop))

    # reachable product nodes (state, position)
    nodes = set()
    stack = [(s, 0) for s in nba.initial]
    succ: dict[tuple, list] = {}
    while stack:
        node = stack.pop()
        if node in nodes:
            continue
        nodes.add(node)
        state, pos = node
        outs = []
        for cst, dst in nba.successors(state):
            if cst.matches(word[pos]):
                outs.append((dst, nxt(pos)))
        succ[node] = outs
        stack.extend(outs)

    return _has_accepting_cycle(
        nodes, lambda nd: succ[nd], lambda nd: nd[0] in nba.accepting)


def _has_accepting_cycle(nodes, succ_fn, accepting_fn) -> bool:
    """Tarjan SCC test: some cycle-forming SCC contains an accepting node."""
    index: dict = {}
    low: dict = {}
    onstack: set = set()
    stack: list = []
    counter = [0]

    for root in list(nodes):
        if root in index:
            continue
        work = [(root, iter(succ_fn(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        onstack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter[0]
                    counter[0] += 1
                    stack.append(nxt)
                    onstack.add(nxt)
                    work.append((nxt, iter(succ_fn(nxt))))
                    advanced = True
                    break
                if nxt in onstack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                scc = []
                while True:
                    member = stack.pop()
                    onstack.discard(member)
                    scc.append(member)
                    if member == node:
                        break
                cyclic = len(scc) > 1 or node in succ_fn(node)
                if cyclic and any(accepting_fn(m) for m in scc):
                    return True
    return False
