"""Checking engine: LTL over marking graphs and the full pipeline.

``check_ltl`` explores the product of a net's marking graph (with stop
closure) and the tableau automaton of the negated formula. Disjunctions
over transition names, which the composed formulas produce wholesale, are
folded into single set-membership literals before the tableau is built so
that cover computation does not branch over them. Recurrence conjuncts of
the negated formula (``G F`` over a boolean, and disjunctions of those —
the shape of weak-fairness assumptions) never enter the tableau at all:
on an ultimately periodic run they only constrain which states the loop
visits, so they are checked as side conditions on the product instead.
Without side conditions the search is the classic two-color nested
depth-first search; with them it decomposes the product into strongly
connected components and looks for one that contains a cycle, a tableau
acceptance state and a witness node per condition. Either way an
accepting cycle is turned back into a replayable firing lasso.

``check_flow_ctlstar`` runs the whole reduction: one Büchi automaton per
flow subformula via the chain Kripke structure and the alternating
automaton, the sequential net composition, the formula rewrite, and a
final ``check_ltl`` on the composed net. A fairness antecedent skips the
rewrite: its conjuncts talk about positions of the original run, which
are read off the composed product wherever an original transition (or
none at all) just fired, so they travel as side conditions. Violations
are projected back to a firing lasso of the original net and
replay-validated, including against such an antecedent.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from . import logic
from .automata import ctlstar_to_ata, eliminate_alternation, product_awa
from .kripke import build_chain_kripke
from .logic import And, Atom, Bool, Formula, Next, Not, Or, Release, Until
from .nets import (CapExceeded, LassoFiringSequence, MarkingGraph,
                   PetriNetWithTransits, marking_graph, replay_lasso)
from .oracle import eval_ltl_on_lasso
from .reduction import compose_mc_net, transform_formula
from .tableau import build_tableau_nba


class VerificationBug(RuntimeError):
    """Internal inconsistency: a produced witness failed validation."""


@dataclass
class Verdict:
    status: str  # "holds", "violated" or "inconclusive"
    witness: LassoFiringSequence | None = None
    reason: str | None = None
    artifacts: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.status == "holds"


# -- transition-set folding ----------------------------------------------

_SET_PREFIX = "@in:"


@lru_cache(maxsize=None)
def _decode(name: str) -> frozenset:
    return frozenset(name[len(_SET_PREFIX):].split("|"))


def _encode(names: frozenset) -> str:
    return _SET_PREFIX + "|".join(sorted(names))


def fold_transition_sets(f: Formula, transitions: frozenset) -> Formula:
    """Collapse pure transition-name disjunctions (and conjunctions of
    their negations) in an NNF formula into set-membership literals."""

    def pos_leaves(g) -> frozenset | None:
        match g:
            case Atom(name=n) if n in transitions:
                return frozenset({n})
            case Atom(name=n) if n.startswith(_SET_PREFIX):
                return _decode(n)
            case Or(left=l, right=r):
                a, b = pos_leaves(l), pos_leaves(r)
                if a is not None and b is not None:
                    return a | b
        return None

    def neg_leaves(g) -> frozenset | None:
        match g:
            case Not(sub=Atom(name=n)) if n in transitions:
                return frozenset({n})
            case Not(sub=Atom(name=n)) if n.startswith(_SET_PREFIX):
                return _decode(n)
            case And(left=l, right=r):
                a, b = neg_leaves(l), neg_leaves(r)
                if a is not None and b is not None:
                    return a | b
        return None

    def fold(g: Formula) -> Formula:
        match g:
            case Or(left=l, right=r):
                s = pos_leaves(g)
                if s is not None and len(s) > 1:
                    return Atom(_encode(s))
                return Or(fold(l), fold(r))
            case And(left=l, right=r):
                s = neg_leaves(g)
                if s is not None and len(s) > 1:
                    return Not(Atom(_encode(s)))
                return And(fold(l), fold(r))
            case Not(sub=s):
                return Not(fold(s))
            case Next(sub=s):
                return Next(fold(s))
            case Until(left=l, right=r):
                return Until(fold(l), fold(r))
            case Release(left=l, right=r):
                return Release(fold(l), fold(r))
            case _:
                return g

    return fold(f)


def _matches(cst, atom_set: frozenset) -> bool:
    for a in cst.pos:
        if a.startswith(_SET_PREFIX):
            if not (_decode(a) & atom_set):
                return False
        elif a not in atom_set:
            return False
    for a in cst.neg:
        if a.startswith(_SET_PREFIX):
            if _decode(a) & atom_set:
                return False
        elif a in atom_set:
            return False
    return True


# -- recurrence side conditions --------------------------------------------


def _eval_bool(f: Formula, atom_set: frozenset) -> bool:
    match f:
        case Bool(value=v):
            return v
        case Atom(name=a):
            if a.startswith(_SET_PREFIX):
                return bool(_decode(a) & atom_set)
            return a in atom_set
        case Not(sub=s):
            return not _eval_bool(s, atom_set)
        case And(left=l, right=r):
            return _eval_bool(l, atom_set) and _eval_bool(r, atom_set)
        case Or(left=l, right=r):
            return _eval_bool(l, atom_set) or _eval_bool(r, atom_set)
    raise logic.FormulaError("not a boolean formula: %r" % (f,))


def _is_boolean(f: Formula) -> bool:
    match f:
        case Bool() | Atom():
            return True
        case Not(sub=s):
            return _is_boolean(s)
        case And(left=l, right=r) | Or(left=l, right=r):
            return _is_boolean(l) and _is_boolean(r)
    return False


def _gf_recurrence(f: Formula) -> Formula | None:
    """The boolean x for shapes ``⋁_j G F x_j`` in NNF, else None.

    Such a formula holds on an ultimately periodic run exactly when the
    loop visits a state satisfying some x_j, see ``_split_fairness``.
    """
    match f:
        case Release(left=Bool(value=False),
                     right=Until(left=Bool(value=True), right=x)):
            return x if _is_boolean(x) else None
        case Or(left=l, right=r):
            a, b = _gf_recurrence(l), _gf_recurrence(r)
            if a is not None and b is not None:
                return Or(a, b)
    return None


def _and_conjuncts(f: Formula) -> list:
    match f:
        case And(left=l, right=r):
            return _and_conjuncts(l) + _and_conjuncts(r)
    return [f]


def _split_fairness(f: Formula) -> tuple[Formula, list]:
    """Split an NNF formula into a tableau part and loop conditions.

    Top-level conjuncts of shape ``⋁ G F (boolean)`` are prefix
    independent and, on a lasso, equivalent to "the loop contains a node
    satisfying one of the disjuncts" (a stuttering loop node carries its
    final marking and no transition atom, matching the stutter-extended
    trace). They come back as boolean node conditions; the conjunction of
    the rest is what the tableau still has to check.
    """
    residual, conditions = [], []
    for c in _and_conjuncts(f):
        x = _gf_recurrence(c)
        if x is None:
            residual.append(c)
        else:
            conditions.append(x)
    return logic.conj(residual) if residual else Bool(True), conditions


# -- LTL model checking ---------------------------------------------------


def check_ltl(net: PetriNetWithTransits, phi: Formula,
              cap: int | None = None, fairness: tuple = ()) -> Verdict:
    """Does every run of the net (finite ones stutter-extended) model phi?

    ``fairness`` restricts attention to runs satisfying ``G F f`` for
    every boolean formula f in it. Raises CapExceeded if the marking
    graph outgrows ``cap``.
    """
    graph = marking_graph(net, cap)
    transitions = frozenset(net.transitions)
    negated = fold_transition_sets(logic.negate(phi), transitions)
    residual, conditions = _split_fairness(negated)
    conditions = [fold_transition_sets(logic.nnf(f), transitions)
                  for f in fairness] + conditions
    tab = build_tableau_nba(residual)

    succ_memo: dict = {}

    def psucc(pnode):
        if pnode in succ_memo:
            return succ_memo[pnode]
        gnode, q = pnode
        sa = MarkingGraph.atoms(gnode)
        out = []
        for cst, q2 in tab.successors(q):
            if _matches(cst, sa):
                for label, gnode2 in graph.successors(gnode):
                    out.append((label, (gnode2, q2)))
        succ_memo[pnode] = out
        return out

    roots = [(graph.initial, q0) for q0 in tab.initial]
    if conditions:
        found = _scc_search(roots, psucc, tab.accepting, conditions)
    else:
        found = _ndfs_search(roots, psucc, tab.accepting)
    if found is None:
        return Verdict("holds")
    stem, loop = found
    witness = _labels_to_lasso(stem, loop)
    _validate_witness(net, witness)
    return Verdict("violated", witness=witness)


def _ndfs_search(roots: list, psucc, accepting: frozenset):
    """Two-color nested DFS for a cycle through an accepting state.

    Returns (stem labels, loop labels) of a counterexample, or None.
    """
    blue: set = set()
    red: set = set()

    def red_search(seed, path_index):
        """DFS from the accepting seed for any node on the blue path."""
        parent: dict = {seed: None}
        stack = [seed]
        while stack:
            node = stack.pop()
            for label, nxt in psucc(node):
                if nxt in path_index:
                    loop_tail = [(label, nxt)]
                    cur = node
                    while parent[cur] is not None:
                        prev, lab = parent[cur]
                        loop_tail.append((lab, cur))
                        cur = prev
                    loop_tail.reverse()
                    return nxt, [lab for lab, _ in loop_tail]
                if nxt not in red and nxt not in parent:
                    parent[nxt] = (node, label)
                    stack.append(nxt)
        red.update(parent)
        return None

    for root in roots:
        if root in blue:
            continue
        stack = [(root, iter(psucc(root)))]
        path_nodes = [root]
        path_labels: list = [None]
        path_index = {root: 0}
        while stack:
            node, it = stack[-1]
            advanced = False
            for label, nxt in it:
                if nxt not in blue and nxt not in path_index:
                    stack.append((nxt, iter(psucc(nxt))))
                    path_index[nxt] = len(path_nodes)
                    path_nodes.append(nxt)
                    path_labels.append(label)
                    advanced = True
                    break
            if advanced:
                continue
            if node[1] in accepting:
                hit = red_search(node, path_index)
                if hit is not None:
                    entry, red_labels = hit
                    cut = path_index[entry]
                    stem = [l for l in path_labels[1:cut + 1]]
                    loop = [l for l in path_labels[cut + 1:]] + red_labels
                    return stem, loop
            stack.pop()
            blue.add(node)
            path_index.pop(node)
            path_nodes.pop()
            path_labels.pop()
    return None


def _scc_search(roots: list, psucc, accepting: frozenset, conditions: list):
    """Emptiness under loop conditions, by component decomposition.

    A counterexample lasso exists exactly when some reachable strongly
    connected component contains a cycle, a product node with an
    accepting tableau state, and for every condition a node whose
    marking-graph atoms satisfy it: within one component any choice of
    nodes can be joined into a single cycle. Components are examined as
    the decomposition emits them; the first hit is stitched into (stem
    labels, loop labels).
    """

    def holds(cond, pnode):
        return _eval_bool(cond, MarkingGraph.atoms(pnode[0]))

    def qualify(comp):
        if len(comp) == 1 and all(nxt != comp[0]
                                  for _, nxt in psucc(comp[0])):
            return None
        if all(node[1] not in accepting for node in comp):
            return None
        picks = []
        for cond in conditions:
            pick = next((n for n in comp if holds(cond, n)), None)
            if pick is None:
                return None
            picks.append(pick)
        anchor = next(n for n in comp if n[1] in accepting)
        return anchor, picks

    # Tarjan, iterative; components come out sinks first.
    index: dict = {}
    low: dict = {}
    onstack: set = set()
    comp_stack: list = []
    counter = 0
    for root in roots:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            node, ei = work.pop()
            if ei == 0:
                index[node] = low[node] = counter
                counter += 1
                comp_stack.append(node)
                onstack.add(node)
            edges = psucc(node)
            descend = False
            while ei < len(edges):
                nxt = edges[ei][1]
                ei += 1
                if nxt not in index:
                    work.append((node, ei))
                    work.append((nxt, 0))
                    descend = True
                    break
                if nxt in onstack and index[nxt] < low[node]:
                    low[node] = index[nxt]
            if descend:
                continue
            if low[node] == index[node]:
                comp = []
                while True:
                    member = comp_stack.pop()
                    onstack.discard(member)
                    comp.append(member)
                    if member == node:
                        break
                hit = qualify(comp)
                if hit is not None:
                    anchor, picks = hit
                    return _stitch_lasso(roots, psucc, set(comp),
                                         anchor, picks)
            if work:
                parent = work[-1][0]
                if low[node] < low[parent]:
                    low[parent] = low[node]
    return None


def _bfs_labels(starts: list, goal, psucc, allowed: frozenset | None,
                skip_trivial: bool) -> list:
    """Label path from one of ``starts`` to ``goal``; [] when allowed and
    trivial. ``skip_trivial`` forces at least one edge."""
    if not skip_trivial and goal in starts:
        return []
    parent: dict = {}
    queue = list(starts)
    for s in starts:
        parent.setdefault(s, None)
    head = 0
    while head < len(queue):
        node = queue[head]
        head += 1
        for label, nxt in psucc(node):
            if allowed is not None and nxt not in allowed:
                continue
            if nxt == goal:
                labels = [label]
                cur = node
                while parent[cur] is not None:
                    prev, lab = parent[cur]
                    labels.append(lab)
                    cur = prev
                labels.reverse()
                return labels
            if nxt not in parent:
                parent[nxt] = (node, label)
                queue.append(nxt)
    raise VerificationBug("no path to %r inside the component" % (goal,))


def _stitch_lasso(roots: list, psucc, members: set, anchor, picks: list):
    """Stem to the anchor, then a loop through every picked node."""
    stem = _bfs_labels(roots, anchor, psucc, None, skip_trivial=False)
    loop: list = []
    at = anchor
    for target in picks:
        if target != at:
            loop.extend(_bfs_labels([at], target, psucc, frozenset(members),
                                    skip_trivial=False))
            at = target
    loop.extend(_bfs_labels([at], anchor, psucc, frozenset(members),
                            skip_trivial=at == anchor and not loop))
    return stem, loop


def _labels_to_lasso(stem: list, loop: list) -> LassoFiringSequence:
    """Product edge labels (transitions and stop steps) to a firing lasso."""
    if all(l is None for l in loop):
        return LassoFiringSequence(
            tuple(l for l in stem if l is not None), ())
    assert all(l is not None for l in loop), "stop edges cannot leave"
    return LassoFiringSequence(
        tuple(l for l in stem if l is not None), tuple(loop))


def _validate_witness(net, witness: LassoFiringSequence) -> None:
    try:
        replay_lasso(net, witness)
    except Exception as exc:
        raise VerificationBug(
            "witness %r does not replay: %s" % (witness, exc)) from exc


# -- the full pipeline -----------------------------------------------------


def _split_flow_premise(psi: Formula) -> tuple[Formula, list, Formula | None]:
    """Lift a fairness antecedent out of ``premise -> body``.

    When the antecedent is flow-free and some of its conjuncts are
    recurrence shapes (``⋁ G F boolean`` in NNF, the form of the fairness
    assumption templates), those conjuncts hold on a composed run exactly
    when the loop revisits original-run positions satisfying them, so
    they can skip the formula rewrite and ride as side conditions.
    Returns (formula still to rewrite, condition booleans over original
    atoms, conjunction of the lifted conjuncts for witness validation).
    """
    match psi:
        case Or(left=Not(sub=premise), right=body) if (
                not logic.collect_flow_subformulas(premise)
                and logic.collect_flow_subformulas(body)):
            conditions, lifted, kept = [], [], []
            for c in _and_conjuncts(logic.nnf(premise)):
                x = _gf_recurrence(c)
                if x is None:
                    kept.append(c)
                else:
                    conditions.append(x)
                    lifted.append(c)
            if not conditions:
                return psi, [], None
            reduced = logic.implies(logic.conj(kept), body) if kept else body
            return reduced, conditions, logic.conj(lifted)
    return psi, [], None


def check_flow_ctlstar(net: PetriNetWithTransits, psi: Formula,
                       state_cap: int | None = None) -> Verdict:
    """Model-check a formula with flow subformulas against the net.

    Pipeline: per flow subformula build the chain Kripke structure, the
    alternating automaton of the negated subformula, its product, and the
    Büchi automaton; compose the net with one subnet per automaton;
    rewrite the formula; check the resulting LTL property; project a
    violation back onto the original net.
    """
    psi, premise_conditions, premise = _split_flow_premise(psi)
    flows = logic.collect_flow_subformulas(psi)
    artifacts: dict = {"kripkes": [], "nbas": []}
    nbas = []
    for flow_formula, ap in flows:
        kripke = build_chain_kripke(net, ap)
        directions = max(
            (len(row) for per_place in kripke.rows.values()
             for row in per_place.values()), default=1)
        ata = ctlstar_to_ata(logic.negate(flow_formula), directions)
        awa = product_awa(ata, kripke)
        nba = eliminate_alternation(awa)
        artifacts["kripkes"].append(kripke)
        artifacts["nbas"].append(nba)
        nbas.append(nba)

    composed, meta = compose_mc_net(net, nbas)
    phi = transform_formula(psi, meta)
    artifacts["composed"] = composed
    artifacts["meta"] = meta
    artifacts["ltl"] = phi

    # Premise conditions speak about positions of the original run; on the
    # composed net those are the nodes where no foreign transition has
    # just fired (an original one, or none at all on initial, stopped and
    # post-stop nodes).
    foreign = frozenset(composed.transitions) \
        - frozenset(meta.original_transitions)
    fairness = tuple(And(Not(Atom(_encode(foreign))), x)
                     for x in premise_conditions)

    try:
        verdict = check_ltl(composed, phi, cap=state_cap, fairness=fairness)
    except CapExceeded as exc:
        return Verdict("inconclusive", reason=str(exc), artifacts=artifacts)

    if verdict.status == "violated":
        witness = _project_witness(meta, verdict.witness)
        _validate_witness(net, witness)
        if premise is not None:
            trace = replay_lasso(net, witness)
            if not eval_ltl_on_lasso(premise, trace):
                raise VerificationBug(
                    "witness %r does not satisfy the fairness premise"
                    % (witness,))
        return Verdict("violated", witness=witness, artifacts=artifacts)
    verdict.artifacts = artifacts
    return verdict


def _project_witness(meta, lasso: LassoFiringSequence) -> LassoFiringSequence:
    """Drop subnet and mode transitions from a composed-net lasso."""
    originals = set(meta.original_transitions)
    stem = tuple(t for t in lasso.stem if t in originals)
    loop = tuple(t for t in lasso.loop if t in originals)
    if not loop:
        return LassoFiringSequence(stem, ())
    return LassoFiringSequence(stem, loop)
