"""Bounded oracle: exhaustive lasso search with direct semantics.

This module shares no automata machinery with the engine. It enumerates
bounded firing lassos, evaluates the run part of a formula positionally
on the folded trace, and evaluates flow subformulas by building the
chain graph of each lasso and labeling it bottom-up with CTL satisfaction
sets. Chains follow the place-rebinding reading: a chain part at place p
advances with the next firing whose transits move p, silently skipping
firings that do not (including ones that consume the tracked token
without forwarding it); a place never moved again ends in a stuttering
tail node.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import logic
from .logic import (And, Atom, Bool, Exists, Flow, Forall, Formula, Next,
                    Not, Or, Release, Until)
from .nets import (LassoFiringSequence, PetriNetWithTransits, Trace, enabled,
                   fire, replay_lasso)


class OracleUnsupported(ValueError):
    """The oracle only evaluates CTL flow subformulas."""


# -- lasso enumeration ----------------------------------------------------


def enumerate_lassos(net: PetriNetWithTransits, k: int):
    """Yield every lasso with |stem| + |loop| <= k, stopped ones first
    per prefix, in depth-first firing order. Proper lassos close when the
    prefix revisits the marking reached by one of its own prefixes; each
    (stem, loop) split of each prefix appears exactly once."""
    def walk(seq: tuple, markings: list):
        yield LassoFiringSequence(seq, ())
        for j in range(len(markings) - 1):
            if markings[j] == markings[-1]:
                yield LassoFiringSequence(seq[:j], seq[j:])
        if len(seq) == k:
            return
        for t in sorted(enabled(net, markings[-1])):
            yield from walk(seq + (t,), markings + [fire(net, markings[-1], t)])

    yield from walk((), [net.initial_marking])


# -- positional LTL evaluation ---------------------------------------------


def eval_ltl_on_lasso(phi: Formula, trace: Trace) -> bool:
    """Truth of phi at position 0 of the folded trace.

    Bottom-up per subformula: arrays over the trace's finite positions,
    with two backward passes to stabilize fixpoints around the loop.
    """
    positions = list(trace.positions())
    n = len(positions)
    nxt = [trace.next_position(i) for i in positions]
    memo: dict = {}

    def arr(f: Formula) -> list:
        key = id(f)
        if key in memo:
            return memo[key]
        match f:
            case Bool(value=v):
                out = [v] * n
            case Atom(name=a):
                out = [a in trace.state(i) for i in positions]
            case Not(sub=s):
                out = [not x for x in arr(s)]
            case And(left=l, right=r):
                la, ra = arr(l), arr(r)
                out = [x and y for x, y in zip(la, ra)]
            case Or(left=l, right=r):
                la, ra = arr(l), arr(r)
                out = [x or y for x, y in zip(la, ra)]
            case Next(sub=s):
                sa = arr(s)
                out = [sa[nxt[i]] for i in positions]
            case Until(left=l, right=r):
                la, ra = arr(l), arr(r)
                out = [False] * n
                for _ in range(2):
                    for i in reversed(positions):
                        out[i] = ra[i] or (la[i] and out[nxt[i]])
            case Release(left=l, right=r):
                la, ra = arr(l), arr(r)
                out = [True] * n
                for _ in range(2):
                    for i in reversed(positions):
                        out[i] = ra[i] and (la[i] or out[nxt[i]])
            case _:
                raise logic.FormulaError("not an LTL node: %r" % (f,))
        memo[key] = out
        return out

    return arr(phi)[0]


# -- chain graphs -----------------------------------------------------------


@dataclass(frozen=True)
class ChainNode:
    """A chain part: entered at a (folded) trace position, either moved
    there by a transition or stuttering at a dead place forever."""
    pos: int
    place: str
    trans: str | None  # None for the stuttering tail

    def atoms(self) -> frozenset:
        if self.trans is None:
            return frozenset({self.place})
        return frozenset({self.place, self.trans})


class ChainGraph:
    """All chain parts of one lasso, with shared folded suffixes."""

    def __init__(self, net, lasso: LassoFiringSequence):
        self.net = net
        self.lasso = lasso
        self.roots: list[ChainNode] = []
        self.succ: dict[ChainNode, tuple] = {}

    @property
    def nodes(self) -> list[ChainNode]:
        return list(self.succ)


def chain_graph(net: PetriNetWithTransits, lasso: LassoFiringSequence) -> ChainGraph:
    replay_lasso(net, lasso)  # validates enabledness and loop closure
    g = ChainGraph(net, lasso)
    seq = lasso.steps()
    stem_len = len(lasso.stem)
    total = len(seq)

    def fold(pos: int) -> int:
        if lasso.stopped or pos < total:
            return pos
        return stem_len + (pos - stem_len) % len(lasso.loop)

    def expand(node: ChainNode):
        if node in g.succ:
            return
        if node.trans is None:
            g.succ[node] = (node,)
            return
        g.succ[node] = ()  # placeholder against re-entry
        horizon = total if lasso.stopped else node.pos + total
        for j in range(node.pos, horizon):
            t = seq[fold(j)]
            targets = net.transit_targets(node.place, t)
            if targets:
                children = tuple(
                    ChainNode(fold(j + 1), q, t) for q in targets)
                g.succ[node] = children
                for child in children:
                    expand(child)
                return
        tail = ChainNode(fold(node.pos), node.place, None)
        g.succ[node] = (tail,)
        expand(tail)

    for j in range(total):
        t = seq[j]
        for src, tgt in sorted(net.transits[t]):
            if src == "START":
                root = ChainNode(fold(j + 1), tgt, t)
                if root not in g.roots:
                    g.roots.append(root)
                expand(root)
    return g


def occurrence_name(net: PetriNetWithTransits, lasso: LassoFiringSequence,
                    node: ChainNode) -> tuple[str, str]:
    """Decorate a (stopped-lasso) chain node with occurrence indices:
    the transition's firing count and the place's production count so
    far (initial tokens count as production 0)."""
    assert lasso.stopped, "occurrence indices need an unfolded run"
    seq = lasso.steps()
    place_idx = sum(1 for j in range(node.pos)
                    if node.place in net.post[seq[j]])
    if node.trans is None:
        return ("", "%s_%d" % (node.place, place_idx))
    trans_idx = sum(1 for j in range(node.pos - 1)
                    if seq[j] == node.trans)
    return ("%s_%d" % (node.trans, trans_idx),
            "%s_%d" % (node.place, place_idx))


def unfold_tree(g: ChainGraph, root: ChainNode, stop_at_tail: bool = True):
    """Unfold the shared chain graph into the root's tree, as nested
    (node, children) pairs; the stuttering tail is cut off by default."""

    def rec(node: ChainNode, guard: frozenset):
        children = []
        for child in g.succ[node]:
            if stop_at_tail and child.trans is None:
                continue
            if child in guard:  # folded loop: keep the back edge implicit
                continue
            children.append(rec(child, guard | {child}))
        return (node, tuple(children))

    return rec(root, frozenset({root}))


# -- CTL labeling -----------------------------------------------------------


def eval_ctl_on_chain_graph(phi: Formula, g: ChainGraph) -> frozenset:
    """Satisfaction set of a CTL state formula over the chain graph."""
    if not logic.is_ctl(phi):
        raise OracleUnsupported("flow subformula is not CTL: %s"
                                % logic.to_text(phi))
    nodes = g.nodes
    all_nodes = frozenset(nodes)
    preds: dict = {s: [] for s in nodes}
    for s in nodes:
        for d in g.succ[s]:
            preds[d].append(s)

    def backward_exists(target: frozenset) -> frozenset:
        """One-step EX pre-image of a node set."""
        return frozenset(s for s in nodes if any(d in target for d in g.succ[s]))

    def sat(f: Formula) -> frozenset:
        match f:
            case Bool(value=v):
                return all_nodes if v else frozenset()
            case Atom(name=a):
                return frozenset(s for s in nodes if a in s.atoms())
            case Not(sub=s):
                return all_nodes - sat(s)
            case And(left=l, right=r):
                return sat(l) & sat(r)
            case Or(left=l, right=r):
                return sat(l) | sat(r)
            case Exists(sub=Next(sub=s)):
                return backward_exists(sat(s))
            case Forall(sub=Next(sub=s)):
                target = sat(s)
                return frozenset(n for n in nodes
                                 if all(d in target for d in g.succ[n]))
            case Exists(sub=Until(left=l, right=r)):
                good, hold = sat(r), sat(l)
                out = set(good)
                queue = list(good)
                while queue:
                    d = queue.pop()
                    for s in preds[d]:
                        if s not in out and s in hold:
                            out.add(s)
                            queue.append(s)
                return frozenset(out)
            case Forall(sub=Until(left=l, right=r)):
                good, hold = sat(r), sat(l)
                out = set(good)
                changed = True
                while changed:
                    changed = False
                    for s in nodes:
                        if s in out or s not in hold:
                            continue
                        if all(d in out for d in g.succ[s]):
                            out.add(s)
                            changed = True
                return frozenset(out)
            case Exists(sub=Release(left=l, right=r)):
                must, release = sat(r), sat(l)
                out = set(must)
                changed = True
                while changed:
                    changed = False
                    for s in list(out):
                        if s in release:
                            continue
                        if not any(d in out for d in g.succ[s]):
                            out.discard(s)
                            changed = True
                return frozenset(out)
            case Forall(sub=Release(left=l, right=r)):
                must, release = sat(r), sat(l)
                out = set(must)
                changed = True
                while changed:
                    changed = False
                    for s in list(out):
                        if s in release:
                            continue
                        if not all(d in out for d in g.succ[s]):
                            out.discard(s)
                            changed = True
                return frozenset(out)
        raise OracleUnsupported("not a CTL construct: %s" % logic.to_text(f))

    return sat(phi)


# -- whole-formula oracle ---------------------------------------------------


@dataclass
class OracleResult:
    status: str  # "violated" or "holds-bounded"
    witness: LassoFiringSequence | None = None
    lassos_checked: int = 0


def _lasso_satisfies(net, psi: Formula, lasso: LassoFiringSequence) -> bool:
    """Evaluate the full formula on one lasso: flow subformulas become
    constants (all chain roots satisfy them or not), the rest is LTL."""
    trace = replay_lasso(net, lasso)
    graph_box: list = [None]

    def flows_to_bools(f: Formula) -> Formula:
        match f:
            case Flow(sub=s):
                if graph_box[0] is None:
                    graph_box[0] = chain_graph(net, lasso)
                graph = graph_box[0]
                satset = eval_ctl_on_chain_graph(s, graph)
                return Bool(all(r in satset for r in graph.roots))
            case And(left=l, right=r):
                return And(flows_to_bools(l), flows_to_bools(r))
            case Or(left=l, right=r):
                return Or(flows_to_bools(l), flows_to_bools(r))
            case Not(sub=s):
                return Not(flows_to_bools(s))
            case Next(sub=s):
                return Next(flows_to_bools(s))
            case Until(left=l, right=r):
                return Until(flows_to_bools(l), flows_to_bools(r))
            case Release(left=l, right=r):
                return Release(flows_to_bools(l), flows_to_bools(r))
            case _:
                return f

    return eval_ltl_on_lasso(flows_to_bools(psi), trace)


def oracle_check(net: PetriNetWithTransits, psi: Formula, k: int,
                 workers: int = 1) -> OracleResult:
    """Search all lassos up to total length k for a violation of psi."""
    checked = 0
    if workers <= 1:
        for lasso in enumerate_lassos(net, k):
            checked += 1
            if not _lasso_satisfies(net, psi, lasso):
                return OracleResult("violated", lasso, checked)
        return OracleResult("holds-bounded", None, checked)

    batch = max(64, workers * 16)
    source = enumerate_lassos(net, k)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while True:
            chunk = list(itertools.islice(source, batch))
            if not chunk:
                return OracleResult("holds-bounded", None, checked)
            results = list(pool.map(
                lambda l: _lasso_satisfies(net, psi, l), chunk))
            for lasso, ok in zip(chunk, results):
                checked += 1
                if not ok:
                    return OracleResult("violated", lasso, checked)
