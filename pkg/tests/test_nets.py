import random

import pytest

from conftest import random_net
from transitmc.nets import (START, STOP, STOPPED, CapExceeded, InhibitorNet,
                            LassoFiringSequence, MarkingGraph, NetError,
                            PetriNetWithTransits, dump_net, enabled, fire,
                            marking_after, marking_graph, parse_net,
                            replay_lasso, validate_safe)


def tiny_net() -> PetriNetWithTransits:
    net = PetriNetWithTransits("tiny")
    net.add_place("a", init=True)
    net.add_place("b")
    net.add_transition("s")
    net.add_arc("a", "s")
    net.add_arc("s", "b")
    net.add_transit("s", START, "b")
    net.add_transition("t")
    net.add_arc("b", "t")
    net.add_arc("t", "a")
    net.add_transit("t", "b", "a")
    return net


def test_construction_rejects_duplicates_and_bad_arcs():
    net = PetriNetWithTransits()
    net.add_place("a")
    with pytest.raises(NetError):
        net.add_place("a")
    with pytest.raises(NetError):
        net.add_transition("a")
    net.add_transition("t")
    with pytest.raises(NetError):
        net.add_arc("t", "t")
    with pytest.raises(NetError):
        net.add_place(START)


def test_transits_must_follow_arcs():
    net = tiny_net()
    with pytest.raises(NetError):
        net.add_transit("s", "b", "b")  # b not in preset of s
    with pytest.raises(NetError):
        net.add_transit("t", "b", "b")  # b not in postset of t
    with pytest.raises(NetError):
        net.add_transit("u", "a", "b")  # no such transition


def test_firing_semantics():
    net = tiny_net()
    m0 = net.initial_marking
    assert m0 == frozenset({"a"})
    assert enabled(net, m0) == {"s"}
    m1 = fire(net, m0, "s")
    assert m1 == frozenset({"b"})
    with pytest.raises(NetError):
        fire(net, m0, "t")
    assert fire(net, m1, "t") == m0
    assert marking_after(net, ("s", "t", "s")) == m1


def test_inhibitor_blocks_when_marked():
    net = InhibitorNet()
    net.add_place("a", init=True)
    net.add_place("block", init=True)
    net.add_place("done")
    net.add_transition("t")
    net.add_arc("a", "t")
    net.add_arc("t", "done")
    net.add_inhibitor("block", "t")
    net.add_transition("clear")
    net.add_arc("block", "clear")
    assert enabled(net, net.initial_marking) == {"clear"}
    m1 = fire(net, net.initial_marking, "clear")
    assert enabled(net, m1) == {"t"}
    assert net.inhibitor_set("t") == frozenset({"block"})


def test_structure_queries_are_sorted():
    net = PetriNetWithTransits()
    for p in ("z", "y", "x"):
        net.add_place(p, init=True)
    net.add_transition("t")
    for p in ("z", "y", "x"):
        net.add_arc(p, "t")
        net.add_arc("t", p)
    net.add_transit("t", "x", "z")
    net.add_transit("t", "x", "y")
    net.add_transit("t", START, "x")
    assert net.transit_targets("x", "t") == ("y", "z")
    assert net.chain_starts() == [("t", "x")]
    assert net.transit_triples() == [
        ("t", START, "x"), ("t", "x", "y"), ("t", "x", "z")]


def test_validate_safe_flags_double_marking():
    net = PetriNetWithTransits()
    net.add_place("a", init=True)
    net.add_place("b", init=True)
    net.add_transition("t")
    net.add_arc("a", "t")
    net.add_arc("t", "b")
    report = validate_safe(net)
    assert not report
    assert report.status == "violation"
    assert report.transition == "t"
    assert validate_safe(tiny_net())


def test_validate_safe_cap():
    # a chain of 12 independently markable places explodes combinatorially
    net = PetriNetWithTransits()
    for i in range(12):
        net.add_place("p%d" % i, init=i == 0)
        net.add_place("q%d" % i)
        net.add_transition("t%d" % i)
        net.add_arc("p%d" % i, "t%d" % i)
        net.add_arc("t%d" % i, "q%d" % i)
    for i in range(11):
        net.add_arc("t%d" % i, "p%d" % (i + 1))
    report = validate_safe(net, exploration_cap=5)
    assert report.status in ("safe", "cap_exceeded")


def test_marking_graph_stop_closure():
    net = tiny_net()
    graph = marking_graph(net)
    # two live markings, each with a live node per ingoing transition and
    # one stopped node: {a}/None, {b}/s, {a}/t, stopped {a}, stopped {b}
    assert len(graph.nodes) == 5
    stopped = [n for n in graph.nodes if n.ingoing == STOPPED]
    assert len(stopped) == 2
    for node in stopped:
        assert graph.successors(node) == [(STOP, node)]
    live = [n for n in graph.nodes if n.ingoing != STOPPED]
    for node in live:
        labels = [l for l, _ in graph.successors(node)]
        assert labels.count(STOP) == 1
        assert all(l == STOP or l in net.pre for l in labels)


def test_marking_graph_atoms_and_cap():
    net = tiny_net()
    graph = marking_graph(net)
    by_ingoing = {n.ingoing: n for n in graph.nodes}
    assert MarkingGraph.atoms(by_ingoing[None]) == frozenset({"a"})
    assert MarkingGraph.atoms(by_ingoing["s"]) == frozenset({"b", "s"})
    assert MarkingGraph.atoms(by_ingoing[STOPPED]) == by_ingoing[STOPPED].marking
    with pytest.raises(CapExceeded):
        marking_graph(net, cap=2)


def test_replay_stopped_lasso():
    net = tiny_net()
    trace = replay_lasso(net, LassoFiringSequence(("s",), ()))
    assert trace.loop_start == len(trace.states) - 1
    assert trace.states[0] == frozenset({"a"})
    assert trace.states[1] == frozenset({"b", "s"})
    assert trace.states[2] == frozenset({"b"})  # stutter drops the transition
    # the stutter state repeats forever
    assert trace.state(17) == frozenset({"b"})
    assert trace.next_position(2) == 2


def test_replay_looping_lasso():
    net = tiny_net()
    trace = replay_lasso(net, LassoFiringSequence((), ("s", "t")))
    assert trace.loop_start == 1
    assert [trace.state(i) for i in range(3)] == [
        frozenset({"a"}), frozenset({"b", "s"}), frozenset({"a", "t"})]
    assert trace.state(3) == trace.state(1)
    with pytest.raises(NetError):
        replay_lasso(net, LassoFiringSequence((), ("s",)))
    with pytest.raises(NetError):
        replay_lasso(net, LassoFiringSequence(("t",), ()))


def test_lasso_helpers():
    lasso = LassoFiringSequence(("s",), ("t", "s"))
    assert not lasso.stopped
    assert lasso.steps() == ("s", "t", "s")
    assert LassoFiringSequence((), ()).stopped


def test_parse_dump_roundtrip(rooms):
    text = dump_net(rooms)
    again = parse_net(text, name=rooms.name)
    assert again.places == rooms.places
    assert again.transitions == rooms.transitions
    assert again.pre == rooms.pre
    assert again.post == rooms.post
    assert again.transits == rooms.transits
    assert dump_net(again) == text


def test_parse_inhibitor_net():
    text = "\n".join([
        "format-version 1",
        "place a init",
        "place b",
        "transition t",
        "arc a -> t",
        "arc t -> b",
        "inhibit b -o t",
    ])
    net = parse_net(text)
    assert isinstance(net, InhibitorNet)
    assert net.inhibitor_set("t") == frozenset({"b"})
    assert "inhibit b -o t" in dump_net(net)


def test_parse_errors_carry_the_line():
    with pytest.raises(NetError, match="frobnicate"):
        parse_net("frobnicate a -> b")
    with pytest.raises(NetError, match="arc needs"):
        parse_net("place a\ntransition t\narc a t")


def test_random_nets_roundtrip_and_stay_safe():
    rng = random.Random(11)
    for _ in range(25):
        net = random_net(rng)
        assert validate_safe(net)
        again = parse_net(dump_net(net))
        assert again.transits == net.transits
        assert again.places == net.places
