import random

import pytest

from conftest import random_ltl, random_net, three_room_net
from transitmc.engine import (Verdict, check_flow_ctlstar, check_ltl,
                              fold_transition_sets)
from transitmc.frontend import assumption_template
from transitmc.logic import (Atom, Not, Or, atoms, finally_, globally,
                             implies, negate, parse_formula, parse_ltl,
                             to_text)
from transitmc.nets import CapExceeded, replay_lasso
from transitmc.oracle import _lasso_satisfies, oracle_check


def test_verdict_truthiness():
    assert Verdict("holds")
    assert not Verdict("violated")
    assert not Verdict("inconclusive")


def test_fold_transition_sets():
    ts = frozenset({"s", "t", "u"})
    f = parse_ltl("s | t | u")
    folded = fold_transition_sets(negate(negate(f)), ts)
    assert folded == Atom("@in:s|t|u")
    g = fold_transition_sets(negate(f), ts)
    assert g == Not(Atom("@in:s|t|u"))
    # place atoms do not fold
    h = fold_transition_sets(parse_ltl("s | lab"), ts)
    assert h == Or(Atom("s"), Atom("lab"))


def test_check_ltl_verdicts_on_the_rooms_net(rooms):
    assert check_ltl(rooms, parse_ltl("G hall")).status == "holds"
    assert check_ltl(rooms, parse_ltl("G !c_hk")).status == "violated"
    # evening can never fire twice
    assert check_ltl(
        rooms, parse_ltl("G (evening -> X G !evening)")).status == "holds"


def test_check_ltl_witnesses_replay_and_violate(rooms):
    for text in ("G !evening", "F G c_hk", "G (hall_lk -> F evening)"):
        phi = parse_ltl(text)
        verdict = check_ltl(rooms, phi)
        assert verdict.status == "violated"
        replay_lasso(rooms, verdict.witness)
        assert not _lasso_satisfies(rooms, phi, verdict.witness)


def test_check_ltl_cap():
    net = three_room_net()
    with pytest.raises(CapExceeded):
        check_ltl(net, parse_ltl("G hall"), cap=3)


def test_check_ltl_stop_steps_inside_witness(rooms):
    # the only way to violate is to stop: the stutter state has no
    # transition atom, so the stem alone carries the violation
    verdict = check_ltl(rooms, parse_ltl("F G (hall & X hall_lk)"))
    assert verdict.status == "violated"


@pytest.mark.parametrize("seed", range(25))
def test_check_ltl_differential_small(seed):
    rng = random.Random(seed + 400)
    net = random_net(rng, max_places=3, max_transitions=3)
    alphabet = list(net.places) + list(net.transitions)
    for _ in range(4):
        phi = random_ltl(rng, alphabet, rng.randint(1, 6))
        verdict = check_ltl(net, phi)
        result = oracle_check(net, phi, 6)
        if result.status == "violated":
            assert verdict.status == "violated", (phi, result.witness)
        if verdict.status == "violated":
            replay_lasso(net, verdict.witness)
            assert not _lasso_satisfies(net, phi, verdict.witness), phi


def test_check_ltl_splits_recurrence_goals(rooms):
    """Negating F G !t leaves G F t, which is handled as a loop condition
    instead of blowing up the tableau."""
    # hall_kitchen is never enabled (c_hl stays empty), so no loop fires it
    assert check_ltl(rooms, parse_ltl("F G !hall_kitchen")).status == "holds"
    phi = parse_ltl("F G !hall_lk")
    verdict = check_ltl(rooms, phi)
    assert verdict.status == "violated"
    assert "hall_lk" in verdict.witness.loop
    replay_lasso(rooms, verdict.witness)
    assert not _lasso_satisfies(rooms, phi, verdict.witness)


def test_check_ltl_fairness_argument_prunes_witnesses(rooms):
    phi = parse_ltl("G !c_hk")
    assert check_ltl(rooms, phi).status == "violated"
    # evening fires at most once per run, so no loop can keep firing it
    assert check_ltl(rooms, phi,
                     fairness=(Atom("evening"),)).status == "holds"
    verdict = check_ltl(rooms, phi, fairness=(Atom("leaveHall"),))
    assert verdict.status == "violated"
    assert "leaveHall" in verdict.witness.loop
    assert "evening" in verdict.witness.stem


@pytest.mark.parametrize("seed", range(12))
def test_check_ltl_differential_fairness_shapes(seed):
    """Implications whose negation is G F t ∧ ¬body go through the loop
    condition path; the oracle does not care either way."""
    rng = random.Random(seed + 900)
    net = random_net(rng, max_places=3, max_transitions=3)
    alphabet = list(net.places) + list(net.transitions)
    for _ in range(3):
        t = rng.choice(sorted(net.transitions))
        body = random_ltl(rng, alphabet, rng.randint(1, 4))
        phi = implies(globally(finally_(Atom(t))), body)
        verdict = check_ltl(net, phi)
        result = oracle_check(net, phi, 6)
        if result.status == "violated":
            assert verdict.status == "violated", (to_text(phi), result.witness)
        if verdict.status == "violated":
            replay_lasso(net, verdict.witness)
            assert not _lasso_satisfies(net, phi, verdict.witness), to_text(phi)


def test_check_flow_premise_unmeetable_by_any_loop(rooms):
    psi = parse_formula("(G F hall_kitchen) -> A A G E F lab")
    assert check_flow_ctlstar(rooms, psi).status == "holds"


def test_check_flow_premise_lifted_and_verified_on_witness(rooms):
    psi = parse_formula("(G F leaveHall) -> A A G E F lab")
    verdict = check_flow_ctlstar(rooms, psi)
    assert verdict.status == "violated"
    assert "leaveHall" in verdict.witness.loop
    replay_lasso(rooms, verdict.witness)
    assert not _lasso_satisfies(rooms, psi, verdict.witness)


def test_check_flow_fairness_for_doors(rooms):
    """With weak fairness for the five doors, every chain in the hall
    eventually gets a possible path to the lab."""
    doors = ("hall_lk", "hall_lab", "hall_kitchen", "lab_hall",
             "kitchen_hall")
    premise = " & ".join(
        "(%s)" % to_text(assumption_template("weak-fair", rooms, t))
        for t in doors)
    psi = parse_formula("(%s) -> A A G E F lab" % premise)
    assert check_flow_ctlstar(rooms, psi).status == "holds"


def test_check_flow_without_fairness_is_violated(rooms):
    verdict = check_flow_ctlstar(rooms, parse_formula("A A G E F lab"))
    assert verdict.status == "violated"
    replay_lasso(rooms, verdict.witness)
    assert not _lasso_satisfies(
        rooms, parse_formula("A A G E F lab"), verdict.witness)


def test_check_flow_ctlstar_artifacts(rooms):
    psi = parse_formula("A E F lab")
    verdict = check_flow_ctlstar(rooms, psi)
    assert verdict.status == "violated"
    arts = verdict.artifacts
    assert len(arts["kripkes"]) == 1
    assert len(arts["nbas"]) == 1
    assert arts["composed"].name.endswith("[mc]")
    assert "ltl" in arts and "meta" in arts
    # the witness is a firing sequence of the original net
    replay_lasso(rooms, verdict.witness)
    assert set(verdict.witness.steps()) <= set(rooms.transitions)


def test_check_flow_ctlstar_state_cap(rooms):
    verdict = check_flow_ctlstar(rooms, parse_formula("A E F lab"),
                                 state_cap=10)
    assert verdict.status == "inconclusive"
    assert verdict.reason
    assert "kripkes" in verdict.artifacts


def test_check_flow_ctlstar_pure_ltl_formula(rooms):
    # no flow subformulas: the pipeline degenerates to plain LTL checking
    verdict = check_flow_ctlstar(rooms, parse_formula("G hall"))
    assert verdict.status == "holds"
    assert verdict.artifacts["nbas"] == []
