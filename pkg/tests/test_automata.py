"""Automata layer: positive boolean formulas, the tree automaton for CTL*
state formulas, its word product with a chain Kripke structure, and the
breakpoint construction down to a plain Büchi automaton.

The load-bearing checks are differentials: the tableau against direct
evaluation of LTL on lassos, and the Büchi automaton produced by
eliminate_alternation against the alternating automaton's game semantics.
"""
import random

import pytest

from conftest import random_ltl, three_room_net
from transitmc.automata import (BuchiAutomaton, PBAtom, PBFalse, PBTrue,
                                awa_accepts, ctlstar_to_ata,
                                eliminate_alternation, ltl_to_nba,
                                minimal_models, pb_and, pb_atoms, pb_map,
                                pb_or, product_awa)
from transitmc.kripke import HASH, build_chain_kripke
from transitmc.logic import parse_ltl, parse_subformula
from transitmc.oracle import eval_ltl_on_lasso
from transitmc.nets import LassoFiringSequence, Trace


def test_pb_constructors_simplify():
    x, y = PBAtom("x"), PBAtom("y")
    assert pb_and([]) == PBTrue()
    assert pb_or([]) == PBFalse()
    assert pb_and([x]) == x
    assert pb_and([x, PBFalse()]) == PBFalse()
    assert pb_or([x, PBTrue()]) == PBTrue()
    assert set(pb_atoms(pb_and([x, pb_or([x, y])]))) == {"x", "y"}
    assert pb_map(x, str.upper) == PBAtom("X")


def test_minimal_models_are_an_antichain():
    x, y, z = PBAtom("x"), PBAtom("y"), PBAtom("z")
    pb = pb_or([pb_and([x, y]), x, pb_and([y, z])])
    models = minimal_models(pb)
    assert frozenset({"x"}) in models
    assert frozenset({"y", "z"}) in models
    for m1 in models:
        for m2 in models:
            assert m1 == m2 or not (m1 < m2)
    assert minimal_models(PBFalse()) == ()
    assert minimal_models(PBTrue()) == (frozenset(),)


def rooms_kripke(ap_names):
    net = three_room_net()
    return net, build_chain_kripke(net, frozenset(ap_names))


def random_word(rng, letters, max_len=12):
    total = rng.randint(2, max_len)
    stem_len = rng.randint(0, total - 1)
    word = [rng.choice(letters) for _ in range(total)]
    return tuple(word[:stem_len]), tuple(word[stem_len:])


@pytest.mark.parametrize("text,ap", [
    ("A G lab", {"lab"}),
    ("E F lab", {"lab"}),
    ("A (hall U lab)", {"hall", "lab"}),
    ("E (hall U (lab & E X lab))", {"hall", "lab"}),
    ("A F (lab & E X hall)", {"hall", "lab"}),
])
def test_nba_agrees_with_awa_game(text, ap):
    net, kripke = rooms_kripke(ap)
    phi = parse_subformula(text)
    directions = max((len(row)
                      for per_place in kripke.rows.values()
                      for row in per_place.values()), default=1)
    ata = ctlstar_to_ata(phi, directions)
    awa = product_awa(ata, kripke)
    nba = eliminate_alternation(awa)
    assert tuple(nba.letters) == tuple(kripke.letters)
    rng = random.Random(hash(text) & 0xFFFF)
    for _ in range(120):
        stem, loop = random_word(rng, list(kripke.letters), max_len=8)
        game = awa_accepts(awa, (stem, loop))
        assert nba.lasso_accepts(stem, loop) == game, (text, stem, loop)


def test_eliminated_nba_is_total():
    # a tracker embedded in the composed net may only skip letters while
    # parked, so every state needs a row for every letter; failed guesses
    # land in the absorbing reject state instead of losing the row
    net, kripke = rooms_kripke({"lab"})
    phi = parse_subformula("!(A G (E F lab))")
    directions = max((len(row)
                      for per_place in kripke.rows.values()
                      for row in per_place.values()), default=1)
    nba = eliminate_alternation(product_awa(
        ctlstar_to_ata(phi, directions), kripke))
    for s in nba.states:
        for letter in nba.letters:
            assert nba.successors(s, letter), (s, letter)
    assert "reject" in nba.states
    assert "reject" not in nba.accepting
    for letter in nba.letters:
        assert nba.successors("reject", letter) == ["reject"]


def test_awa_game_on_known_words():
    net, kripke = rooms_kripke({"lab", "kitchen"})
    phi = parse_subformula("A G !kitchen")  # never reach the kitchen
    directions = 2
    ata = ctlstar_to_ata(phi, directions)
    awa = product_awa(ata, kripke)
    # staying in the hall forever: the chain never enters the kitchen
    assert awa_accepts(awa, ((), ("enterHall",)))
    # the split transition sends one branch into the kitchen
    assert not awa_accepts(awa, (("hall_lk",), (HASH,)))
    # entering the lab and stuttering there is fine
    assert awa_accepts(awa, (("hall_lab",), (HASH,)))


def test_buchi_automaton_basics():
    nba = BuchiAutomaton(("a", "b"))
    for q in ("q0", "q1"):
        nba.add_state(q)
    nba.initial = ["q0"]
    nba.add_edge("q0", "a", "q0")
    nba.add_edge("q0", "b", "q1")
    nba.add_edge("q1", "b", "q1")
    nba.accepting = frozenset({"q1"})
    assert nba.lasso_accepts(("a",), ("b",))
    assert not nba.lasso_accepts((), ("a",))
    assert not nba.lasso_accepts(("b",), ("a",))  # no a-edge from q1
    text = nba.dump()
    assert "state q0 initial" in text
    assert "state q1 accepting" in text


def ltl_trace(stem, loop, n_atoms):
    """Interpret letter tuples (frozensets of atoms) as a trace."""
    states = tuple(frozenset(s) for s in stem + loop)
    return Trace(states, len(stem))


@pytest.mark.parametrize("seed", range(40))
def test_ltl_to_nba_matches_direct_evaluation(seed):
    rng = random.Random(seed * 7 + 1)
    phi = random_ltl(rng, ["a", "b"], rng.randint(1, 6))
    nba = ltl_to_nba(phi)
    alphabet = list(nba.letters)
    for _ in range(60):
        total = rng.randint(1, 6)
        stem_len = rng.randint(0, total - 1)
        word = [rng.choice(alphabet) for _ in range(total)]
        stem, loop = tuple(word[:stem_len]), tuple(word[stem_len:])
        trace = ltl_trace(stem, loop, 2)
        expected = eval_ltl_on_lasso(phi, trace)
        assert nba.lasso_accepts(stem, loop) == expected, (phi, stem, loop)


def test_ata_rejects_unknown_nodes():
    with pytest.raises(Exception):
        ctlstar_to_ata(parse_ltl("X a"), 1).delta("nonsense", frozenset(), 0)
