"""Shared fixtures: the worked three-room example and random generators.

The three-room net is built by hand here, independently of the building
frontend, so the encoder tests have something external to compare against.
"""
from __future__ import annotations

import random

import pytest

from transitmc.logic import (And, Atom, Bool, Exists, Forall, Formula, Next,
                             Not, Or, Release, Until)
from transitmc.nets import START, PetriNetWithTransits, validate_safe

THREE_ROOM_LAYOUT = """\
format-version 1
# One hall connecting a lab and a kitchen; outer door into the hall.
room hall
room lab
room kitchen
door enterHall: outside -> hall
door leaveHall: hall -> outside
door hl: hall -> lab controllable
door hk: hall -> kitchen controllable
door lh: lab -> hall
door kh: kitchen -> hall
entry enterHall
exit leaveHall
update evening: open{} close{hk}
"""


def three_room_net() -> PetriNetWithTransits:
    """Hall/lab/kitchen net with door-mode places, built arc by arc.

    People are data tokens: every transition loops on the room places and
    moves the data via transits. enterHall starts a chain, leaveHall ends
    whatever chain currently sits in the hall, and evening closes the
    hall-to-kitchen door permanently.
    """
    net = PetriNetWithTransits("three-rooms")
    for p in ("hall", "lab", "kitchen", "o_hl", "o_hk"):
        net.add_place(p, init=True)
    net.add_place("c_hl")
    net.add_place("c_hk")

    def loops(t: str, *places: str) -> None:
        for p in places:
            net.add_arc(p, t)
            net.add_arc(t, p)

    net.add_transition("enterHall")
    loops("enterHall", "hall")
    net.add_transit("enterHall", START, "hall")
    net.add_transit("enterHall", "hall", "hall")

    net.add_transition("leaveHall")
    loops("leaveHall", "hall")

    net.add_transition("hall_lk")  # both inner doors open: may go either way
    loops("hall_lk", "hall", "lab", "kitchen", "o_hl", "o_hk")
    net.add_transit("hall_lk", "hall", "lab")
    net.add_transit("hall_lk", "hall", "kitchen")
    net.add_transit("hall_lk", "lab", "lab")
    net.add_transit("hall_lk", "kitchen", "kitchen")

    net.add_transition("hall_lab")  # kitchen door closed
    loops("hall_lab", "hall", "lab", "o_hl", "c_hk")
    net.add_transit("hall_lab", "hall", "lab")
    net.add_transit("hall_lab", "lab", "lab")

    net.add_transition("hall_kitchen")  # lab door closed
    loops("hall_kitchen", "hall", "kitchen", "c_hl", "o_hk")
    net.add_transit("hall_kitchen", "hall", "kitchen")
    net.add_transit("hall_kitchen", "kitchen", "kitchen")

    net.add_transition("lab_hall")
    loops("lab_hall", "hall", "lab")
    net.add_transit("lab_hall", "lab", "hall")
    net.add_transit("lab_hall", "hall", "hall")

    net.add_transition("kitchen_hall")
    loops("kitchen_hall", "hall", "kitchen")
    net.add_transit("kitchen_hall", "kitchen", "hall")
    net.add_transit("kitchen_hall", "hall", "hall")

    net.add_transition("evening")
    loops("evening", "hall", "lab", "kitchen")
    net.add_arc("o_hk", "evening")
    net.add_arc("evening", "c_hk")
    net.add_transit("evening", "hall", "hall")
    net.add_transit("evening", "lab", "lab")
    net.add_transit("evening", "kitchen", "kitchen")
    return net


@pytest.fixture
def rooms() -> PetriNetWithTransits:
    return three_room_net()


@pytest.fixture
def rooms_layout_text() -> str:
    return THREE_ROOM_LAYOUT


# -- random structures -----------------------------------------------------


def random_net(rng: random.Random, max_places: int = 4,
               max_transitions: int = 4) -> PetriNetWithTransits:
    """A small 1-safe net with transits (rejection-sampled for safety)."""
    while True:
        n_places = rng.randint(2, max_places)
        n_trans = rng.randint(1, max_transitions)
        net = PetriNetWithTransits("random")
        places = ["p%d" % i for i in range(n_places)]
        marked = rng.sample(places, rng.randint(1, n_places))
        for p in places:
            net.add_place(p, init=p in marked)
        for i in range(n_trans):
            t = "t%d" % i
            net.add_transition(t)
            pre = rng.sample(places, rng.randint(1, min(2, n_places)))
            post = rng.sample(places, rng.randint(1, min(2, n_places)))
            for p in pre:
                net.add_arc(p, t)
            for p in post:
                net.add_arc(t, p)
            for p in pre + [START]:
                for q in post:
                    if rng.random() < 0.4:
                        net.add_transit(t, p, q)
        if validate_safe(net).status == "safe":
            return net


def random_ltl(rng: random.Random, alphabet: list[str],
               budget: int) -> Formula:
    """Random LTL formula of size at most ``budget`` (size counts nodes)."""
    if budget <= 1:
        if rng.random() < 0.1:
            return Bool(rng.random() < 0.5)
        return Atom(rng.choice(alphabet))
    unary = [lambda s: Not(s), lambda s: Next(s)]
    binary = [And, Or, Until, Release]
    if rng.random() < 0.45 or budget < 3:
        sub = random_ltl(rng, alphabet, budget - 1)
        return rng.choice(unary)(sub)
    left_budget = rng.randint(1, budget - 2)
    left = random_ltl(rng, alphabet, left_budget)
    right = random_ltl(rng, alphabet, budget - 1 - left_budget)
    return rng.choice(binary)(left, right)


def random_ctl(rng: random.Random, alphabet: list[str],
               budget: int) -> Formula:
    """Random CTL state formula of size at most ``budget``."""
    if budget <= 2:
        f: Formula = Atom(rng.choice(alphabet))
        if budget == 2 and rng.random() < 0.3:
            f = Not(f)
        return f
    roll = rng.random()
    quant = Exists if rng.random() < 0.5 else Forall
    if roll < 0.45:
        # budget: quantifier + path operator + operands
        if rng.random() < 0.4 or budget < 5:
            return quant(Next(random_ctl(rng, alphabet, budget - 2)))
        op = Until if rng.random() < 0.5 else Release
        left_budget = rng.randint(1, budget - 3)
        left = random_ctl(rng, alphabet, left_budget)
        right = random_ctl(rng, alphabet, budget - 2 - left_budget)
        return quant(op(left, right))
    if roll < 0.6:
        return Not(random_ctl(rng, alphabet, budget - 1))
    op2 = And if rng.random() < 0.5 else Or
    left_budget = rng.randint(1, budget - 2)
    left = random_ctl(rng, alphabet, left_budget)
    right = random_ctl(rng, alphabet, budget - 1 - left_budget)
    return op2(left, right)
