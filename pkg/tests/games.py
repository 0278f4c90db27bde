"""Small hand-built structures shared by the tests."""

import copy
import itertools

from strathyper.cgs import Cgs, ObservationFamily, validate_cgs
from strathyper.encode_h2s import build_eq
from strathyper.ilar import id_ap, make_il_ar
from strathyper.ltl import Atom, globally, implies
from strathyper.syntax import SAnd, SBind, SExists, SForall, SPath


def _doc(states, initial, agents, actions, aps, trans, observations):
    return {"states": [{"id": s, "labels": list(lab)} for s, lab in states],
            "initial": initial, "agents": agents, "actions": actions, "aps": aps,
            "transitions": [{"from": s, "profile": dict(zip(agents, prof)), "to": t}
                            for (s, prof), t in trans.items()],
            "observations": observations}


def reach_doc():
    """``a2`` sends the play to ``s1`` or ``s2``; ``a1`` must answer ``l`` resp. ``r``."""
    trans = {}
    for x in "lr":
        for y in "lr":
            trans[("s0", (x, y))] = "s1" if y == "l" else "s2"
            trans[("s1", (x, y))] = "g" if x == "l" else "s0"
            trans[("s2", (x, y))] = "g" if x == "r" else "s0"
            trans[("g", (x, y))] = "g"
    states = [("s0", ""), ("s1", ""), ("s2", ""), ("g", ["goal"])]
    return _doc(states, "s0", ["a1", "a2"], ["l", "r"], ["goal"], trans,
                {"blind": [["s0", "s1", "s2", "g"]],
                 "full": [["s0"], ["s1"], ["s2"], ["g"]]})


def pennies_doc():
    """Matching pennies: ``a1`` wins iff the coins match."""
    trans = {}
    for x in "ht":
        for y in "ht":
            trans[("s", (x, y))] = "win" if x == y else "lose"
            trans[("win", (x, y))] = "win"
            trans[("lose", (x, y))] = "lose"
    states = [("s", ""), ("win", ["win"]), ("lose", "")]
    return _doc(states, "s", ["a1", "a2"], ["h", "t"], ["win"], trans,
                {"full": [["s"], ["win"], ["lose"]]})


def load(doc):
    return validate_cgs(copy.deepcopy(doc))


def make_il(g: Cgs) -> Cgs:
    """Tag every state with its own proposition."""
    tags = tuple(id_ap(s) for s in g.states)
    labels = {s: g.labels[s] | {id_ap(s)} for s in g.states}
    return Cgs(g.states, g.initial, g.agents, g.actions, g.aps + tags, g.transition, labels)


EXAMPLE = "exists x. exists y. forall z. [p1:(a1=x, a2=y); p2:(a1=z, a2=x)] G (a@p1 -> b@p2)"


def example_game():
    """Two-state game in IL/AR form with aps ``a`` and ``b``; ``s1`` follows agreement."""
    states = ("s0", "s1")
    trans = {(s, p): ("s1" if p[0] == p[1] else "s0")
             for s in states for p in itertools.product(("c0", "c1"), repeat=2)}
    labels = {"s0": frozenset({"a"}), "s1": frozenset({"b"})}
    g = Cgs(states, "s0", ("a1", "a2"), ("c0", "c1"), ("a", "b"), trans, labels)
    G, _, cert = make_il_ar(g, ObservationFamily((), {}))
    return G, cert


def expected_example(comp, cert):
    """Hand-written pruned translation of EXAMPLE: one eq for x, no unused copies."""
    eq = build_eq(comp, "x@p1", "x@p2", "p1", "p2", cert)
    body = SPath(globally(implies(Atom("a@p1"), Atom("b@p2"))))
    for agent, var in reversed([("a1@p1", "x@p1"), ("a2@p1", "y@p1"),
                                ("a1@p2", "z@p2"), ("a2@p2", "x@p2")]):
        body = SBind(agent, var, body)
    out = SForall("z@p2", "o_p2", SAnd(eq, body))
    for var, obs in reversed([("x@p1", "o_p1"), ("x@p2", "o_p2"), ("y@p1", "o_p1")]):
        out = SExists(var, obs, out)
    return out
