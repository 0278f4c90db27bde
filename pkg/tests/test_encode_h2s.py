import itertools
import random

import pytest

from canon import canonical
from games import EXAMPLE, example_game, expected_example, load, reach_doc
from strathyper.cgs import CgsError
from strathyper.checker import StrategyClass, check_hypersl, check_slii
from strathyper.encode_h2s import (DROP_EQ_CONJUNCT, WRONG_PATH_ATOM, measure_translation,
                                   self_compose, size_report_h2s, translate_hypersl)
from strathyper.generate import random_hypersl, random_instance
from strathyper.ilar import make_il_ar
from strathyper.syntax import SBind, iter_state, parse_hypersl

HORIZON2 = StrategyClass(2, "horizon")


def test_self_composition_counts():
    g, f = load(reach_doc())
    for m in (1, 2, 3):
        comp = self_compose(g, [f"p{i}" for i in range(m)])
        n = len(g.states)
        assert len(comp.product.states) == n ** m
        assert len(comp.product.agents) == len(g.agents) * m
        assert len(comp.product.aps) == len(g.aps) * m
        for o in comp.family.observations:
            blocks = comp.family.partition[o]
            assert len(blocks) == n and {len(b) for b in blocks} == {n ** (m - 1)}


def test_self_composition_steps_each_copy():
    g, f = load(reach_doc())
    comp = self_compose(g, ["p1", "p2"])
    assert comp.product.initial == comp.product.states[0]
    for t in comp.product.states:
        for prof in itertools.islice(comp.product.profiles(), 5):
            s1, s2 = comp.state_map[t]
            nxt = comp.state_map[comp.product.step(t, prof)]
            assert nxt == (g.step(s1, prof[:2]), g.step(s2, prof[2:]))


def test_self_compose_errors():
    g, f = load(reach_doc())
    with pytest.raises(CgsError):
        self_compose(g, [])
    with pytest.raises(CgsError):
        self_compose(g, ["p", "p"])


def test_example_pruned_matches_displayed_formula():
    G, cert = example_game()
    phi = parse_hypersl(EXAMPLE, G.agents)
    comp, out = translate_hypersl(phi, G, prune=True, cert=cert)
    assert canonical(out) == canonical(expected_example(comp, cert))
    assert measure_translation(out)["eq_constraints"] == [1, 0, 0]


def test_unpruned_counts():
    G, cert = example_game()
    phi = parse_hypersl(EXAMPLE, G.agents)
    comp, out = translate_hypersl(phi, G, prune=False, cert=cert)
    m = measure_translation(out)
    assert m["eq_constraints"] == [4, 4, 4]
    assert m["body_bindings"] == [2 * 2]


def test_filler_binds_every_composite_agent():
    G, cert = example_game()
    phi = parse_hypersl("forall x. [p2:(a1=x, a2=x)] F a@p2", G.agents)
    comp, out = translate_hypersl(phi, G, prune=False, cert=cert, pathvars=["p1", "p2"])
    binds = {f.agent for f in iter_state(out) if isinstance(f, SBind)
             and not f.var.startswith("y:")}
    assert binds == set(comp.product.agents)


def test_mutations_change_the_output():
    G, cert = example_game()
    phi = parse_hypersl(EXAMPLE, G.agents)
    _, base = translate_hypersl(phi, G, prune=True, cert=cert)
    _, dropped = translate_hypersl(phi, G, prune=True, cert=cert, mutation=DROP_EQ_CONJUNCT)
    _, moved = translate_hypersl(phi, G, prune=True, cert=cert, mutation=WRONG_PATH_ATOM)
    assert measure_translation(dropped)["eq_constraints"] == [0, 0, 0]
    assert canonical(moved) != canonical(base)
    with pytest.raises(ValueError):
        translate_hypersl(phi, G, cert=cert, mutation="nope")


def test_requires_il_ar():
    g, f = load(reach_doc())
    with pytest.raises(CgsError, match="IL/AR"):
        translate_hypersl(parse_hypersl("forall x. [p1:(a1=x, a2=x)] F goal@p1"), g)


def test_size_report_fields():
    G, cert = example_game()
    rep = size_report_h2s(parse_hypersl(EXAMPLE, G.agents), G, True, cert)
    assert all(v is not None for v in rep.values())
    assert rep["composition_states"] == len(G.states) ** 2
    assert rep["translation_nodes"] <= rep["bound"]


def test_example_semantics_agree():
    G, cert = example_game()
    phi = parse_hypersl(EXAMPLE, G.agents)
    comp, out = translate_hypersl(phi, G, prune=True, cert=cert)
    assert check_hypersl(G, phi, HORIZON2) == check_slii(comp.product, comp.family, out, HORIZON2)


@pytest.mark.parametrize("prune", [True, False])
@pytest.mark.parametrize("seed", range(6))
def test_theorem_two_small(seed, prune):
    rng = random.Random(seed)
    g, f = random_instance(seed, states=2, agents=1)
    G, F, cert = make_il_ar(g, f)
    phi = random_hypersl(rng, G, qdepth=1)
    comp, out = translate_hypersl(phi, G, prune=prune, cert=cert)
    assert check_hypersl(G, phi, HORIZON2) == check_slii(comp.product, comp.family, out, HORIZON2)
