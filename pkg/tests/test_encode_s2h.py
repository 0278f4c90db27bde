import random

import pytest

from games import load, make_il, reach_doc
from oracles import lasso_eval
from strathyper.cgs import CgsError
from strathyper.checker import StrategyClass, check_hypersl, check_slii
from strathyper.encode_s2h import (DROP_II_EXISTS, PATH_1, PATH_2, build_ii, build_ind,
                                   size_report_s2h, translate_slii)
from strathyper.generate import random_instance, random_slii
from strathyper.ilar import make_il_ar
from strathyper.syntax import (FormulaError, HAnd, HBody, HExists, HForall, HOr, iter_state,
                               parse_slii, quantifier_count)

HORIZON2 = StrategyClass(2, "horizon")


def ind_holds(g, ind, s, t):
    letter = frozenset({(a, PATH_1) for a in g.labels[s]} | {(a, PATH_2) for a in g.labels[t]})
    return lasso_eval(ind, (), (letter,))


@pytest.mark.parametrize("seed", range(10))
def test_ind_is_the_observation_relation(seed):
    g, f = random_instance(seed, states=4, observations=3)
    g = make_il(g)
    for o in f.observations:
        ind = build_ind(g, f, o)
        for s in g.states:
            for t in g.states:
                assert ind_holds(g, ind, s, t) == f.related(o, s, t)


def test_ind_needs_injective_labels():
    g, f = load(reach_doc())
    with pytest.raises(CgsError, match="injectively"):
        build_ind(g, f, "blind")


def test_ii_shape():
    g, f = load(reach_doc())
    G, F, cert = make_il_ar(g, f)
    ii = build_ii(G, F, "blind", "x", cert)
    prefix = 0
    while isinstance(ii, HForall):
        prefix += 1
        ii = ii.body
    assert prefix == 2 * len(G.agents)
    bodies = [b for b in iter_state(ii) if isinstance(b, HBody)]
    assert len(bodies) == len(G.agents)
    for i, body in zip(G.agents, bodies):
        for _, prof in body.bindings:
            assert dict(prof)[i] == "x"


def test_translation_shape():
    g, f = load(reach_doc())
    G, F, cert = make_il_ar(g, f)
    phi = parse_slii("exists x:blind. forall y:full. bind a1 x. bind a2 y. F goal")
    out = translate_slii(phi, G, F, cert)
    assert isinstance(out, HExists) and isinstance(out.body, HAnd)
    assert isinstance(out.body.right, HForall) and isinstance(out.body.right.body, HOr)
    assert quantifier_count(out) == 2 + 2 * (2 * len(G.agents))
    mutated = translate_slii(phi, G, F, cert, mutation=DROP_II_EXISTS)
    assert isinstance(mutated.body, HForall)


def test_requires_il_ar():
    g, f = load(reach_doc())
    phi = parse_slii("exists x:blind. bind a1 x. bind a2 x. F goal")
    with pytest.raises(CgsError, match="IL/AR"):
        translate_slii(phi, g, f)


def test_generated_names_do_not_capture():
    g, f = load(reach_doc())
    G, F, cert = make_il_ar(g, f)
    phi = parse_slii('exists "y:a1#1":blind. bind a1 "y:a1#1". bind a2 "y:a1#1". F goal')
    with pytest.raises(FormulaError, match="collide"):
        translate_slii(phi, G, F, cert)


def test_unknown_mutation():
    g, f = load(reach_doc())
    G, F, cert = make_il_ar(g, f)
    with pytest.raises(ValueError):
        translate_slii(parse_slii("exists x:blind. bind a1 x. bind a2 x. F goal"), G, F, cert,
                       mutation="nope")


def test_reach_game_theorem_and_mutation():
    g, f = load(reach_doc())
    G, F, cert = make_il_ar(g, f)
    phi = parse_slii("exists x:blind. forall y:blind. bind a1 x. bind a2 y. F goal")
    assert check_slii(G, F, phi, HORIZON2) is False
    assert check_hypersl(G, translate_slii(phi, G, F, cert), HORIZON2) is False
    mutated = translate_slii(phi, G, F, cert, mutation=DROP_II_EXISTS)
    assert check_hypersl(G, mutated, HORIZON2) is True


def test_size_report():
    g, f = load(reach_doc())
    G, F, cert = make_il_ar(g, f)
    phi = parse_slii("exists x:blind. bind a1 x. bind a2 x. F goal")
    rep = size_report_s2h(phi, G, F, cert)
    assert all(v is not None for v in rep.values())
    assert rep["observations"]["blind"]["relation_pairs"] == len(G.states) ** 2
    assert rep["observations"]["blind"]["ind_nodes"] > 0
    assert rep["translation_nodes"] <= 4 * rep["bound"]


@pytest.mark.parametrize("seed", range(15))
def test_theorem_one_small_pool(seed):
    rng = random.Random(seed)
    g, f = random_instance(seed, states=2, agents=rng.randint(1, 2))
    G, F, cert = make_il_ar(g, f)
    phi = random_slii(rng, g, F)
    assert check_slii(G, F, phi, HORIZON2) == check_hypersl(G, translate_slii(phi, G, F, cert),
                                                             HORIZON2)
