import random

import pytest
from hypothesis import given, settings, strategies as st

from strathyper.generate import random_hypersl, random_instance, random_slii
from strathyper.ltl import Atom, Until, Not, globally
from strathyper.syntax import (FormulaError, HBody, HExists, HForall, SBind, SExists, SPath,
                               from_json, negate_state, parse_hypersl, parse_path, parse_slii,
                               path_variables, quantifier_depth, size, strategy_variables,
                               to_json, to_text, wellformed_hypersl, wellformed_slii)

HYPER_EXAMPLE = ("exists x. forall y. forall z. [p1:(a1=x,a2=x,a3=z); p2:(a1=x,a2=y,a3=z)] "
                 "((!g@p2) U g@p1)")


def test_slii_example():
    phi = parse_slii("exists x:o1. bind a1 x. G goal", ["a1"], ["o1"])
    assert phi == SExists("x", "o1", SBind("a1", "x", SPath(globally(Atom("goal")))))


def test_hypersl_example():
    phi = parse_hypersl(HYPER_EXAMPLE, ["a1", "a2", "a3"])
    assert isinstance(phi, HExists) and isinstance(phi.body, HForall)
    body = phi.body.body.body
    assert isinstance(body, HBody)
    assert body.psi == Until(Not(Atom("g", "p2")), Atom("g", "p1"))
    assert dict(body.bindings)["p2"] == (("a1", "x"), ("a2", "y"), ("a3", "z"))
    assert path_variables(phi) == ["p1", "p2"]


def test_non_total_profile():
    with pytest.raises(FormulaError, match="non-total profile"):
        parse_hypersl("forall x. [p1:(a1=x)] F g@p1", ["a1", "a2"])


def test_unbound_variable_and_agent():
    with pytest.raises(FormulaError, match="unbound variable"):
        parse_slii("exists x:o. bind a1 y. F p")
    with pytest.raises(FormulaError, match="agent unbound"):
        parse_slii("exists x:o. bind a1 x. F p", ["a1", "a2"])


def test_unknown_observation():
    with pytest.raises(FormulaError):
        parse_slii("exists x:o9. bind a1 x. F p", ["a1"], ["o1"])


def test_syntax_error_has_position():
    with pytest.raises(FormulaError, match="line 2, column"):
        parse_slii("exists x:o.\n bind a1 x. F (p &")


def test_state_formula_under_temporal_operator_is_rejected():
    with pytest.raises(FormulaError):
        parse_slii("exists x:o. bind a1 x. F (exists y:o. bind a1 y. p)")


def test_hyper_atom_needs_a_known_path():
    with pytest.raises(FormulaError):
        parse_hypersl("forall x. [p1:(a1=x)] F g@p3", ["a1"])


def test_quoted_identifiers_round_trip():
    phi = parse_slii('exists "x@p1":o. bind "a1@p1" "x@p1". F "act:a1:c0"')
    assert parse_slii(to_text(phi)) == phi


def test_parse_path_sugar():
    assert parse_path("p -> q") == parse_path("!p | q")
    assert parse_path("G p") == parse_path("!F !p")
    assert parse_path("p W q") == parse_path("(p U q) | G p")


def test_negate_state_is_involution_on_examples():
    phi = parse_hypersl(HYPER_EXAMPLE, ["a1", "a2", "a3"])
    assert negate_state(negate_state(phi)) == phi
    assert isinstance(negate_state(phi), HForall)


def test_metrics():
    phi = parse_hypersl(HYPER_EXAMPLE, ["a1", "a2", "a3"])
    assert quantifier_depth(phi) == 3
    assert strategy_variables(phi) == ["x", "y", "z"]
    assert size(phi) > 3


def _pool(n, hyper):
    for seed in range(n):
        rng = random.Random(seed)
        g, f = random_instance(seed, states=2, agents=rng.randint(1, 3), observations=2)
        yield g, f, (random_hypersl(rng, g) if hyper else random_slii(rng, g, f))


@pytest.mark.parametrize("hyper", [False, True])
def test_print_parse_round_trip_on_pool(hyper):
    for g, f, phi in _pool(150, hyper):
        text = to_text(phi)
        back = parse_hypersl(text, g.agents) if hyper else parse_slii(text, g.agents, f.observations)
        assert to_text(back) == text
        assert from_json(to_json(phi), hyper) == phi
        assert negate_state(negate_state(phi)) == phi
        (wellformed_hypersl if hyper else wellformed_slii)(phi, g.agents)


@settings(max_examples=100, deadline=None)
@given(st.text(alphabet="exists forall bind x:o1.()|&!GFXUW[]p@;=", max_size=40))
def test_parser_never_crashes_unexpectedly(text):
    for parse in (parse_slii, parse_hypersl):
        try:
            parse(text)
        except FormulaError:
            pass
