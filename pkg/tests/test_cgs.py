import json

import pytest
from hypothesis import given, settings, strategies as st

from games import load, pennies_doc, reach_doc
from strathyper.cgs import (CgsError, FiniteMemoryStrategy, Lasso,
                            cgs_to_json, count_strategies, digest, enumerate_strategies,
                            extend_key, indistinguishable_prefixes,
                            is_o_strategy, play_lasso, validate_cgs, window_key, windows)
from strathyper.generate import random_instance, set_partitions


def test_round_trip_json():
    g, f = load(reach_doc())
    g2, f2 = validate_cgs(json.dumps(cgs_to_json(g, f)))
    assert g2 == g and f2 == f
    assert digest(g, f) == digest(g2, f2)


def test_non_total_transition_names_the_gap():
    doc = reach_doc()
    dropped = doc["transitions"].pop(5)
    with pytest.raises(CgsError, match="non-total") as err:
        validate_cgs(doc)
    assert repr(dropped["from"]) in str(err.value)
    assert str(dropped["profile"]) in str(err.value)


@pytest.mark.parametrize("field", ["states", "initial", "observations", "transitions"])
def test_missing_field(field):
    doc = reach_doc()
    del doc[field]
    with pytest.raises(CgsError, match=field):
        validate_cgs(doc)


def test_malformed_json():
    with pytest.raises(CgsError, match="malformed JSON"):
        validate_cgs("{")


def test_observation_must_partition():
    doc = reach_doc()
    doc["observations"]["blind"] = [["s0", "s1"], ["s2"]]
    with pytest.raises(CgsError, match="does not partition"):
        validate_cgs(doc)
    doc["observations"]["blind"] = [["s0", "s1"], ["s1", "s2", "g"]]
    with pytest.raises(CgsError, match="twice"):
        validate_cgs(doc)


def test_unknown_labels_and_states():
    doc = reach_doc()
    doc["states"][0]["labels"] = ["nope"]
    with pytest.raises(CgsError, match="unknown ap"):
        validate_cgs(doc)
    doc = reach_doc()
    doc["transitions"][0]["to"] = "nowhere"
    with pytest.raises(CgsError, match="unknown state"):
        validate_cgs(doc)


def test_window_keys():
    assert window_key("abcd", 2, "window") == ("c", "d")
    assert window_key("abcd", 2, "horizon") == ("a", "b")
    assert extend_key(("a",), "b", 2, "window") == ("a", "b")
    assert extend_key(("a", "b"), "c", 2, "window") == ("b", "c")
    assert extend_key(("a", "b"), "c", 2, "horizon") == ("a", "b")
    assert len(windows("ab", 2)) == 6


def test_strategy_counts():
    g, f = load(reach_doc())
    assert count_strategies(g, f, 1, "blind") == 2
    assert count_strategies(g, None, 1) == 16
    assert count_strategies(g, f, 2, "blind") == 4
    assert sum(1 for _ in enumerate_strategies(g, f, 2, "blind")) == 4


def test_play_lasso_closes_the_loop():
    g, f = load(pennies_doc())
    heads = FiniteMemoryStrategy(1, None, {(s,): "h" for s in g.states})
    tails = FiniteMemoryStrategy(1, None, {(s,): "t" for s in g.states})
    assert play_lasso(g, g.initial, {"a1": heads, "a2": heads}) == Lasso(("s",), ("win",))
    assert play_lasso(g, g.initial, {"a1": heads, "a2": tails}) == Lasso(("s",), ("lose",))
    with pytest.raises(CgsError, match="no strategy"):
        play_lasso(g, g.initial, {"a1": heads})


def test_o_strategies():
    g, f = load(reach_doc())
    blind = next(enumerate_strategies(g, f, 1, "blind"))
    assert is_o_strategy(g, f, "blind", blind.lift(g, f))
    reactive = FiniteMemoryStrategy(1, None, {("s0",): "l", ("s1",): "l", ("s2",): "r",
                                              ("g",): "l"})
    assert not is_o_strategy(g, f, "blind", reactive)
    assert is_o_strategy(g, f, "full", reactive)
    assert indistinguishable_prefixes(f, "blind", ["s0", "s1"], ["s0", "s2"])
    assert not indistinguishable_prefixes(f, "full", ["s0", "s1"], ["s0", "s2"])


def test_bad_strategy_window():
    with pytest.raises(CgsError):
        FiniteMemoryStrategy(0, None, {})
    with pytest.raises(CgsError):
        FiniteMemoryStrategy(1, None, {}, "forever")


def test_set_partitions_are_bell_numbers():
    assert [len(set_partitions(range(n))) for n in range(6)] == [1, 1, 2, 5, 15, 52]
    assert len(set(set_partitions("abcd"))) == 15


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 5), st.integers(1, 3), st.integers(1, 3))
def test_random_instances_are_valid_and_deterministic(seed, n, a, m):
    g, f = random_instance(seed, states=n, actions=a, agents=m)
    assert validate_cgs(cgs_to_json(g, f)) == (g, f)
    assert random_instance(seed, states=n, actions=a, agents=m) == (g, f)
    f.check_covers(g.states)


def test_random_instance_caps():
    with pytest.raises(ValueError):
        random_instance(0, states=99)
    with pytest.raises(ValueError):
        random_instance(0, turn_based=2.0)
