from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from conftest import SUITE, load
from helpers import tuple_stage_language
from dyckcst.grammar import enumerate_language, parse_grammar, to_cnf
from dyckcst.normal_forms import (LengthNotDivisibleError, TupleSymbol, cnf_to_cubic_dgnf, condense_word,
                                  distinct_rhs, expand_word, is_cubic_dgnf, is_even_dgnf, is_q_cnf,
                                  is_q_dgnf, to_q_cnf, to_q_dgnf, tuple_body, tuple_map)

ORDERS = [1, 2, 3, 4]


@given(st.lists(st.sampled_from("ab"), max_size=12), st.integers(1, 4))
def test_condense_expand_round_trip(letters, r):
    w = tuple(letters)
    if len(w) % r:
        with pytest.raises(LengthNotDivisibleError):
            condense_word(w, r)
    else:
        u = condense_word(w, r)
        assert all(isinstance(x, TupleSymbol) and len(x) == r for x in u)
        assert expand_word(u) == w


def test_tuple_map_grammar():
    g = parse_grammar("axiom: S\nS -> a b S b b | a a")
    t = tuple_map(g, 2, "condense")
    assert enumerate_language(t, 3) == {condense_word(w, 2) for w in enumerate_language(g, 6)}
    with pytest.raises(LengthNotDivisibleError):
        tuple_map(parse_grammar("axiom: S\nS -> a S b b | a"), 2, "condense")


@pytest.mark.parametrize("name", SUITE)
def test_cubic_dgnf(name):
    g = load(name)
    d = cnf_to_cubic_dgnf(to_cnf(g))
    assert is_cubic_dgnf(d)
    assert enumerate_language(d, 12) == enumerate_language(g, 12) - {()}


@pytest.mark.parametrize("r", ORDERS)
@pytest.mark.parametrize("name", SUITE)
def test_q_cnf(name, r):
    g = load(name)
    qg = to_q_cnf(to_cnf(g), r)
    assert is_q_cnf(qg)
    ref = enumerate_language(g, 12) - {()}
    assert enumerate_language(qg.grammar, 12) == ref
    # every sentence through S → Xw has length ≡ |w| (mod r)
    body = qg.grammar
    for x, w in qg.axiom_rules:
        gx = body.with_rules(body.rules, axiom=x, tag=body.tag, nonterminals=body.nonterminals)
        assert all(len(u) % r == 0 for u in enumerate_language(gx, 12 - len(w)))
        assert len(w) < r


@pytest.mark.parametrize("r", ORDERS)
@pytest.mark.parametrize("name", SUITE)
def test_q_dgnf_and_tuple_stage(name, r):
    g = load(name)
    qg = to_q_dgnf(to_cnf(g), r)
    assert is_q_dgnf(qg)
    ref = enumerate_language(g, 12) - {()}
    assert enumerate_language(qg.grammar, 12) == ref
    bound = r * min(8, 12 // r)
    assert tuple_stage_language(qg, bound) == {w for w in ref if len(w) <= bound}


@pytest.mark.parametrize("name", ["paper", "anbn", "example2", "gruska2"])
def test_tuple_body_is_cubic_dgnf_with_distinct_rhs(name):
    tg, _, _ = tuple_body(to_q_dgnf(to_cnf(load(name)), 2))
    d = distinct_rhs(tg)
    assert is_cubic_dgnf(d)
    # single-tuple rules are the only ones outside even DGNF
    assert is_even_dgnf(d.with_rules([r for r in d.rules if len(r.rhs) > 1], axiom=d.axiom))
    for r in d.rules:
        nts = [x for x in r.rhs if x in d.nonterminals]
        assert len(nts) == len(set(nts))
    assert enumerate_language(d, 6) == enumerate_language(tg, 6)
