from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from dyckcst.automata import (FiniteDyck, ForeignSymbolError, Nfa, SltDescriptor, bar_hillel_intersect,
                              dyck_check, dyck_grammar, grammar_hom_image, nfa_concat, nfa_path, nfa_union,
                              nfa_word_image, slt_agreement, slt_hull, slt_membership, slt_to_nfa)
from dyckcst.grammar import Grammar, enumerate_language, parse_grammar

AB = ("a", "b")


@st.composite
def small_nfas(draw):
    n = draw(st.integers(1, 4))
    trans = draw(st.lists(st.tuples(st.integers(0, n - 1), st.sampled_from(AB), st.integers(0, n - 1)),
                          max_size=8))
    initial = draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=2))
    finals = draw(st.sets(st.integers(0, n - 1), max_size=2))
    return Nfa.make(range(n), AB, trans, initial, finals)


def words_upto(alphabet, n):
    for k in range(n + 1):
        yield from itertools.product(alphabet, repeat=k)


def test_nfa_basics():
    a = Nfa.from_words([("a", "b"), ("a",)])
    assert a.accepts("ab") and a.accepts("a") and not a.accepts("b")
    assert a.words(3) == {("a",), ("a", "b")}
    assert Nfa.empty().is_empty()
    assert Nfa.epsilon().accepts_empty


def test_union_concat_path():
    x = nfa_union(nfa_path("ab"), nfa_path("b"))
    y = nfa_concat(x, nfa_path("a"))
    assert y.words(4) == {tuple("aba"), tuple("ba")}


def test_word_image_rejects_erasure():
    with pytest.raises(ValueError):
        nfa_word_image(nfa_path("a"), {"a": ()})
    assert nfa_word_image(nfa_path("ab"), {"a": "xy", "b": "z"}, partial=False).words(4) == {tuple("xyz")}
    assert nfa_word_image(nfa_path("a"), {}, partial=True).is_empty()


@settings(max_examples=200, deadline=None)
@given(small_nfas())
def test_renumbered_and_trim_preserve_language(a):
    assert a.renumbered().words(5) == a.words(5) == a.trim().words(5)


@settings(max_examples=150, deadline=None)
@given(small_nfas(), st.integers(2, 4))
def test_slt_hull_contains_and_round_trips(a, k):
    d = slt_hull(a, k)
    lang = a.words(6)
    hull = {w for w in words_upto(AB, 6) if slt_membership(d, w)}
    assert lang <= hull
    assert slt_to_nfa(d).words(6) == hull


def test_slt_hull_is_exact_on_local_language():
    # (ab)+ is 2-SLT
    a = Nfa.make({0, 1, 2}, AB, {(0, "a", 1), (1, "b", 2), (2, "a", 1)}, {0}, {2})
    d = slt_hull(a, 2)
    assert slt_agreement(d, a, 8) == []


def test_slt_descriptor_validation():
    with pytest.raises(ValueError):
        SltDescriptor.make(1)
    with pytest.raises(ValueError):
        SltDescriptor.make(2, W=[("a", "b")])
    with pytest.raises(ValueError):
        SltDescriptor.make(3, I=[("a",)])


DYCK = FiniteDyck.make([("(", ")"), ("[", "]")], neutrals=["."])


@pytest.mark.parametrize("w, ok", [
    ("", True), ("()", True), ("([])", True), ("(.)[]", True), (".", True),
    ("(]", False), (")(", False), ("((", False), ("([)]", False),
])
def test_dyck_check(w, ok):
    assert dyck_check(DYCK, w) is ok


def test_dyck_foreign_symbol():
    with pytest.raises(ForeignSymbolError):
        dyck_check(DYCK, "(x)")


def test_dyck_grammar_matches_checker():
    g = dyck_grammar(DYCK, "()[].")
    lang = enumerate_language(g, 6)
    for w in words_upto("()[].", 6):
        assert (w in lang) == dyck_check(DYCK, w)


@settings(max_examples=150, deadline=None)
@given(small_nfas())
def test_bar_hillel_is_intersection(a):
    g = parse_grammar("axiom: S\nS -> a S b | S S | eps | b")
    bh = bar_hillel_intersect(g, a)
    lang = enumerate_language(g, 6)
    assert enumerate_language(bh, 6) == {w for w in lang if a.accepts(w)}


def test_hom_image_with_erasure():
    g = parse_grammar("axiom: S\nS -> a S b | c")
    img = grammar_hom_image(g, {"a": ("x", "x"), "b": (), "c": "y"})
    assert enumerate_language(img, 5) == {tuple("y"), tuple("xxy"), tuple("xxxxy")}


def test_empty_intersection():
    g = Grammar.make([("S", ("a",))], "S")
    assert enumerate_language(bar_hillel_intersect(g, nfa_path("b")), 3) == set()
