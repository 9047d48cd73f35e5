from __future__ import annotations

import pytest

from conftest import load
from dyckcst.automata import slt_agreement
from dyckcst.grammar import enumerate_language, parse_grammar, to_cnf
from dyckcst.stanley import StanleySymbol, binary_code_length, code_words, erasure_ratio, stanley_build
from dyckcst.verify import image_language, intersection_grammar, verify_identity


def test_single_leaf_grammar():
    g = parse_grammar("axiom: S\nS -> a")
    dec = stanley_build(g)
    words = enumerate_language(intersection_grammar(dec.dyck, dec.R), 4)
    assert {" ".join(map(str, w)) for w in words} == {"a a'"}
    assert image_language(dec.dyck, dec.R, dec.h, 4) == {("a",)}


def test_worked_fixture_unary():
    dec = stanley_build(to_cnf(load("paper")), "unary")
    assert image_language(dec.dyck, dec.R, dec.h, 12) == {tuple("aaaa"), tuple("a" * 6 + "b" * 6)}


@pytest.mark.parametrize("rules, h", [(1, 0), (2, 1), (5, 3), (8, 3), (9, 4)])
def test_binary_code_length(rules, h):
    assert binary_code_length(rules) == h


def test_binary_width_for_five_rules():
    dec = stanley_build(load("anbn"), "binary")
    assert len(dec.grammar.rules) == 5
    assert dec.code_length == 3 and dec.width == 8


def test_code_words_pair_innermost():
    push, pop = code_words(6, "binary", 3)
    assert " ".join(map(str, push)) == "#d #1 #0 #1 #d"
    assert " ".join(map(str, pop)) == "#d' #1' #0' #1' #d'"
    push, pop = code_words(2, "unary", 0)
    assert " ".join(map(str, push + pop)) == "#d #c #c #d #d' #c' #c' #d'"


def test_symbol_json_round_trip():
    for s in ["a", "a'", "0", "#0'", "#c", "#d'"]:
        assert StanleySymbol.from_json(s).to_json() == s
    assert StanleySymbol.from_json("0").kind == "letter"
    assert StanleySymbol.from_json("#0").kind == "digit"


def test_h_erases_primes_and_delimiters():
    dec = stanley_build(load("example2"), "binary")
    for x, img in dec.h.items():
        assert img == ((x.name,) if x.kind == "letter" and not x.primed else ())


@pytest.mark.parametrize("code", ["unary", "binary"])
@pytest.mark.parametrize("name", ["paper", "anbn", "wwr", "example2", "gruska1"])
def test_identity(name, code):
    g = load(name)
    dec = stanley_build(g, code)
    assert verify_identity(dec.dyck, dec.R, dec.h, g, 12).equal


@pytest.mark.parametrize("code", ["unary", "binary"])
def test_descriptor_agrees_with_r(code):
    dec = stanley_build(load("anbn"), code)
    assert slt_agreement(dec.slt, dec.R, min(4 * dec.width, 14)) == []


def test_erasure_ratio_exceeds_one():
    dec = stanley_build(load("anbn"), "unary")
    assert erasure_ratio(dec, 20) > 1.0
