"""Oracles shared by the unit and acceptance tests."""

from __future__ import annotations

import itertools

from dyckcst.automata import dyck_check
from dyckcst.encode import rho
from dyckcst.grammar import enumerate_language
from dyckcst.okhotin import derivation_to_brackets, sample_tree
from dyckcst.normal_forms import expand_word, tuple_body


def tuple_stage_language(qg, bound):
    """Letter words ≤ bound rebuilt from the condensed body grammar and the
    axiom rules S → Xw."""
    tg, axiom_rules, nullable = tuple_body(qg)
    r = qg.order
    out = set()
    per_root = {}
    for x, w in axiom_rules:
        if tg is not None and x in tg.by_lhs:
            if x not in per_root:
                gx = tg.with_rules(tg.rules, axiom=x, tag=tg.tag, nonterminals=tg.nonterminals)
                per_root[x] = enumerate_language(gx, (bound - len(w)) // r)
            out |= {expand_word(u) + w for u in per_root[x]}
        if x in nullable:
            out.add(w)
    return {w for w in out if len(w) <= bound}


LITERAL_BUDGET = 2_000_000


def injectivity_failures(tmap, maxlen=3):
    """Words of length ≤ maxlen over τ's domain with colliding images.

    Enumerates literally while the word count stays within LITERAL_BUDGET.
    Past that, a uniform image length reduces the exhaustive check to
    distinct letter images, since images then cut uniquely into blocks.
    Returns (failures, how)."""
    alphabet = sorted(tmap, key=lambda s: s.sort_key())
    images = [tmap[s] for s in alphabet]
    failures = [s for s, img in zip(alphabet, images) if images.count(img) > 1]
    total = sum(len(alphabet) ** n for n in range(1, maxlen + 1))
    if total > LITERAL_BUDGET and len({len(img) for img in images}) == 1:
        return failures, "block"
    seen = {}
    for n in range(1, maxlen + 1):
        for w in itertools.product(alphabet, repeat=n):
            image = tuple(y for s in w for y in tmap[s])
            if seen.setdefault(image, w) != w:
                failures.append(w)
    return failures, "literal"


def _candidate_word(rng, sys, alphabet):
    """Uniform random word, or a shuffle of opens with their own closes so a
    fair share of candidates is balanced in the image."""
    if rng.random() < 0.5:
        return tuple(rng.choice(alphabet) for _ in range(rng.randint(1, 6)))
    opens = [s for s in alphabet if s.kind == "open"]
    picked = [rng.choice(opens) for _ in range(rng.randint(1, 3))] if opens else []
    word = picked + [sys.close_of(s.pair) for s in picked]
    rng.shuffle(word)
    return tuple(word)


def claims_check(dec, rng, trees=1000, random_words=1000, maxlen=3):
    """Failures of τ(D_q) ⊆ D_n, ρ∘τ = π∘h, injectivity and τ⁻¹(D_n) ⊆ D_q,
    keyed by property, plus the injectivity mode used."""
    sys, tmap = dec.system, dec.tau_map
    failures = {"dyck": [], "rho": [], "injective": [], "preimage": []}
    roots = sorted(sys.controls, key=str)
    for _ in range(trees):
        x = rng.choice(roots)
        gamma = derivation_to_brackets(sys, sample_tree(sys.grammar, x, rng))
        image = tuple(y for s in gamma for y in tmap[s])
        if not dyck_check(dec.dyck, image):
            failures["dyck"].append(gamma)
        if rho(image) != expand_word(tuple(sys.h[s] for s in gamma)):
            failures["rho"].append(gamma)
    failures["injective"], how = injectivity_failures(tmap, maxlen)
    alphabet = sorted(tmap, key=lambda s: s.sort_key())
    for _ in range(random_words):
        w = _candidate_word(rng, sys, alphabet)
        image = tuple(y for s in w for y in tmap[s])
        if dyck_check(dec.dyck, image) and not dyck_check(sys.dyck, w):
            failures["preimage"].append(w)
    return failures, how
