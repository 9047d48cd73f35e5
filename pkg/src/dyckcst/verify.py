"""Exhaustive small-length check of an identity L = h(D ∩ R)."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .automata import DyckSpec, Nfa, bar_hillel_intersect, dyck_grammar, grammar_hom_image
from .grammar import Grammar, enumerate_language, fmt_word, sort_key


@dataclass
class VerificationReport:
    maxlen: int
    lhs_count: int
    rhs_count: int
    equal: bool
    witnesses: list = field(default_factory=list)
    runtime_ms: int = 0
    only_lhs: list = field(default_factory=list)
    only_rhs: list = field(default_factory=list)

    def to_json(self):
        return {
            "maxlen": self.maxlen,
            "lhsCount": self.lhs_count,
            "rhsCount": self.rhs_count,
            "equal": self.equal,
            "witnesses": self.witnesses,
            "runtimeMs": self.runtime_ms,
        }


def intersection_grammar(dyck: DyckSpec, control: Nfa) -> Grammar:
    """Grammar for D ∩ L(control), the Dyck grammar restricted to the
    symbols that occur in the control automaton."""
    return bar_hillel_intersect(dyck_grammar(dyck, control.used_symbols()), control)


def image_language(dyck: DyckSpec, control: Nfa, h, maxlen: int) -> set:
    bh = intersection_grammar(dyck, control)
    hmap = {x: h(x) if callable(h) else h[x] for x in bh.terminals}
    return enumerate_language(grammar_hom_image(bh, hmap), maxlen)


def verify_identity(dyck: DyckSpec, control: Nfa, h, g: Grammar, maxlen: int) -> VerificationReport:
    started = time.perf_counter()
    lhs = image_language(dyck, control, h, maxlen)
    rhs = enumerate_language(g, maxlen)
    key = lambda w: (len(w), sort_key(w))
    only_lhs = sorted(lhs - rhs, key=key)
    only_rhs = sorted(rhs - lhs, key=key)
    witnesses = [fmt_word(w) for w in sorted(only_lhs + only_rhs, key=key)[:10]]
    return VerificationReport(maxlen, len(lhs), len(rhs), not only_lhs and not only_rhs, witnesses,
                              round((time.perf_counter() - started) * 1000), only_lhs, only_rhs)


def verify_cst(dec, g: Grammar, maxlen: int) -> VerificationReport:
    return verify_identity(dec.dyck, dec.T, lambda x: x.out, g, maxlen)
