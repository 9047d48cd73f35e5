"""Erasing decomposition L = h(D ∩ R) with a grammar-independent alphabet.

R comes from a right-linear grammar that threads a CNF derivation left to
right: each leaf a is followed by its primed partner, and binary rules are
pushed and popped as codes between delimiters d and d′.  Codes are unary
(c^i) or binary (⌈log₂|P|⌉ bits of i−1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automata import FiniteDyck, Nfa, SltDescriptor, slt_hull
from .encode import numeral
from .grammar import Grammar, derives_empty, is_cnf, reduce, sort_key, sorted_symbols, to_cnf


@dataclass(frozen=True)
class StanleySymbol:
    kind: str  # "letter" | "delim" | "digit"
    name: object
    primed: bool = False

    def sort_key(self):
        return ({"letter": 0, "delim": 1, "digit": 2}[self.kind], sort_key(self.name), self.primed)

    def to_json(self) -> str:
        base = str(self.name) if self.kind == "letter" else f"#{self.name}"
        return base + ("'" if self.primed else "")

    @classmethod
    def from_json(cls, s: str):
        primed = s.endswith("'")
        core = s[:-1] if primed else s
        if core.startswith("#"):
            name = core[1:]
            return cls("digit" if name in ("0", "1") else "delim", name, primed)
        return cls("letter", core, primed)

    def __str__(self):
        return self.to_json()


def _sym(kind, name, primed=False):
    return StanleySymbol(kind, name, primed)


@dataclass
class StanleyDecomposition:
    grammar: Grammar
    code: str
    dyck: FiniteDyck
    h: dict
    R: Nfa
    eps: bool
    width: int
    slt: SltDescriptor = field(repr=False)
    code_length: int = 0

    @property
    def alphabet_size(self) -> int:
        return len(self.dyck.opens) + len(self.dyck.closes)


def code_words(label: int, code: str, h: int):
    """(push side, pop side) encodings of a rule label, delimiters included."""
    d, dp = _sym("delim", "d"), _sym("delim", "d", True)
    if code == "unary":
        push = (d,) + (_sym("delim", "c"),) * label + (d,)
        pop = (dp,) + (_sym("delim", "c", True),) * label + (dp,)
        return push, pop
    bits = numeral(label - 1, 2, h)
    push = (d,) + tuple(_sym("digit", str(b)) for b in reversed(bits)) + (d,)
    pop = (dp,) + tuple(_sym("digit", str(b), True) for b in bits) + (dp,)
    return push, pop


def binary_code_length(rule_count: int) -> int:
    return max(0, (rule_count - 1).bit_length())


def stanley_build(g: Grammar, code: str = "unary") -> StanleyDecomposition:
    if code not in ("unary", "binary"):
        raise ValueError("code must be 'unary' or 'binary'")
    eps = derives_empty(g)
    g = reduce(g) if is_cnf(g) else to_cnf(g)
    sigma = sorted_symbols(g.terminals)
    n_rules = len(g.rules)
    h_len = binary_code_length(n_rules)

    pairs = [(_sym("letter", a), _sym("letter", a, True)) for a in sigma]
    if code == "unary":
        pairs += [(_sym("delim", "c"), _sym("delim", "c", True)), (_sym("delim", "d"), _sym("delim", "d", True))]
    else:
        pairs += [(_sym("delim", "d"), _sym("delim", "d", True)),
                  (_sym("digit", "0"), _sym("digit", "0", True)),
                  (_sym("digit", "1"), _sym("digit", "1", True))]
    dyck = FiniteDyck.make(pairs)
    h = {x: ((x.name,) if x.kind == "letter" and not x.primed else ())
         for pair in pairs for x in pair}

    leaves = [(r.lhs, r.rhs[0]) for r in g.rules if len(r.rhs) == 1]
    binaries = [(i, r) for i, r in enumerate(g.rules, 1) if len(r.rhs) == 2]
    final = ("F",)
    trans = set()
    paths = []
    for x, a in leaves:
        leaf = (_sym("letter", a), _sym("letter", a, True))
        paths.append((("N", x), leaf, final))
        for i, r in binaries:
            _, pop = code_words(i, code, h_len)
            paths.append((("N", x), leaf + pop, ("N", r.rhs[1])))
    for i, r in binaries:
        push, _ = code_words(i, code, h_len)
        paths.append((("N", r.lhs), push, ("N", r.rhs[0])))
    for k, (src, word, dst) in enumerate(paths):
        prev = src
        for pos, x in enumerate(word):
            nxt = dst if pos == len(word) - 1 else ("P", k, pos)
            trans.add((prev, x, nxt))
            prev = nxt
    start = ("N", g.axiom)
    if eps:
        # a fresh start state so that only the empty word gains acceptance
        start = ("S",)
        trans |= {(start, x, q) for (p, x, q) in list(trans) if p == ("N", g.axiom)}
    finals = {final, start} if eps else {final}
    R = Nfa.make({start, ("N", g.axiom), final}, [x for p in pairs for x in p], trans,
                 {start}, finals).trim().renumbered()
    width = 2 * n_rules + 2 if code == "unary" else 2 * h_len + 2
    width = max(width, 2)
    return StanleyDecomposition(g, code, dyck, h, R, eps, width, slt_hull(R, width), h_len)


def erasure_ratio(dec: StanleyDecomposition, maxlen: int) -> float:
    """max |u| / |h(u)| over words u ∈ D ∩ R with |u| ≤ maxlen and h(u) ≠ ε."""
    from .grammar import enumerate_language
    from .verify import intersection_grammar

    words = enumerate_language(intersection_grammar(dec.dyck, dec.R), maxlen)
    best = 1.0
    for u in words:
        img = sum(len(dec.h[x]) for x in u)
        if img:
            best = max(best, len(u) / img)
    return best
