"""Grammar-dependent bracket system for grammars in double Greibach form.

Each bracket is labeled by a pair ⟨previous rule, current rule⟩ of a leftmost
derivation; the open bracket of rule A → b C₁…Cₙ d maps to b and the close
bracket to d.  Rules whose right side is a single tuple symbol get a neutral
bracket.  For each start nonterminal X a width-2 SLT control language R_X
admits exactly the bracket sequences that chain rules correctly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .automata import FiniteDyck, Nfa, SltDescriptor, slt_to_nfa
from .grammar import Grammar, GrammarError, fmt_symbol, sort_key, sorted_symbols


class InvalidTreeError(GrammarError):
    pass


@dataclass(frozen=True)
class AxiomMark:
    nonterminal: object

    def sort_key(self):
        return sort_key(self.nonterminal)

    def __str__(self):
        return f"-{fmt_symbol(self.nonterminal)}"


def _prev_key(p):
    if isinstance(p, AxiomMark):
        return (0, sort_key(p.nonterminal))
    return (1, p)


@dataclass(frozen=True)
class OmegaQSymbol:
    kind: str  # "open" | "close" | "neutral"
    prev: object  # rule label or AxiomMark
    cur: int
    index: int

    def sort_key(self):
        return (self.index, {"open": 0, "neutral": 1, "close": 2}[self.kind])

    @property
    def pair(self):
        return (self.prev, self.cur)

    def __str__(self):
        prev = "-" if isinstance(self.prev, AxiomMark) else str(self.prev)
        mark = {"open": "(", "close": ")", "neutral": "|"}[self.kind]
        return f"{mark}{prev}:{self.cur}"


@dataclass(frozen=True)
class ParseTree:
    label: int
    children: tuple = ()

    @classmethod
    def of(cls, label, *children):
        return cls(label, tuple(children))


@dataclass
class BracketSystem:
    grammar: Grammar
    dyck: FiniteDyck
    h: dict
    controls: dict  # X -> SltDescriptor (k = 2)
    symbols: dict  # (kind, prev, cur) -> OmegaQSymbol
    pairs: list  # (prev, cur) in ι order
    axioms: tuple
    _nfas: dict = field(default_factory=dict, repr=False)

    @property
    def q(self) -> int:
        return len(self.pairs)

    @property
    def open_count(self) -> int:
        return len(self.dyck.opens)

    def control_nfa(self, x) -> Nfa:
        if x not in self._nfas:
            self._nfas[x] = slt_to_nfa(self.controls[x])
        return self._nfas[x]

    def open_of(self, pair) -> Optional[OmegaQSymbol]:
        return self.symbols.get(("open", *pair)) or self.symbols.get(("neutral", *pair))

    def close_of(self, pair) -> Optional[OmegaQSymbol]:
        return self.symbols.get(("close", *pair))

    def bound(self) -> int:
        p, n = len(self.grammar.rules), len(self.grammar.nonterminals)
        return p * p + n * p


def _check_shape(g: Grammar):
    for i, rule in enumerate(g.rules, 1):
        rhs = rule.rhs
        if len(rhs) == 1 and rhs[0] not in g.nonterminals:
            continue
        if len(rhs) < 2 or rhs[0] in g.nonterminals or rhs[-1] in g.nonterminals:
            raise GrammarError(f"rule {i} ({rule}) is not of the form δ N* δ or δ")
        mid = rhs[1:-1]
        if any(x not in g.nonterminals for x in mid):
            raise GrammarError(f"rule {i} ({rule}) has an inner terminal")
        if len(set(mid)) != len(mid):
            raise GrammarError(f"rule {i} ({rule}) repeats a nonterminal")


def _children(rule, g):
    return rule.rhs[1:-1] if len(rule.rhs) >= 2 else ()


def build_bracket_system(g: Grammar, axioms=None) -> BracketSystem:
    """Brackets, homomorphism and control languages for every X in
    ``axioms`` (default: every nonterminal with rules)."""
    _check_shape(g)
    by_lhs = g.by_lhs
    if axioms is None:
        axioms = sorted_symbols(by_lhs)
    axioms = tuple(x for x in axioms if x in by_lhs)
    single = {i for i, rule in enumerate(g.rules, 1) if len(rule.rhs) == 1}

    pairs = set()
    for x in axioms:
        for r in by_lhs[x]:
            pairs.add((AxiomMark(x), r))
    for p, rule in enumerate(g.rules, 1):
        for c in _children(rule, g):
            for r in by_lhs.get(c, ()):
                pairs.add((p, r))
    pairs = sorted(pairs, key=lambda pr: (_prev_key(pr[0]), pr[1]))

    symbols = {}
    h = {}
    matching = []
    neutrals = []
    for iota, (p, r) in enumerate(pairs, 1):
        rhs = g.rules[r - 1].rhs
        if r in single:
            u = OmegaQSymbol("neutral", p, r, iota)
            symbols[("neutral", p, r)] = u
            h[u] = rhs[0]
            neutrals.append(u)
        else:
            o = OmegaQSymbol("open", p, r, iota)
            c = OmegaQSymbol("close", p, r, iota)
            symbols[("open", p, r)] = o
            symbols[("close", p, r)] = c
            h[o], h[c] = rhs[0], rhs[-1]
            matching.append((o, c))
    dyck = FiniteDyck.make(matching, neutrals)

    def first_of(p, r):  # symbol that starts the block of pair (p, r)
        return symbols.get(("open", p, r)) or symbols[("neutral", p, r)]

    def last_of(p, r):  # symbol that ends it
        return symbols.get(("close", p, r)) or symbols[("neutral", p, r)]

    parents = {}
    for p, r in pairs:
        parents.setdefault(r, []).append(p)

    factors = set()
    for p, r in pairs:
        rule = g.rules[r - 1]
        kids = _children(rule, g)
        if r in single:
            pass
        elif kids:
            for r2 in by_lhs[kids[0]]:
                factors.add((symbols[("open", p, r)], first_of(r, r2)))
        else:
            factors.add((symbols[("open", p, r)], symbols[("close", p, r)]))
        # what may follow the end of the block (p, r), seen from parent p
        if isinstance(p, AxiomMark):
            continue
        siblings = _children(g.rules[p - 1], g)
        i = siblings.index(rule.lhs)
        end = last_of(p, r)
        if i + 1 < len(siblings):
            for r2 in by_lhs[siblings[i + 1]]:
                factors.add((end, first_of(p, r2)))
        else:
            for pp in parents.get(p, ()):
                factors.add((end, symbols[("close", pp, p)]))

    controls = {}
    for x in axioms:
        mark = AxiomMark(x)
        I, T, W = set(), set(), set()
        for r in by_lhs[x]:
            if r in single:
                W.add((symbols[("neutral", mark, r)],))
            else:
                I.add((symbols[("open", mark, r)],))
                T.add((symbols[("close", mark, r)],))
        controls[x] = SltDescriptor.make(2, W, I, T, factors)
    return BracketSystem(g, dyck, h, controls, symbols, pairs, axioms)


def _validate(g: Grammar, tree: ParseTree, expected=None):
    try:
        rule = g.rule(tree.label)
    except GrammarError as e:
        raise InvalidTreeError(str(e)) from None
    if expected is not None and rule.lhs != expected:
        raise InvalidTreeError(f"rule {tree.label} rewrites {rule.lhs}, expected {expected}")
    kids = [x for x in rule.rhs if x in g.nonterminals]
    if len(kids) != len(tree.children):
        raise InvalidTreeError(f"rule {tree.label} needs {len(kids)} children, got {len(tree.children)}")
    return rule, kids


def derivation_to_brackets(sys: BracketSystem, tree: ParseTree) -> tuple:
    """Bracket word of the leftmost derivation described by ``tree``."""
    g = sys.grammar
    out = []

    def walk(prev, node, expected):
        rule, kids = _validate(g, node, expected)
        key = (prev, node.label)
        if len(rule.rhs) == 1:
            sym = sys.symbols.get(("neutral", *key))
            if sym is None:
                raise InvalidTreeError(f"no bracket for pair {key}")
            out.append(sym)
            return
        o = sys.symbols.get(("open", *key))
        if o is None:
            raise InvalidTreeError(f"no bracket for pair {key}")
        out.append(o)
        for child, nt in zip(node.children, kids):
            walk(node.label, child, nt)
        out.append(sys.symbols[("close", *key)])

    root_rule = _validate(g, tree)[0]
    walk(AxiomMark(root_rule.lhs), tree, None)
    return tuple(out)


def tree_yield(g: Grammar, tree: ParseTree) -> tuple:
    rule, _ = _validate(g, tree)
    out = []
    kids = iter(tree.children)
    for x in rule.rhs:
        out.extend(tree_yield(g, next(kids)) if x in g.nonterminals else (x,))
    return tuple(out)


def _heights(g: Grammar) -> dict:
    inf = float("inf")
    height = {x: inf for x in g.nonterminals}
    changed = True
    while changed:
        changed = False
        for rule in g.rules:
            h = 1 + max((height[x] for x in rule.rhs if x in g.nonterminals), default=0)
            if h < height[rule.lhs]:
                height[rule.lhs] = h
                changed = True
    return height


def sample_tree(g: Grammar, x, rng: random.Random, max_depth: int = 6) -> ParseTree:
    """Random parse tree rooted at x; past ``max_depth`` only rules of minimal
    height are chosen, so sampling always terminates."""
    height = _heights(g)

    def rule_height(i):
        return 1 + max((height[y] for y in g.rules[i - 1].rhs if y in g.nonterminals), default=0)

    def grow(a, depth):
        labels = g.by_lhs[a]
        if depth >= max_depth:
            best = min(rule_height(i) for i in labels)
            labels = [i for i in labels if rule_height(i) == best]
        label = rng.choice(labels)
        kids = [y for y in g.rules[label - 1].rhs if y in g.nonterminals]
        return ParseTree(label, tuple(grow(k, depth + 1) for k in kids))

    return grow(x, 0)
