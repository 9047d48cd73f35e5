"""Context-free grammars: parsing, reduction, CNF conversion and the
length-indexed enumeration oracle.

Symbols are arbitrary hashable values.  A symbol is a nonterminal when it
belongs to ``Grammar.nonterminals``; everything else occurring in a rule is a
terminal.  Words are tuples of symbols.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Hashable, Iterable, NamedTuple

Symbol = Hashable
Word = tuple

DEFAULT_WORD_CAP = 2_000_000
_EMPTY = frozenset()


class GrammarError(ValueError):
    pass


class GrammarSyntaxError(GrammarError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class EmptyRuleSetError(GrammarError):
    pass


class UndeclaredSymbolError(GrammarError):
    pass


class BudgetError(RuntimeError):
    """Raised when an enumeration table outgrows its word budget."""


def sort_key(x):
    """Total order over mixed symbol types (strings, ints, dataclasses, tuples)."""
    if isinstance(x, tuple):
        return (2, tuple(sort_key(y) for y in x))
    if isinstance(x, str):
        return (0, x)
    if isinstance(x, bool):
        return (1, str(int(x)))
    if isinstance(x, int):
        return (1, f"{x:020d}")
    k = getattr(x, "sort_key", None)
    if k is not None:
        return (3, type(x).__name__, k())
    return (4, type(x).__name__, repr(x))


def sorted_symbols(xs):
    return sorted(xs, key=sort_key)


@dataclass(frozen=True)
class Aux:
    """A nonterminal invented by a transformation.

    ``tag`` names the transformation, ``key`` identifies the instance and
    ``n`` disambiguates clashes with names already present.
    """

    tag: str
    key: object = None
    n: int = 0

    def sort_key(self):
        return (self.tag, sort_key(self.key), self.n)

    def __str__(self):
        suffix = "'" * self.n
        if self.key is None:
            return f"{self.tag}{suffix}"
        return f"{self.tag}[{fmt_symbol(self.key)}]{suffix}"


def fresh(candidate: Aux, taken) -> Aux:
    while candidate in taken:
        candidate = Aux(candidate.tag, candidate.key, candidate.n + 1)
    return candidate


def fmt_symbol(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(fmt_symbol(y) for y in x) + ")"
    return str(x)


def fmt_word(w) -> str:
    if not w:
        return "ε"
    if all(isinstance(x, str) and len(x) == 1 for x in w):
        return "".join(w)
    return " ".join(fmt_symbol(x) for x in w)


class Rule(NamedTuple):
    lhs: Symbol
    rhs: tuple

    def __str__(self):
        rhs = " ".join(fmt_symbol(x) for x in self.rhs) or "ε"
        return f"{fmt_symbol(self.lhs)} -> {rhs}"


@dataclass(frozen=True)
class Grammar:
    terminals: frozenset
    nonterminals: frozenset
    rules: tuple
    axiom: Symbol
    tag: str = field(default="general", compare=False)

    def __post_init__(self):
        if self.axiom not in self.nonterminals:
            raise GrammarError(f"axiom {self.axiom!r} is not a nonterminal")
        for r in self.rules:
            if r.lhs not in self.nonterminals:
                raise GrammarError(f"rule lhs {r.lhs!r} is not a nonterminal")
            for x in r.rhs:
                if x not in self.nonterminals and x not in self.terminals:
                    raise GrammarError(f"undeclared symbol {x!r} in {r}")
        if self.terminals & self.nonterminals:
            raise GrammarError("terminal and nonterminal alphabets overlap")

    @classmethod
    def make(cls, rules: Iterable, axiom, nonterminals=None, terminals=(), tag="general"):
        """Build a grammar from (lhs, rhs) pairs.

        Nonterminals default to the rule left sides plus the axiom; any other
        rhs symbol becomes a terminal.
        """
        rules = tuple(Rule(lhs, tuple(rhs)) for lhs, rhs in rules)
        nts = set(nonterminals) if nonterminals is not None else {r.lhs for r in rules}
        nts.add(axiom)
        ts = set(terminals)
        for r in rules:
            ts.update(x for x in r.rhs if x not in nts)
        return cls(frozenset(ts), frozenset(nts), rules, axiom, tag)

    def with_rules(self, rules, axiom=None, tag="general", nonterminals=None, terminals=None):
        axiom = self.axiom if axiom is None else axiom
        rules = tuple(Rule(lhs, tuple(rhs)) for lhs, rhs in rules)
        nts = set(nonterminals) if nonterminals is not None else {r.lhs for r in rules} | {axiom}
        if nonterminals is None:
            for r in rules:
                nts.update(x for x in r.rhs if x in self.nonterminals)
        ts = set(self.terminals if terminals is None else terminals)
        for r in rules:
            ts.update(x for x in r.rhs if x not in nts)
        return Grammar(frozenset(ts), frozenset(nts), rules, axiom, tag)

    @cached_property
    def by_lhs(self) -> dict:
        out = defaultdict(list)
        for i, r in enumerate(self.rules, 1):
            out[r.lhs].append(i)
        return dict(out)

    def rule(self, label: int) -> Rule:
        if not 1 <= label <= len(self.rules):
            raise GrammarError(f"no rule with label {label}")
        return self.rules[label - 1]

    def is_nonterminal(self, x) -> bool:
        return x in self.nonterminals

    @property
    def is_empty_language(self) -> bool:
        return not self.rules

    def size(self) -> int:
        return len(self.nonterminals)

    def __str__(self):
        return format_grammar(self, strict=False)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\S+")
_NONTERMINAL = re.compile(r"[A-Z][A-Za-z0-9_']*\Z")
_TERMINAL = re.compile(r"[a-z0-9]\Z")


def parse_grammar(text: str) -> Grammar:
    axiom = None
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip()
        stripped = line.lstrip()
        if not stripped or stripped.startswith("#"):
            continue
        col0 = len(line) - len(stripped) + 1
        if stripped.startswith("axiom:"):
            if axiom is not None:
                raise GrammarSyntaxError("duplicate axiom line", lineno, col0)
            name = stripped[len("axiom:"):].strip()
            if not _NONTERMINAL.match(name):
                raise GrammarSyntaxError(f"bad axiom name {name!r}", lineno, col0 + 6)
            axiom = name
            continue
        if "->" not in stripped:
            raise GrammarSyntaxError("expected '->'", lineno, col0)
        arrow = line.index("->")
        lhs = line[:arrow].strip()
        if not _NONTERMINAL.match(lhs):
            raise GrammarSyntaxError(f"bad left-hand side {lhs!r}", lineno, col0)
        body_start = arrow + 2
        for alt_start, alt in _split_alternatives(line, body_start):
            rhs = []
            for m in _TOKEN.finditer(alt):
                tok, col = m.group(), alt_start + m.start() + 1
                if tok == "eps":
                    continue
                if _NONTERMINAL.match(tok):
                    rhs.append(tok)
                elif _TERMINAL.match(tok):
                    rhs.append(tok)
                elif re.fullmatch(r"[a-z0-9]+", tok):
                    raise GrammarSyntaxError(f"multi-character terminal {tok!r}", lineno, col)
                else:
                    raise GrammarSyntaxError(f"bad token {tok!r}", lineno, col)
            rules.append((lhs, tuple(rhs)))
    if axiom is None:
        raise GrammarSyntaxError("missing 'axiom:' line", 1, 1)
    if not rules:
        raise EmptyRuleSetError("grammar has no rules")
    lhss = {lhs for lhs, _ in rules}
    used = {x for _, rhs in rules for x in rhs if _NONTERMINAL.match(x)}
    if axiom not in lhss:
        raise UndeclaredSymbolError(f"axiom {axiom} has no rules")
    return Grammar.make(rules, axiom, nonterminals=lhss | used | {axiom})


def _split_alternatives(line, start):
    pos = start
    for part in line[start:].split("|"):
        yield pos, part
        pos += len(part) + 1


def format_grammar(g: Grammar, strict: bool = True) -> str:
    """Render in the grammar file format.

    With ``strict`` nonterminals that are not valid identifiers are renamed
    N1, N2, ... (axiom first, then by first occurrence) so the text parses
    back; terminals must then be single characters.
    """
    names = {}
    if strict:
        order = [g.axiom] + [r.lhs for r in g.rules] + [x for r in g.rules for x in r.rhs if x in g.nonterminals]
        taken = {x for x in order if isinstance(x, str) and _NONTERMINAL.match(x)}
        counter = 0
        for x in order:
            if x in names:
                continue
            if isinstance(x, str) and _NONTERMINAL.match(x):
                names[x] = x
                continue
            counter += 1
            while f"N{counter}" in taken:
                counter += 1
            names[x] = f"N{counter}"
        for t in g.terminals:
            if not (isinstance(t, str) and _TERMINAL.match(t)):
                raise GrammarError(f"terminal {t!r} cannot be written in file format")

    def name(x):
        if x in g.nonterminals:
            return names.get(x, fmt_symbol(x))
        return fmt_symbol(x)

    lines = [f"axiom: {name(g.axiom)}"]
    grouped: dict = {}
    for r in g.rules:
        grouped.setdefault(r.lhs, []).append(" ".join(name(x) for x in r.rhs) or "eps")
    for lhs, alts in grouped.items():
        lines.append(f"{name(lhs)} -> " + " | ".join(alts))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- analysis

def nullable_set(g: Grammar) -> set:
    nullable = set()
    changed = True
    while changed:
        changed = False
        for r in g.rules:
            if r.lhs not in nullable and all(x in nullable for x in r.rhs):
                nullable.add(r.lhs)
                changed = True
    return nullable


def productive_set(g: Grammar) -> set:
    missing = []
    waiting = defaultdict(list)
    todo = []
    for i, r in enumerate(g.rules):
        nts = {x for x in r.rhs if x in g.nonterminals}
        missing.append(len(nts))
        for x in nts:
            waiting[x].append(i)
        if not nts:
            todo.append(r.lhs)
    prod = set()
    while todo:
        a = todo.pop()
        if a in prod:
            continue
        prod.add(a)
        for i in waiting.get(a, ()):
            missing[i] -= 1
            if missing[i] == 0:
                todo.append(g.rules[i].lhs)
    return prod


def reachable_set(g: Grammar, roots=None) -> set:
    roots = [g.axiom] if roots is None else list(roots)
    seen = set(roots)
    stack = list(roots)
    by_lhs = g.by_lhs
    while stack:
        a = stack.pop()
        for i in by_lhs.get(a, ()):
            for x in g.rules[i - 1].rhs:
                if x in g.nonterminals and x not in seen:
                    seen.add(x)
                    stack.append(x)
    return seen


def derives_empty(g: Grammar, x=None) -> bool:
    return (g.axiom if x is None else x) in nullable_set(g)


def empty_language(g: Grammar) -> Grammar:
    return Grammar(frozenset(g.terminals), frozenset([g.axiom]), (), g.axiom, "general")


def reduce(g: Grammar, roots=None) -> Grammar:
    """Drop unproductive, then unreachable, nonterminals.

    ``roots`` widens reachability to several start symbols (the axiom is
    always kept).  An unproductive axiom yields a rule-less grammar.
    """
    prod = productive_set(g)
    roots = [g.axiom] if roots is None else [g.axiom, *roots]
    roots = [x for x in roots if x in prod]
    if g.axiom not in prod and not roots:
        return empty_language(g)
    kept = [r for r in g.rules if r.lhs in prod and all(x in prod or x not in g.nonterminals for x in r.rhs)]
    tmp = Grammar.make(kept, g.axiom, nonterminals=prod | {g.axiom}, terminals=())
    reach = reachable_set(tmp, roots)
    kept = [r for r in kept if r.lhs in reach]
    if not kept:
        return empty_language(g)
    nts = reach | {g.axiom}
    return Grammar.make(kept, g.axiom, nonterminals=nts, terminals=g.terminals, tag=g.tag)


def _dedupe(rules):
    seen = set()
    out = []
    for r in rules:
        r = Rule(r[0], tuple(r[1]))
        if r not in seen:
            seen.add(r)
            out.append(r)
    return out


def to_cnf(g: Grammar, roots=None) -> Grammar:
    """Chomsky normal form via TERM, BIN, DEL and UNIT.

    Every original nonterminal A keeps its name and L(A) minus the empty word.
    ε ∈ L(g) is dropped; use ``derives_empty`` to keep that bit.
    """
    g = reduce(g, roots)
    if g.is_empty_language:
        return g
    nts = set(g.nonterminals)
    taken = set(nts) | set(g.terminals)

    lifted = {}

    def lift(a):
        if a not in lifted:
            name = fresh(Aux("T", a), taken)
            taken.add(name)
            lifted[a] = name
        return lifted[a]

    rules = []
    for r in g.rules:
        if len(r.rhs) >= 2:
            rules.append(Rule(r.lhs, tuple(x if x in nts else lift(x) for x in r.rhs)))
        else:
            rules.append(r)
    rules += [Rule(n, (a,)) for a, n in lifted.items()]
    nts |= set(lifted.values())

    binned = []
    for i, r in enumerate(rules):
        if len(r.rhs) <= 2:
            binned.append(r)
            continue
        prev = r.lhs
        for k in range(len(r.rhs) - 2):
            name = fresh(Aux("B", (i, k)), taken)
            taken.add(name)
            nts.add(name)
            binned.append(Rule(prev, (r.rhs[k], name)))
            prev = name
        binned.append(Rule(prev, r.rhs[-2:]))

    tmp = Grammar.make(binned, g.axiom, nonterminals=nts)
    nullable = nullable_set(tmp)
    no_eps = []
    for r in binned:
        options = [((x,), ()) if x in nullable else ((x,),) for x in r.rhs]
        for parts in product(*options):
            rhs = tuple(y for p in parts for y in p)
            if rhs:
                no_eps.append(Rule(r.lhs, rhs))
    no_eps = _dedupe(no_eps)

    unit_edges = defaultdict(set)
    for r in no_eps:
        if len(r.rhs) == 1 and r.rhs[0] in nts:
            unit_edges[r.lhs].add(r.rhs[0])
    unit = {}
    for a in nts:
        seen = {a}
        stack = [a]
        while stack:
            for b in unit_edges.get(stack.pop(), ()):
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        unit[a] = seen
    by_lhs = defaultdict(list)
    for r in no_eps:
        if not (len(r.rhs) == 1 and r.rhs[0] in nts):
            by_lhs[r.lhs].append(r.rhs)
    final = []
    rank = {}
    for r in binned:
        for x in (r.lhs,) + r.rhs:
            if x in nts:
                rank.setdefault(x, len(rank))
    order = sorted(nts, key=lambda x: (x != g.axiom, rank.get(x, len(rank))))
    for a in order:
        for b in [a] + sorted(unit[a] - {a}, key=rank.get):
            for rhs in by_lhs.get(b, ()):
                final.append(Rule(a, rhs))
    out = Grammar.make(_dedupe(final), g.axiom, nonterminals=nts, terminals=g.terminals)
    out = reduce(out, roots)
    return Grammar.make(out.rules, out.axiom, nonterminals=out.nonterminals, terminals=g.terminals, tag="cnf")


def is_cnf(g: Grammar) -> bool:
    for r in g.rules:
        if len(r.rhs) == 1 and r.rhs[0] not in g.nonterminals:
            continue
        if len(r.rhs) == 2 and all(x in g.nonterminals for x in r.rhs):
            continue
        return False
    return True


# ---------------------------------------------------------------- enumeration

def _binary_rules(g: Grammar):
    """Split rules into length-≤2 right sides over fresh chain nonterminals."""
    taken = set(g.nonterminals) | set(g.terminals)
    nts = set(g.nonterminals)
    out = []
    for i, r in enumerate(g.rules):
        if len(r.rhs) <= 2:
            out.append(r)
            continue
        prev = r.lhs
        for k in range(len(r.rhs) - 2):
            name = fresh(Aux("E", (i, k)), taken)
            taken.add(name)
            nts.add(name)
            out.append(Rule(prev, (r.rhs[k], name)))
            prev = name
        out.append(Rule(prev, r.rhs[-2:]))
    return out, nts


def enumerate_nonterminals(g: Grammar, maxlen: int, cap: int = DEFAULT_WORD_CAP) -> dict:
    """Table A -> set of words of L(A) with length ≤ maxlen, for every A."""
    if maxlen < 0:
        raise ValueError("maxlen must be non-negative")
    rules, nts = _binary_rules(g)
    table = {a: [set() for _ in range(maxlen + 1)] for a in nts}

    def cell(x, n):
        if x in nts:
            return table[x][n]
        return {(x,)} if n == 1 else _EMPTY

    nullable = nullable_set(Grammar.make(rules, g.axiom, nonterminals=nts))
    loop_rules = []
    for r in rules:
        if len(r.rhs) == 1 and r.rhs[0] in nts:
            loop_rules.append(r)
        elif len(r.rhs) == 2 and any(x in nullable for x in r.rhs):
            loop_rules.append(r)
    stored = 0

    def apply(r, n, only_loops):
        words = set()
        if len(r.rhs) == 0:
            if n == 0:
                words.add(())
        elif len(r.rhs) == 1:
            words |= cell(r.rhs[0], n)
        else:
            x, y = r.rhs
            splits = [(0, n), (n, 0)] if only_loops else range(n + 1)
            for split in splits:
                i, j = (split, n - split) if not only_loops else split
                left = cell(x, i)
                if not left:
                    continue
                right = cell(y, j)
                if not right:
                    continue
                for u in left:
                    for v in right:
                        words.add(u + v)
        return words

    for n in range(maxlen + 1):
        for r in rules:
            new = apply(r, n, False) - table[r.lhs][n]
            if new:
                table[r.lhs][n] |= new
                stored += len(new)
        changed = True
        while changed:
            changed = False
            for r in loop_rules:
                new = apply(r, n, True) - table[r.lhs][n]
                if new:
                    table[r.lhs][n] |= new
                    stored += len(new)
                    changed = True
        if stored > cap:
            raise BudgetError(f"enumeration exceeded {cap} stored words at length {n}")
    return {a: set().union(*cells) for a, cells in table.items() if a in g.nonterminals}


def enumerate_language(g: Grammar, maxlen: int, cap: int = DEFAULT_WORD_CAP) -> set:
    """L(g) ∩ Σ^{≤maxlen} by dynamic programming over (nonterminal, length)."""
    if maxlen < 0:
        raise ValueError("maxlen must be non-negative")
    g = reduce(g)
    if g.is_empty_language:
        return set()
    return enumerate_nonterminals(g, maxlen, cap)[g.axiom]


def cyk_membership(g: Grammar, w) -> bool:
    w = tuple(w)
    if not w:
        raise ValueError("cyk_membership needs a nonempty word")
    if not is_cnf(g):
        raise GrammarError("cyk_membership needs a CNF grammar")
    n = len(w)
    term = defaultdict(set)
    binary = []
    for r in g.rules:
        if len(r.rhs) == 1:
            term[r.rhs[0]].add(r.lhs)
        else:
            binary.append(r)
    table = [[set() for _ in range(n + 1)] for _ in range(n)]
    for i, a in enumerate(w):
        table[i][1] = set(term.get(a, ()))
    for span in range(2, n + 1):
        for i in range(n - span + 1):
            cell = table[i][span]
            for k in range(1, span):
                left, right = table[i][k], table[i + k][span - k]
                if not left or not right:
                    continue
                for r in binary:
                    if r.rhs[0] in left and r.rhs[1] in right:
                        cell.add(r.lhs)
    return g.axiom in table[0][n]


def quotient_nonempty(g: Grammar, w) -> bool:
    """True iff some sentence of L(g) ends with w."""
    from .automata import Nfa, bar_hillel_intersect

    w = tuple(w)
    sigma = set(g.terminals) | set(w)
    trans = {(0, a, 0) for a in sigma}
    trans |= {(i, a, i + 1) for i, a in enumerate(w)}
    a = Nfa.make(range(len(w) + 1), sigma, trans, {0}, {len(w)})
    return not reduce(bar_hillel_intersect(g, a)).is_empty_language


# ---------------------------------------------------------------- fixtures

def gen_gruska(m: int) -> Grammar:
    """Grammar for { w w^R : w ∈ (ab)* ∪ (aab)* ∪ ... ∪ (a^m b)* }."""
    if m < 1:
        raise ValueError("m must be at least 1")
    rules = [("S", (f"S{i}",)) for i in range(1, m + 1)]
    for i in range(1, m + 1):
        body = ("a",) * i + ("b", f"S{i}", "b") + ("a",) * i
        rules.append((f"S{i}", body))
        rules.append((f"S{i}", ()))
    return Grammar.make(rules, "S")
