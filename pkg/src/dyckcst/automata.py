"""Regular-language machinery: ε-free NFAs, strictly locally testable
descriptors, Dyck membership with neutral symbols, Bar-Hillel intersection
and homomorphic images."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable

from .grammar import Aux, Grammar, Rule, fresh, reduce, sort_key, sorted_symbols


class ForeignSymbolError(ValueError):
    pass


# ---------------------------------------------------------------- NFA

@dataclass(frozen=True)
class Nfa:
    states: frozenset
    alphabet: frozenset
    transitions: frozenset
    initial: frozenset
    finals: frozenset

    def __post_init__(self):
        for p, a, q in self.transitions:
            if p not in self.states or q not in self.states:
                raise ValueError(f"transition {(p, a, q)!r} leaves the state set")
            if a not in self.alphabet:
                raise ValueError(f"transition symbol {a!r} not in the alphabet")
        if not self.initial <= self.states or not self.finals <= self.states:
            raise ValueError("initial/final states must be states")

    @classmethod
    def make(cls, states, alphabet, transitions, initial, finals):
        transitions = frozenset(transitions)
        alphabet = frozenset(alphabet) | {a for _, a, _ in transitions}
        states = frozenset(states) | {p for p, _, _ in transitions} | {q for _, _, q in transitions}
        states |= frozenset(initial) | frozenset(finals)
        return cls(states, alphabet, transitions, frozenset(initial), frozenset(finals))

    @classmethod
    def empty(cls, alphabet=()):
        return cls.make({0}, alphabet, (), {0}, ())

    @classmethod
    def epsilon(cls, alphabet=()):
        return cls.make({0}, alphabet, (), {0}, {0})

    @classmethod
    def from_words(cls, words, alphabet=()):
        """Trie automaton for a finite set of words."""
        trans = set()
        finals = set()
        for w in words:
            w = tuple(w)
            for i in range(len(w)):
                trans.add((w[:i], w[i], w[:i + 1]))
            finals.add(w)
        return cls.make({()}, alphabet, trans, {()}, finals).renumbered()

    @cached_property
    def succ(self) -> dict:
        out = defaultdict(list)
        for p, a, q in sorted(self.transitions, key=sort_key):
            out[p].append((a, q))
        return dict(out)

    @cached_property
    def pred(self) -> dict:
        out = defaultdict(list)
        for p, a, q in sorted(self.transitions, key=sort_key):
            out[q].append((a, p))
        return dict(out)

    @property
    def accepts_empty(self) -> bool:
        return bool(self.initial & self.finals)

    def step(self, states, a) -> frozenset:
        return frozenset(q for p in states for b, q in self.succ.get(p, ()) if b == a)

    def accepts(self, w) -> bool:
        cur = self.initial
        for a in w:
            cur = self.step(cur, a)
            if not cur:
                return False
        return bool(cur & self.finals)

    def accessible(self) -> set:
        seen = set(self.initial)
        todo = deque(self.initial)
        while todo:
            p = todo.popleft()
            for _, q in self.succ.get(p, ()):
                if q not in seen:
                    seen.add(q)
                    todo.append(q)
        return seen

    def coaccessible(self) -> set:
        seen = set(self.finals)
        todo = deque(self.finals)
        while todo:
            q = todo.popleft()
            for _, p in self.pred.get(q, ()):
                if p not in seen:
                    seen.add(p)
                    todo.append(p)
        return seen

    def trim(self) -> "Nfa":
        useful = self.accessible() & self.coaccessible()
        if not useful:
            return Nfa.empty(self.alphabet)
        trans = {(p, a, q) for p, a, q in self.transitions if p in useful and q in useful}
        return Nfa(frozenset(useful), self.alphabet, frozenset(trans),
                   self.initial & useful, self.finals & useful)

    def is_empty(self) -> bool:
        return not (self.accessible() & self.finals)

    def renumbered(self) -> "Nfa":
        """Rename states to 0..n-1 in breadth-first order from the sorted
        initial states, following sorted transitions; unreached states follow
        in sorted order."""
        order = {}
        todo = deque(sorted_symbols(self.initial))
        for s in todo:
            order.setdefault(s, len(order))
        while todo:
            p = todo.popleft()
            for _, q in self.succ.get(p, ()):
                if q not in order:
                    order[q] = len(order)
                    todo.append(q)
        for s in sorted_symbols(self.states):
            order.setdefault(s, len(order))
        return Nfa(frozenset(order.values()), self.alphabet,
                   frozenset((order[p], a, order[q]) for p, a, q in self.transitions),
                   frozenset(order[s] for s in self.initial),
                   frozenset(order[s] for s in self.finals))

    def words(self, maxlen: int) -> set:
        """All accepted words of length ≤ maxlen (subset-simulation DFS)."""
        out = set()
        live = self.coaccessible()
        stack = [((), frozenset(self.initial & live))]
        while stack:
            w, cur = stack.pop()
            if cur & self.finals:
                out.add(w)
            if len(w) == maxlen:
                continue
            nxt = defaultdict(set)
            for p in cur:
                for a, q in self.succ.get(p, ()):
                    if q in live:
                        nxt[a].add(q)
            for a, qs in nxt.items():
                stack.append((w + (a,), frozenset(qs)))
        return out

    def used_symbols(self) -> set:
        return {a for _, a, _ in self.transitions}


def nfa_union(*nfas: Nfa) -> Nfa:
    trans, init, fin, states, alpha = set(), set(), set(), set(), set()
    for i, a in enumerate(nfas):
        states |= {(i, s) for s in a.states}
        trans |= {((i, p), x, (i, q)) for p, x, q in a.transitions}
        init |= {(i, s) for s in a.initial}
        fin |= {(i, s) for s in a.finals}
        alpha |= a.alphabet
    if not nfas:
        return Nfa.empty()
    return Nfa.make(states, alpha, trans, init, fin)


def nfa_concat(a: Nfa, b: Nfa) -> Nfa:
    states = {(0, s) for s in a.states} | {(1, s) for s in b.states}
    trans = {((0, p), x, (0, q)) for p, x, q in a.transitions}
    trans |= {((1, p), x, (1, q)) for p, x, q in b.transitions}
    for f in a.finals:
        for i in b.initial:
            for x, q in b.succ.get(i, ()):
                trans.add(((0, f), x, (1, q)))
    init = {(0, s) for s in a.initial}
    if a.accepts_empty:
        init |= {(1, s) for s in b.initial}
    fin = {(1, s) for s in b.finals}
    if b.accepts_empty:
        fin |= {(0, s) for s in a.finals}
    return Nfa.make(states, a.alphabet | b.alphabet, trans, init, fin)


def nfa_path(word, alphabet=()) -> Nfa:
    word = tuple(word)
    trans = {(i, x, i + 1) for i, x in enumerate(word)}
    return Nfa.make(range(len(word) + 1), alphabet, trans, {0}, {len(word)})


@dataclass(frozen=True)
class _PathState:
    src: Hashable
    symbol: Hashable
    dst: Hashable
    pos: int

    def sort_key(self):
        return (sort_key(self.src), sort_key(self.symbol), sort_key(self.dst), self.pos)


def nfa_word_image(a: Nfa, h, partial: bool = False) -> Nfa:
    """Replace every transition by a path spelling its nonempty h-image.
    With ``partial``, transitions on symbols outside h's domain are dropped."""
    trans = set()
    states = set(a.states)
    alphabet = set()
    for p, x, q in a.transitions:
        if partial and x not in h:
            continue
        img = tuple(h[x])
        if not img:
            raise ValueError(f"erasing image for {x!r}; word images must be nonempty")
        alphabet.update(img)
        prev = p
        for k, y in enumerate(img):
            nxt = q if k == len(img) - 1 else _PathState(p, x, q, k + 1)
            states.add(nxt)
            trans.add((prev, y, nxt))
            prev = nxt
    if not a.transitions:
        for x in a.alphabet:
            alphabet.update(h.get(x, ()))
    return Nfa.make(states, alphabet, trans, a.initial, a.finals)


# ---------------------------------------------------------------- SLT

@dataclass(frozen=True)
class SltDescriptor:
    """Width-k strictly locally testable language.

    Words shorter than k belong iff they are in ``W``; longer words must start
    with a member of ``I``, end with a member of ``T`` and have all k-factors in
    ``F``.  ``accepts_empty`` adds the empty word.
    """

    k: int
    W: frozenset
    I: frozenset
    T: frozenset
    F: frozenset
    accepts_empty: bool = False

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("SLT width must be at least 2")
        if any(not 0 < len(w) < self.k for w in self.W):
            raise ValueError("short words must have length in [1, k)")
        if any(len(w) != self.k - 1 for w in self.I | self.T):
            raise ValueError("prefixes and suffixes must have length k-1")
        if any(len(w) != self.k for w in self.F):
            raise ValueError("factors must have length k")

    @classmethod
    def make(cls, k, W=(), I=(), T=(), F=(), accepts_empty=False):
        fz = lambda xs: frozenset(tuple(x) for x in xs)
        return cls(k, fz(W), fz(I), fz(T), fz(F), accepts_empty)

    def symbols(self) -> set:
        return {x for part in (self.W, self.I, self.T, self.F) for w in part for x in w}


def slt_membership(d: SltDescriptor, w) -> bool:
    w = tuple(w)
    if not w:
        return d.accepts_empty
    if w in d.W:
        return True
    k = d.k
    if len(w) < k:
        return False
    if w[:k - 1] not in d.I or w[-(k - 1):] not in d.T:
        return False
    return all(w[i:i + k] in d.F for i in range(len(w) - k + 1))


def slt_to_nfa(d: SltDescriptor) -> Nfa:
    """Sliding-window automaton.

    States ("short", u) track prefixes shorter than k-1; ("pre", u) is the
    prefix u ∈ I itself, which is too short to accept; ("win", v) tracks the
    last k-1 symbols once at least one full factor has been read.
    """
    k = d.k
    start = ("short", ())
    trans = set()
    finals = set()
    states = {start}
    if d.accepts_empty:
        finals.add(start)
    for w in d.W:
        for i in range(len(w)):
            src = ("short", w[:i])
            dst = ("short", w[:i + 1])
            trans.add((src, w[i], dst))
        finals.add(("short", w))
    for u in d.I:
        for i in range(k - 2):
            trans.add((("short", u[:i]), u[i], ("short", u[:i + 1])))
        trans.add((("short", u[:k - 2]), u[k - 2], ("pre", u)))
    for f in d.F:
        trans.add((("win", f[:-1]), f[-1], ("win", f[1:])))
        if f[:-1] in d.I:
            trans.add((("pre", f[:-1]), f[-1], ("win", f[1:])))
    for t in d.T:
        finals.add(("win", t))
    return Nfa.make(states, d.symbols(), trans, {start}, finals).trim()


def slt_hull(a: Nfa, k: int) -> SltDescriptor:
    """Smallest width-k SLT descriptor whose language contains L(a)."""
    a = a.trim()
    W = {w for w in a.words(k - 1) if w}
    acc, coacc = a.accessible(), a.coaccessible()

    def paths(sources, length):
        layer = {((), s) for s in sources}
        for _ in range(length):
            layer = {(w + (x,), q) for w, p in layer for x, q in a.succ.get(p, ())}
        return layer

    # states with a nonempty path to a final / from an initial
    to_final = {p for p in a.states if any(q in coacc for _, q in a.succ.get(p, ()))}
    from_init = {q for q in a.states if any(p in acc for _, p in a.pred.get(q, ()))}
    I = {w for w, q in paths(a.initial, k - 1) if q in to_final}
    T = set()
    for w, q in paths(from_init, k - 1):
        if q in a.finals:
            T.add(w)
    F = {w for w, q in paths(acc, k) if q in coacc}
    return SltDescriptor.make(k, W, I, T, F, a.accepts_empty)


def slt_agreement(d: SltDescriptor, a: Nfa, maxlen: int, alphabet=None):
    """Compare the descriptor's decider with an NFA on every word up to
    ``maxlen`` that the descriptor's prefix/factor structure admits, plus
    every word the NFA accepts.  Returns the list of disagreeing words."""
    nfa_words = a.words(maxlen)
    cand = set(nfa_words)
    for w in list(d.W):
        cand.add(w)
    k = d.k
    by_prefix = defaultdict(list)
    for f in d.F:
        by_prefix[f[:-1]].append(f[-1])
    stack = [tuple(u) for u in d.I]
    while stack:
        w = stack.pop()
        cand.add(w)
        if len(w) >= maxlen:
            continue
        for x in by_prefix.get(w[-(k - 1):], ()):
            stack.append(w + (x,))
    bad = []
    for w in sorted(cand, key=lambda w: (len(w), sort_key(w))):
        if len(w) > maxlen:
            continue
        if (w in nfa_words) != slt_membership(d, w):
            bad.append(w)
    return bad


# ---------------------------------------------------------------- Dyck

class DyckSpec:
    """Interface: classify symbols and match opens to closes."""

    def kind(self, x) -> str:
        raise NotImplementedError

    def match(self, x):
        raise NotImplementedError


@dataclass(frozen=True)
class FiniteDyck(DyckSpec):
    opens: frozenset
    closes: frozenset
    neutrals: frozenset
    pairs: tuple  # (open, close) pairs

    def __post_init__(self):
        if (self.opens & self.closes) or (self.opens & self.neutrals) or (self.closes & self.neutrals):
            raise ValueError("opens, closes and neutrals must be disjoint")
        m = dict(self.pairs)
        if set(m) != set(self.opens) or set(m.values()) != set(self.closes) or len(m) != len(self.pairs):
            raise ValueError("match must be a bijection from opens onto closes")

    @classmethod
    def make(cls, pairs, neutrals=()):
        pairs = tuple(sorted(((o, c) for o, c in pairs), key=sort_key))
        return cls(frozenset(o for o, _ in pairs), frozenset(c for _, c in pairs),
                   frozenset(neutrals), pairs)

    @cached_property
    def _match(self):
        return dict(self.pairs)

    def kind(self, x) -> str:
        if x in self.opens:
            return "open"
        if x in self.closes:
            return "close"
        if x in self.neutrals:
            return "neutral"
        raise ForeignSymbolError(f"symbol {x!r} is not in the Dyck alphabet")

    def match(self, x):
        return self._match[x]


def dyck_check(spec: DyckSpec, w) -> bool:
    stack = []
    ok = True
    for x in w:
        kind = spec.kind(x)  # classify every symbol so foreign ones always raise
        if not ok or kind == "neutral":
            continue
        if kind == "open":
            stack.append(spec.match(x))
        elif not stack or stack.pop() != x:
            ok = False
    return ok and not stack


def dyck_grammar(spec: DyckSpec, symbols) -> Grammar:
    """Dyck grammar (with neutral rules) restricted to the given symbols."""
    symbols = set(symbols)
    s = Aux("D")
    rules = [(s, ()), (s, (s, s))]
    for x in sorted_symbols(symbols):
        kind = spec.kind(x)
        if kind == "neutral":
            rules.append((s, (x,)))
        elif kind == "open":
            c = spec.match(x)
            if c in symbols:
                p, q = Aux("P", x), Aux("Q", x)
                rules += [(s, (p, s, q)), (p, (x,)), (q, (c,))]
    return Grammar.make(rules, s)


# ---------------------------------------------------------------- Bar-Hillel

def _lift_terminals(g: Grammar):
    """Rewrite so each rhs is a single terminal or a word of nonterminals of
    length ≤ 2."""
    taken = set(g.nonterminals) | set(g.terminals)
    nts = set(g.nonterminals)
    lifted = {}
    out = []

    def lift(a):
        if a not in lifted:
            name = fresh(Aux("L", a), taken)
            taken.add(name)
            nts.add(name)
            lifted[a] = name
            out.append(Rule(name, (a,)))
        return lifted[a]

    for i, r in enumerate(g.rules):
        rhs = r.rhs
        if len(rhs) >= 2:
            rhs = tuple(x if x in g.nonterminals else lift(x) for x in rhs)
        if len(rhs) <= 2:
            out.append(Rule(r.lhs, rhs))
            continue
        prev = r.lhs
        for k in range(len(rhs) - 2):
            name = fresh(Aux("H", (i, k)), taken)
            taken.add(name)
            nts.add(name)
            out.append(Rule(prev, (rhs[k], name)))
            prev = name
        out.append(Rule(prev, rhs[-2:]))
    return out, nts


def bar_hillel_intersect(g: Grammar, a: Nfa) -> Grammar:
    """Grammar for L(g) ∩ L(a) on triples (p, A, q), built by an agenda that
    only ever creates productive triples."""
    a = a.trim()
    start = fresh(Aux("BH"), set())
    g = reduce(g)
    if g.is_empty_language or a.is_empty():
        return Grammar.make([], start, terminals=g.terminals & a.alphabet)
    rules, nts = _lift_terminals(g)
    by_sym = defaultdict(list)
    for p, x, q in a.transitions:
        by_sym[x].append((p, q))
    unit_by_child = defaultdict(list)
    bin_by_left = defaultdict(list)
    bin_by_right = defaultdict(list)
    items = set()
    agenda = deque()

    def add(item):
        if item not in items:
            items.add(item)
            agenda.append(item)

    for r in rules:
        if not r.rhs:
            for p in a.states:
                add((p, r.lhs, p))
        elif len(r.rhs) == 1 and r.rhs[0] not in nts:
            for p, q in by_sym.get(r.rhs[0], ()):
                add((p, r.lhs, q))
        elif len(r.rhs) == 1:
            unit_by_child[r.rhs[0]].append(r.lhs)
        else:
            bin_by_left[r.rhs[0]].append((r.lhs, r.rhs[1]))
            bin_by_right[r.rhs[1]].append((r.lhs, r.rhs[0]))
    right_of = defaultdict(set)  # (X, p) -> {q}
    left_of = defaultdict(set)  # (X, q) -> {p}
    while agenda:
        p, x, q = agenda.popleft()
        right_of[(x, p)].add(q)
        left_of[(x, q)].add(p)
        for y in unit_by_child.get(x, ()):
            add((p, y, q))
        for y, z in bin_by_left.get(x, ()):
            for q2 in list(right_of.get((z, q), ())):
                add((p, y, q2))
        for y, z in bin_by_right.get(x, ()):
            for p2 in list(left_of.get((z, p), ())):
                add((p2, y, q))
    trans = set(a.transitions)
    by_lhs = defaultdict(list)
    for r in rules:
        by_lhs[r.lhs].append(r)
    out = []
    for item in sorted(items, key=sort_key):
        p, x, q = item
        for r in by_lhs.get(x, ()):
            if not r.rhs:
                if p == q:
                    out.append((item, ()))
            elif len(r.rhs) == 1 and r.rhs[0] not in nts:
                if (p, r.rhs[0], q) in trans:
                    out.append((item, r.rhs))
            elif len(r.rhs) == 1:
                if (p, r.rhs[0], q) in items:
                    out.append((item, ((p, r.rhs[0], q),)))
            else:
                y, z = r.rhs
                for mid in sorted(right_of.get((y, p), ()), key=sort_key):
                    if (mid, z, q) in items:
                        out.append((item, ((p, y, mid), (mid, z, q))))
    for i in sorted(a.initial, key=sort_key):
        for f in sorted(a.finals, key=sort_key):
            if (i, g.axiom, f) in items:
                out.append((start, ((i, g.axiom, f),)))
    nonterminals = items | {start}
    res = Grammar.make(out, start, nonterminals=nonterminals, terminals=())
    return reduce(res)


# ---------------------------------------------------------------- images

def grammar_hom_image(g: Grammar, h) -> Grammar:
    """Grammar for h(L(g)).  ``h`` maps each terminal to a symbol, or to a
    tuple/list word (possibly empty, which erases the terminal)."""
    def img(x):
        y = h[x]
        return tuple(y) if isinstance(y, (tuple, list)) else (y,)

    rules = []
    for r in g.rules:
        rhs = []
        for x in r.rhs:
            if x in g.nonterminals:
                rhs.append(x)
            else:
                rhs.extend(img(x))
        rules.append((r.lhs, tuple(rhs)))
    ts = set()
    for x in g.terminals:
        if x in h:
            ts.update(img(x))
    return Grammar.make(rules, g.axiom, nonterminals=g.nonterminals, terminals=ts)
