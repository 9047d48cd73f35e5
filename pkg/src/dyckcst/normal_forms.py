"""Normal forms over blocks of terminals: tuple alphabets, quotiented CNF,
cubic double Greibach form and quotiented DGNF."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import product

from .grammar import (
    Aux,
    Grammar,
    GrammarError,
    fmt_symbol,
    fresh,
    is_cnf,
    nullable_set,
    quotient_nonempty,
    reduce,
    sort_key,
    sorted_symbols,
    to_cnf,
)


class LengthNotDivisibleError(ValueError):
    pass


class ShapeError(GrammarError):
    pass


@dataclass(frozen=True)
class TupleSymbol:
    letters: tuple

    def __post_init__(self):
        if not self.letters:
            raise ValueError("a tuple symbol needs at least one letter")

    def sort_key(self):
        return tuple(sort_key(x) for x in self.letters)

    def __str__(self):
        return "<" + "".join(str(x) for x in self.letters) + ">"

    def __len__(self):
        return len(self.letters)


def condense_word(w, r: int) -> tuple:
    w = tuple(w)
    if len(w) % r:
        raise LengthNotDivisibleError(f"length {len(w)} is not a multiple of {r}")
    return tuple(TupleSymbol(w[i:i + r]) for i in range(0, len(w), r))


def expand_word(w) -> tuple:
    out = []
    for x in w:
        if isinstance(x, TupleSymbol):
            out.extend(x.letters)
        else:
            out.append(x)
    return tuple(out)


def tuple_map(x, r: int, direction: str):
    """Condense blocks of r terminals into tuple symbols, or expand them back.

    Works on words and on grammars; for grammars every maximal terminal run
    in every right side must have length divisible by r.
    """
    if direction not in ("condense", "expand"):
        raise ValueError("direction must be 'condense' or 'expand'")
    if not isinstance(x, Grammar):
        return condense_word(x, r) if direction == "condense" else expand_word(x)
    g = x
    rules = []
    for rule in g.rules:
        if direction == "expand":
            rules.append((rule.lhs, expand_word(rule.rhs)))
            continue
        rhs, run = [], []
        for s in rule.rhs + (None,):
            if s is not None and s not in g.nonterminals:
                run.append(s)
                continue
            if run:
                rhs.extend(condense_word(run, r))
                run = []
            if s is not None:
                rhs.append(s)
        rules.append((rule.lhs, tuple(rhs)))
    return Grammar.make(rules, g.axiom, nonterminals=g.nonterminals, tag=g.tag)


# ---------------------------------------------------------------- shapes

@dataclass(frozen=True)
class QcnfNonterminal:
    base: object
    left: tuple
    right: tuple
    end: bool = False

    def sort_key(self):
        return (sort_key(self.base), sort_key(self.left), sort_key(self.right), self.end)

    def __str__(self):
        u = "".join(map(str, self.left)) or "ε"
        v = "".join(map(str, self.right)) or "ε"
        return f"<{fmt_symbol(self.base)},{u},{v}{'⊣' if self.end else ''}>"


@dataclass(frozen=True)
class QuotientedGrammar:
    grammar: Grammar
    order: int
    axiom_rules: tuple  # ((X, w), ...)
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def body_rules(self):
        return [r for r in self.grammar.rules if r.lhs != self.grammar.axiom]


def _is_terminal_word(g, w):
    return all(x not in g.nonterminals for x in w)


def is_quotiented(qg: QuotientedGrammar) -> bool:
    g, r = qg.grammar, qg.order
    for rule in g.rules:
        if g.axiom in rule.rhs:
            return False
        if rule.lhs == g.axiom:
            if not rule.rhs or rule.rhs[0] not in g.nonterminals:
                return False
            tail = rule.rhs[1:]
            if not _is_terminal_word(g, tail) or len(tail) >= r:
                return False
        else:
            run = 0
            for x in rule.rhs + (None,):
                if x is not None and x not in g.nonterminals:
                    run += 1
                    continue
                if run % r:
                    return False
                run = 0
    return True


def is_q_cnf(qg: QuotientedGrammar) -> bool:
    g, r = qg.grammar, qg.order
    if not is_quotiented(qg):
        return False
    for rule in qg.body_rules:
        rhs = rule.rhs
        if not rhs:
            continue
        if len(rhs) == 2 and all(x in g.nonterminals for x in rhs):
            continue
        if len(rhs) == r and _is_terminal_word(g, rhs):
            continue
        return False
    return True


def is_q_dgnf(qg: QuotientedGrammar) -> bool:
    g, r = qg.grammar, qg.order
    if not is_quotiented(qg):
        return False
    for rule in qg.body_rules:
        rhs = rule.rhs
        if not rhs or (len(rhs) == r and _is_terminal_word(g, rhs)):
            continue
        if len(rhs) < 2 * r:
            return False
        head, mid, tail = rhs[:r], rhs[r:-r], rhs[-r:]
        if not (_is_terminal_word(g, head) and _is_terminal_word(g, tail)):
            return False
        if any(x not in g.nonterminals for x in mid):
            return False
    return True


def is_cubic_dgnf(g: Grammar) -> bool:
    for rule in g.rules:
        rhs = rule.rhs
        if len(rhs) == 1 and rhs[0] not in g.nonterminals:
            continue
        if not 2 <= len(rhs) <= 5:
            return False
        if rhs[0] in g.nonterminals or rhs[-1] in g.nonterminals:
            return False
        if any(x not in g.nonterminals for x in rhs[1:-1]):
            return False
    return True


def is_even_dgnf(g: Grammar) -> bool:
    for rule in g.rules:
        rhs = rule.rhs
        if len(rhs) < 2 or rhs[0] in g.nonterminals or rhs[-1] in g.nonterminals:
            return False
        if any(x not in g.nonterminals for x in rhs[1:-1]):
            return False
    return True


def _start_name(base, taken):
    if isinstance(base, str):
        name = base + "'"
        while name in taken:
            name += "'"
        return name
    return fresh(Aux("S'"), taken)


# ---------------------------------------------------------------- Q-CNF

def _carry_table(g: Grammar, r: int):
    """Least fixpoint of outs(A, u) = {v : ⟨A, u, v⟩ is productive}, over the
    (A, u) pairs demanded top-down from (axiom, ε).

    ⟨A, u, v⟩ stands for: with carry-in u, A's yield y satisfies
    u·y = x·v where x has length ≡ 0 (mod r) and |v| < r.
    """
    term = defaultdict(list)
    binary = defaultdict(list)
    for rule in g.rules:
        if len(rule.rhs) == 1:
            term[rule.lhs].append(rule.rhs[0])
        else:
            binary[rule.lhs].append(rule.rhs)
    outs = defaultdict(set)
    order = [(g.axiom, ())]
    demanded = set(order)

    def demand(key):
        if key not in demanded:
            demanded.add(key)
            order.append(key)
            return True
        return False

    changed = True
    while changed:
        changed = False
        for key in list(order):
            a, u = key
            new = set()
            for t in term[a]:
                ua = u + (t,)
                new.add(() if len(ua) == r else ua)
            for b, c in binary[a]:
                changed |= demand((b, u))
                for t in list(outs[(b, u)]):
                    changed |= demand((c, t))
                    new |= outs[(c, t)]
            if not new <= outs[key]:
                outs[key] |= new
                changed = True
    return outs, term, binary


def to_q_cnf(g: Grammar, r: int) -> QuotientedGrammar:
    """Quotiented CNF of order r.

    Nonterminal ⟨A, u, v, ⊣⟩ derives the r-aligned part of A's yield given the
    carry-in u, leaving the carry-out v to later siblings (or to the axiom
    rule's suffix when ⊣ marks the rightmost spine).  Only clause instances
    reachable from the axiom and productive are generated.
    """
    if r < 1:
        raise ValueError("order must be at least 1")
    g = reduce(g)
    if g.is_empty_language:
        start = _start_name(g.axiom, set())
        return QuotientedGrammar(Grammar.make([], start, terminals=g.terminals, tag=f"q-cnf({r})"), r, ())
    if not is_cnf(g):
        raise ShapeError("to_q_cnf needs a CNF grammar")
    outs, term, binary = _carry_table(g, r)
    roots = []
    for w in sorted(outs[(g.axiom, ())], key=lambda w: (len(w), sort_key(w))):
        if quotient_nonempty(g, w):
            roots.append((QcnfNonterminal(g.axiom, (), w, True), w))
    rules = []
    seen = {x for x, _ in roots}
    todo = deque(x for x, _ in roots)
    while todo:
        x = todo.popleft()
        a, u, v = x.base, x.left, x.right
        for t in term[a]:
            ua = u + (t,)
            if len(ua) == r and not v:
                rules.append((x, ua))
            elif len(ua) < r and v == ua:
                rules.append((x, ()))
        for b, c in binary[a]:
            for t in sorted(outs[(b, u)], key=sort_key):
                if v in outs[(c, t)]:
                    left = QcnfNonterminal(b, u, t, False)
                    right = QcnfNonterminal(c, t, v, x.end)
                    rules.append((x, (left, right)))
                    for y in (left, right):
                        if y not in seen:
                            seen.add(y)
                            todo.append(y)
    start = _start_name(g.axiom, seen)
    axiom_rules = [(start, (x,) + w) for x, w in roots]
    nts = seen | {start}
    out = Grammar.make(axiom_rules + rules, start, nonterminals=nts, terminals=g.terminals)
    out = reduce(out)
    out = Grammar.make(out.rules, out.axiom, nonterminals=out.nonterminals,
                       terminals=g.terminals, tag=f"q-cnf({r})")
    kept = tuple((x, w) for x, w in roots if (start, (x,) + w) in out.rules)
    return QuotientedGrammar(out, r, kept, {"nonterminals": len(out.nonterminals), "rules": len(out.rules)})


# ---------------------------------------------------------------- cubic DGNF

@dataclass(frozen=True)
class RegSet:
    """A regular subset of N*, as initial/final state sets of a fixed graph."""

    I: frozenset
    F: frozenset

    def sort_key(self):
        return (tuple(sorted((sort_key(x) for x in self.I))), tuple(sorted((sort_key(x) for x in self.F))))

    def __str__(self):
        return "{" + ",".join(fmt_symbol(x) for x in sorted_symbols(self.I)) + "|" + \
            ",".join(fmt_symbol(x) for x in sorted_symbols(self.F)) + "}"


class _SetGraph:
    def __init__(self, g: Grammar, roots):
        self.succ = defaultdict(list)
        self.pred = defaultdict(list)
        self.term = defaultdict(set)  # B -> {a : B -> a}
        self.by_term = defaultdict(set)  # a -> {B : B -> a}
        for rule in g.rules:
            if len(rule.rhs) == 1:
                self.term[rule.lhs].add(rule.rhs[0])
                self.by_term[rule.rhs[0]].add(rule.lhs)
            else:
                b, c = rule.rhs
                self._edge(("L", b), c, ("L", rule.lhs))
                self._edge(("R", rule.lhs), b, ("R", c))
        for x in roots:
            self._edge(("S0", x), x, ("S1", x))
        self._fwd = {}
        self._bwd = {}
        # terminals that can start / end a derivation from B
        self.lc = {}
        self.rc = {}
        for b in g.nonterminals:
            self.lc[b] = {a for a in self.by_term if not self.is_empty(self.left_set(a, b))}
            self.rc[b] = {a for a in self.by_term if not self.is_empty(self.right_set(b, a))}

    def _edge(self, p, x, q):
        self.succ[p].append((x, q))
        self.pred[q].append((x, p))

    def _closure(self, states, adj, memo):
        key = frozenset(states)
        if key not in memo:
            seen = set(key)
            todo = list(key)
            while todo:
                p = todo.pop()
                for _, q in adj.get(p, ()):
                    if q not in seen:
                        seen.add(q)
                        todo.append(q)
            memo[key] = frozenset(seen)
        return memo[key]

    def norm(self, I, F) -> RegSet:
        I, F = frozenset(I), frozenset(F)
        fwd = self._closure(I, self.succ, self._fwd)
        bwd = self._closure(F, self.pred, self._bwd)
        return RegSet(I & bwd, F & fwd)

    def is_empty(self, y: RegSet) -> bool:
        return not y.I

    def has_eps(self, y: RegSet) -> bool:
        return bool(y.I & y.F)

    def first(self, y: RegSet) -> list:
        bwd = self._closure(y.F, self.pred, self._bwd)
        return sorted({x for p in y.I for x, q in self.succ.get(p, ()) if q in bwd}, key=sort_key)

    def last(self, y: RegSet) -> list:
        fwd = self._closure(y.I, self.succ, self._fwd)
        return sorted({x for q in y.F for x, p in self.pred.get(q, ()) if p in fwd}, key=sort_key)

    def has_word(self, y: RegSet) -> bool:
        return bool(self.first(y))

    def contains_letter(self, y: RegSet, x) -> bool:
        return any(b == x and q in y.F for p in y.I for b, q in self.succ.get(p, ()))

    def lq(self, y: RegSet, x) -> RegSet:
        return self.norm({q for p in y.I for b, q in self.succ.get(p, ()) if b == x}, y.F)

    def rq(self, y: RegSet, x) -> RegSet:
        return self.norm(y.I, {p for q in y.F for b, p in self.pred.get(q, ()) if b == x})

    def left_set(self, a, b) -> RegSet:
        return self.norm({("L", c) for c in self.by_term[a]}, {("L", b)})

    def right_set(self, b, a) -> RegSet:
        return self.norm({("R", b)}, {("R", c) for c in self.by_term[a]})


def cnf_to_cubic_dgnf(g: Grammar, roots=None) -> Grammar:
    """Cubic double Greibach normal form, every rhs in Δ ∪ Δ N^{≤3} Δ.

    Each new nonterminal ⟨Y⟩ stands for a regular set Y ⊆ N* and derives the
    nonempty words of L(Y).  Sets are closed under left and right quotients
    starting from the leftmost-chain sets L(a, B) and rightmost-chain sets
    R(C, b).  Every root X keeps its name and L(X); roots never occur on a
    right side.
    """
    roots = [g.axiom] if roots is None else list(roots)
    g = reduce(g, roots)
    if g.is_empty_language:
        return Grammar.make([], g.axiom, terminals=g.terminals, tag="dgnf-cubic")
    if not is_cnf(g):
        raise ShapeError("cnf_to_cubic_dgnf needs a CNF grammar")
    from .grammar import productive_set

    prod = productive_set(g)
    roots = [x for x in roots if x in prod]
    sg = _SetGraph(g, roots)
    names = {}
    for x in roots:
        names[sg.norm({("S0", x)}, {("S1", x)})] = x
    todo = deque(names)
    seen = set(names)
    rules = []

    def ref(y: RegSet):
        if y not in seen:
            seen.add(y)
            todo.append(y)
        return names.get(y, y)

    def options(y: RegSet):
        opts = []
        if sg.has_eps(y):
            opts.append(())
        if sg.has_word(y):
            opts.append((y,))
        return opts

    while todo:
        y = todo.popleft()
        lhs = names.get(y, y)
        out = []
        for b in sg.first(y):
            if sg.contains_letter(y, b):
                for a in sorted(sg.term[b], key=sort_key):
                    out.append((a,))
                for a in sorted(sg.lc[b], key=sort_key):
                    lab = sg.left_set(a, b)
                    for c in sg.last(lab):
                        z1 = sg.rq(lab, c)
                        for bb in sorted(sg.rc[c], key=sort_key):
                            z3 = sg.right_set(c, bb)
                            for p1, p3 in product(options(z1), options(z3)):
                                out.append((a,) + p1 + p3 + (bb,))
            y1 = sg.lq(y, b)
            for c in sg.last(y1):
                mid = sg.rq(y1, c)
                if sg.is_empty(mid):
                    continue
                for a in sorted(sg.lc[b], key=sort_key):
                    z1 = sg.left_set(a, b)
                    for bb in sorted(sg.rc[c], key=sort_key):
                        z3 = sg.right_set(c, bb)
                        for p1, pm, p3 in product(options(z1), options(mid), options(z3)):
                            out.append((a,) + p1 + pm + p3 + (bb,))
        for rhs in out:
            rules.append((lhs, tuple(ref(x) if isinstance(x, RegSet) else x for x in rhs)))
    deduped = list(dict.fromkeys(rules))
    nts = {names.get(y, y) for y in seen}
    out = Grammar.make(deduped, g.axiom if g.axiom in roots else roots[0], nonterminals=nts,
                       terminals=g.terminals)
    out = reduce(out, roots)
    return Grammar.make(out.rules, out.axiom, nonterminals=out.nonterminals,
                        terminals=g.terminals, tag="dgnf-cubic")


# ---------------------------------------------------------------- Q-DGNF

def to_q_dgnf(g: Grammar, r: int) -> QuotientedGrammar:
    """Quotiented DGNF of order r: Q-CNF, condensed to r-tuples, made ε-free,
    converted to cubic DGNF over the tuple alphabet and expanded back."""
    qc = to_q_cnf(g, r)
    if qc.grammar.is_empty_language:
        return QuotientedGrammar(Grammar.make([], qc.grammar.axiom, terminals=g.terminals,
                                              tag=f"q-dgnf({r})"), r, ())
    body = []
    for rule in qc.body_rules:
        if len(rule.rhs) == r and all(x not in qc.grammar.nonterminals for x in rule.rhs):
            body.append((rule.lhs, (TupleSymbol(rule.rhs),)))
        else:
            body.append((rule.lhs, rule.rhs))
    roots = list(dict.fromkeys(x for x, _ in qc.axiom_rules))
    nts = qc.grammar.nonterminals - {qc.grammar.axiom}
    tg = Grammar.make(body, roots[0], nonterminals=nts)
    nullable = nullable_set(tg)
    cnf = to_cnf(tg, roots=roots)
    from .grammar import productive_set

    live = [x for x in roots if x in productive_set(cnf)]
    dg = cnf_to_cubic_dgnf(cnf, roots=live) if live else None
    rules = []
    dg_nts = set()
    if dg is not None and not dg.is_empty_language:
        dg_nts = set(dg.nonterminals)
        rules += [(rule.lhs, expand_word(rule.rhs)) for rule in dg.rules]
    for x in roots:
        if x in nullable:
            rules.append((x, ()))
            dg_nts.add(x)
    start = qc.grammar.axiom
    axiom_rules = [(x, w) for x, w in qc.axiom_rules if x in dg_nts]
    all_rules = [(start, (x,) + w) for x, w in axiom_rules] + rules
    out = Grammar.make(all_rules, start, nonterminals=dg_nts | {start}, terminals=g.terminals)
    out = reduce(out)
    out = Grammar.make(out.rules, start, nonterminals=out.nonterminals, terminals=g.terminals,
                       tag=f"q-dgnf({r})")
    stats = {
        "qcnfNonterminals": len(qc.grammar.nonterminals),
        "qcnfRules": len(qc.grammar.rules),
        "dgnfNonterminals": len(dg.nonterminals) if dg is not None else 0,
        "dgnfRules": len(dg.rules) if dg is not None else 0,
        "nonterminals": len(out.nonterminals),
        "rules": len(out.rules),
    }
    return QuotientedGrammar(out, r, tuple(axiom_rules), stats)


def tuple_body(qg: QuotientedGrammar):
    """Split a Q-DGNF grammar into its condensed, ε-free body grammar over
    r-tuples, the axiom rules and the set of roots deriving ε."""
    g, r = qg.grammar, qg.order
    body = [rule for rule in qg.body_rules if rule.rhs]
    nullable = frozenset(rule.lhs for rule in qg.body_rules if not rule.rhs)
    if not body:
        return None, qg.axiom_rules, nullable
    roots = list(dict.fromkeys(x for x, _ in qg.axiom_rules if any(b.lhs == x for b in body)))
    axiom = roots[0] if roots else body[0].lhs
    nts = {rule.lhs for rule in body} | {x for rule in body for x in rule.rhs if x in g.nonterminals}
    tg = Grammar.make(body, axiom, nonterminals=nts)
    tg = tuple_map(tg, r, "condense")
    return Grammar.make(tg.rules, axiom, nonterminals=tg.nonterminals, tag="dgnf"), qg.axiom_rules, nullable


# ---------------------------------------------------------------- distinct rhs

@dataclass(frozen=True)
class Indexed:
    base: object
    k: int

    _SUP = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")

    def sort_key(self):
        return (sort_key(self.base), self.k)

    def __str__(self):
        return f"{fmt_symbol(self.base)}⁽{str(self.k).translate(self._SUP)}⁾"


def distinct_rhs(g: Grammar, cap: int = 3) -> Grammar:
    """Make nonterminal occurrences within each right side pairwise distinct,
    replacing the k-th repeat of C by a copy C⁽ᵏ⁾ with C's rules."""
    copies = {}
    rules = []
    for rule in g.rules:
        count = defaultdict(int)
        rhs = []
        for x in rule.rhs:
            if x in g.nonterminals:
                count[x] += 1
                if count[x] > 1:
                    if count[x] > cap:
                        raise ShapeError(f"more than {cap} occurrences of {x} in {rule}")
                    y = Indexed(x, count[x])
                    copies[y] = x
                    rhs.append(y)
                    continue
            rhs.append(x)
        rules.append((rule.lhs, tuple(rhs)))
    if not copies:
        return g
    base_rules = list(rules)
    for y in sorted(copies, key=sort_key):
        rules += [(y, rhs) for lhs, rhs in base_rules if lhs == copies[y]]
    return Grammar.make(rules, g.axiom, nonterminals=set(g.nonterminals) | set(copies),
                        terminals=g.terminals, tag=g.tag)
