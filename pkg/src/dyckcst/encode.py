"""Grammar-independent bracket encoding.

Brackets of the grammar-dependent system are spelled as m-long words of
4-tuples ⟨polarity, letter, partner letter, digit⟩ carrying an m-digit base-j
code.  The projection ρ keeps the letter, so every bracket word maps to a
terminal word of the same length.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .automata import DyckSpec, ForeignSymbolError, Nfa, SltDescriptor, nfa_concat, nfa_path, nfa_union, \
    nfa_word_image, slt_hull, slt_to_nfa
from .grammar import Grammar, derives_empty, sort_key, sorted_symbols, to_cnf
from .normal_forms import to_q_dgnf, tuple_body, distinct_rhs
from .okhotin import AxiomMark, BracketSystem, build_bracket_system

OPEN, CLOSE, NEUTRAL = "[", "]", "-"
BOLD = {OPEN: "[[", CLOSE: "]]", NEUTRAL: "--"}
POLARITIES = {OPEN: "open", CLOSE: "close", NEUTRAL: "neutral",
              "[[": "open", "]]": "close", "--": "neutral"}
SIGMA_EXPONENT = 44
NU_EXPONENT = 16


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class EncodingParams:
    m: int
    j: int
    q: int
    mode: str = "minimal"
    sigma: Optional[int] = None
    nu: Optional[int] = None

    def __post_init__(self):
        if self.m < 1 or self.j < 2:
            raise EncodingError(f"invalid code shape m={self.m}, j={self.j}")
        if self.j ** self.m < self.q:
            raise EncodingError(f"{self.j}^{self.m} < q={self.q}")


@dataclass(frozen=True)
class BracketCode:
    digits: tuple

    def __str__(self):
        return "".join(map(str, self.digits))


@dataclass(frozen=True)
class OmegaNSymbol:
    polarity: str
    out: object
    partner: object
    digit: int

    def sort_key(self):
        return (self.polarity, sort_key(self.out), sort_key(self.partner), self.digit)

    def to_json(self):
        return [self.polarity, self.out, self.partner, self.digit]

    @classmethod
    def from_json(cls, x):
        if not (isinstance(x, (list, tuple)) and len(x) == 4):
            raise ValueError(f"not a 4-tuple symbol: {x!r}")
        pol, out, partner, digit = x
        if pol not in POLARITIES or not isinstance(digit, int):
            raise ValueError(f"not a 4-tuple symbol: {x!r}")
        return cls(pol, out, partner, digit)

    def __str__(self):
        return f"{self.polarity}{self.out},{self.partner},{self.digit}"


def pick_base(q: int, m: int) -> int:
    """Smallest j ≥ 2 with j^m ≥ q."""
    if q < 1 or m < 1:
        raise ValueError("q and m must be positive")
    j = max(2, int(round(q ** (1.0 / m))) - 1)
    while j > 2 and (j - 1) ** m >= q:
        j -= 1
    while j ** m < q:
        j += 1
    return j


def paper_params(sigma_size: int, p: int, q: int) -> EncodingParams:
    """j = 2·|Σ|^44; m the least even value ≥ max(2, ⌈log₂ p^16⌉) with j^m ≥ q."""
    if sigma_size < 1 or p < 1:
        raise ValueError("sigma_size and p must be positive")
    sigma = sigma_size ** SIGMA_EXPONENT
    j = 2 * sigma
    nu = p ** NU_EXPONENT
    m = max(2, (nu - 1).bit_length())
    m += m % 2
    while j ** m < q:
        m += 2
    return EncodingParams(m, j, q, "paper", sigma, nu)


def bracket_code(iota: int, params: EncodingParams) -> BracketCode:
    """m-digit base-j numeral of ι−1, most significant digit first."""
    if not 1 <= iota <= max(params.q, 1) or iota > params.j ** params.m:
        raise EncodingError(f"bracket index {iota} outside [1, {params.q}]")
    return BracketCode(numeral(iota - 1, params.j, params.m))


def numeral(value: int, base: int, width: int) -> tuple:
    digits = []
    for _ in range(width):
        value, d = divmod(value, base)
        digits.append(d)
    if value:
        raise EncodingError(f"value does not fit in {width} base-{base} digits")
    return tuple(reversed(digits))


def combinator(*words) -> tuple:
    """Position-wise tupling of equal-length words."""
    words = [tuple(w) for w in words]
    if len({len(w) for w in words}) > 1:
        raise ValueError("combinator needs words of equal length")
    return tuple(zip(*words))


def class_codes(sys: BracketSystem, m: int):
    """Codes whose first digit names the class (parent, lhs of current rule)
    and whose remaining m−1 digits number the bracket inside its class.

    Returns (codes, j_needed)."""
    g = sys.grammar
    classes = {}
    for prev, cur in sys.pairs:
        classes.setdefault((prev, g.rules[cur - 1].lhs), []).append((prev, cur))
    keys = sorted(classes, key=lambda k: (sort_key(k[0]) if isinstance(k[0], AxiomMark) else (9, k[0]),
                                          sort_key(k[1])))
    biggest = max((len(v) for v in classes.values()), default=1)
    j = max(2, len(keys), pick_base(biggest, m - 1) if m > 1 else 2)
    if m == 1 and biggest > 1:
        raise EncodingError("class codes need m ≥ 2")
    codes = {}
    for ci, key in enumerate(keys):
        for k, pair in enumerate(classes[key]):
            codes[pair] = BracketCode((ci,) + numeral(k, j, m - 1))
    return codes, j


def default_codes(sys: BracketSystem, params: EncodingParams) -> dict:
    return {pair: bracket_code(i, params) for i, pair in enumerate(sys.pairs, 1)}


def tau(sys: BracketSystem, params: EncodingParams, slt_variant: bool = False, codes=None) -> dict:
    """Map each grammar bracket to its m-long word of 4-tuples.

    ``codes`` maps (prev, cur) pairs to BracketCode; by default the numeral of
    ι−1.  When given, only the listed pairs are encoded.
    """
    codes = default_codes(sys, params) if codes is None else codes
    m = params.m
    out = {}
    for pair, code in codes.items():
        digits = tuple(code.digits)
        if len(digits) != m or any(not 0 <= d < params.j for d in digits):
            raise EncodingError(f"code {digits} of {pair} does not fit m={m}, j={params.j}")
        o = sys.open_of(pair)
        if o is None:
            raise EncodingError(f"no bracket for pair {pair}")
        a = _letters(sys.h[o], m)
        if o.kind == "neutral":
            word = [OmegaNSymbol(NEUTRAL, x, x, d) for x, d in zip(a, digits)]
            if slt_variant:
                word[0] = OmegaNSymbol(BOLD[NEUTRAL], a[0], a[0], digits[0])
            out[o] = tuple(word)
            continue
        c = sys.close_of(pair)
        b = _letters(sys.h[c], m)
        opened = [OmegaNSymbol(OPEN, *t) for t in combinator(a, b[::-1], digits)]
        closed = [OmegaNSymbol(CLOSE, *t) for t in combinator(b, a[::-1], digits[::-1])]
        if slt_variant:
            opened[0] = OmegaNSymbol(BOLD[OPEN], opened[0].out, opened[0].partner, opened[0].digit)
            closed[-1] = OmegaNSymbol(BOLD[CLOSE], closed[-1].out, closed[-1].partner, closed[-1].digit)
        out[o], out[c] = tuple(opened), tuple(closed)
    return out


def _letters(t, m):
    letters = tuple(getattr(t, "letters", (t,)))
    if len(letters) != m:
        raise EncodingError(f"h-image {t} is not an {m}-tuple")
    return letters


def rho(w) -> tuple:
    """Projection on the letter component."""
    return tuple(x.out for x in w)


@dataclass(frozen=True)
class TupleDyck(DyckSpec):
    """Dyck alphabet of 4-tuples over Σ with digits in [0, j), given by rule."""

    sigma: frozenset
    j: int
    bold: bool = False

    def kind(self, x) -> str:
        if not isinstance(x, OmegaNSymbol):
            raise ForeignSymbolError(f"{x!r} is not a 4-tuple symbol")
        pol = x.polarity
        if pol not in POLARITIES or (not self.bold and len(pol) == 2):
            raise ForeignSymbolError(f"bad polarity in {x}")
        if x.out not in self.sigma or x.partner not in self.sigma or not 0 <= x.digit < self.j:
            raise ForeignSymbolError(f"{x} is outside the alphabet")
        kind = POLARITIES[pol]
        if kind == "neutral" and x.out != x.partner:
            raise ForeignSymbolError(f"neutral {x} must repeat its letter")
        return kind

    def match(self, x):
        pol = {OPEN: CLOSE, BOLD[OPEN]: BOLD[CLOSE]}[x.polarity]
        return OmegaNSymbol(pol, x.partner, x.out, x.digit)


def tail_word(w) -> tuple:
    """α_{w'} followed by one neutral when |w| is odd."""
    w = tuple(w)
    out = []
    even = len(w) - len(w) % 2
    for i in range(0, even, 2):
        a, b = w[i], w[i + 1]
        out += [OmegaNSymbol(OPEN, a, b, 0), OmegaNSymbol(CLOSE, b, a, 0)]
    if len(w) % 2:
        out.append(OmegaNSymbol(NEUTRAL, w[-1], w[-1], 0))
    return tuple(out)


def assemble_T(axiom_rules, nullable, sys: Optional[BracketSystem], tau_map: dict, eps: bool,
               partial: bool = False) -> Nfa:
    """Union over axiom rules S → Xw of τ(R_X) · tail(w), plus tail(w) alone
    when X derives ε, plus ε when flagged."""
    parts = []
    for x, w in axiom_rules:
        tail = tail_word(w)
        if sys is not None and x in sys.controls:
            image = nfa_word_image(sys.control_nfa(x), tau_map, partial)
            parts.append(nfa_concat(image, nfa_path(tail)) if tail else image)
        if x in nullable and tail:
            parts.append(nfa_path(tail))
    if eps:
        parts.append(Nfa.epsilon())
    if not parts:
        return Nfa.empty()
    return nfa_union(*parts).trim().renumbered()


@dataclass
class CstDecomposition:
    sigma: tuple
    mode: str
    slt_variant: bool
    params: EncodingParams
    T: Nfa
    dyck: TupleDyck
    eps: bool
    stats: dict
    slt: Optional[SltDescriptor] = None
    system: Optional[BracketSystem] = field(default=None, repr=False)
    tau_map: dict = field(default_factory=dict, repr=False)
    axiom_rules: tuple = ()
    core_T: Optional[Nfa] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.stats["n"]

    def materialized(self) -> set:
        return self.T.used_symbols()


def _layer(cnf: Grammar, m: int, roots_only=True):
    qg = to_q_dgnf(cnf, m)
    tg, axiom_rules, nullable = tuple_body(qg)
    sys = None
    if tg is not None:
        tg = distinct_rhs(tg)
        axioms = list(dict.fromkeys(x for x, _ in axiom_rules if x in tg.by_lhs))
        sys = build_bracket_system(tg, axioms=axioms)
    return qg, tg, sys, axiom_rules, nullable


def build_cst(g: Grammar, mode: str = "minimal", slt_variant: bool = False, max_order: int = 2,
              order: Optional[int] = None) -> CstDecomposition:
    """Full pipeline: reduce, CNF, Q-DGNF of even order m, tuple condensing,
    distinct right sides, bracket system, base-j codes, τ and T."""
    if mode not in ("minimal", "paper"):
        raise ValueError("mode must be 'minimal' or 'paper'")
    sigma = tuple(sorted_symbols(g.terminals))
    eps = derives_empty(g)
    cnf = to_cnf(g)
    p = 0 if cnf.is_empty_language else len(cnf.nonterminals)
    stats = {"grammarNonterminals": len(g.nonterminals), "grammarRules": len(g.rules),
             "cnfNonterminals": p, "cnfRules": len(cnf.rules)}

    if cnf.is_empty_language:
        m = 2 if mode == "minimal" else paper_params(max(len(sigma), 1), 1, 1).m
        params = (EncodingParams(m, 2, 0, mode) if mode == "minimal"
                  else paper_params(max(len(sigma), 1), 1, 1))
        T = Nfa.epsilon() if eps else Nfa.empty()
        return _finish(sigma, mode, slt_variant, params, T, eps, stats, None, {}, (), None)

    if order is not None:
        m = order
    elif mode == "minimal":
        m = 2
    else:
        m = paper_params(max(len(sigma), 1), p, 1).m
    while True:
        qg, tg, sys, axiom_rules, nullable = _layer(cnf, m)
        q = sys.q if sys is not None else 0
        if mode == "paper":
            params = paper_params(max(len(sigma), 1), p, q)
            if params.m != m and order is None:
                m = params.m
                continue
            params = EncodingParams(m, params.j, q, "paper", params.sigma, params.nu)
        else:
            if 2 ** m < q and m + 2 <= max_order and order is None:
                m += 2
                continue
            params = EncodingParams(m, pick_base(max(q, 1), m), q, "minimal")
        break

    codes = None
    if sys is not None and slt_variant:
        codes, j_needed = class_codes(sys, m)
        if params.j < j_needed:
            if mode == "paper":
                raise EncodingError(f"class codes need base {j_needed} > j")
            params = EncodingParams(m, j_needed, q, "minimal")
    tau_map = tau(sys, params, slt_variant, codes) if sys is not None else {}
    T = assemble_T(axiom_rules, nullable, sys, tau_map, eps)
    stats.update({k: v for k, v in qg.stats.items() if k.startswith(("qcnf", "dgnf"))})
    stats.update({"qdgnfNonterminals": qg.stats["nonterminals"], "qdgnfRules": qg.stats["rules"]})
    if sys is not None:
        stats.update({"tupleNonterminals": len(tg.nonterminals), "tupleRules": len(tg.rules),
                      "q": q, "qBound": sys.bound(), "neutralBrackets": len(sys.dyck.neutrals)})
    return _finish(sigma, mode, slt_variant, params, T, eps, stats, sys, tau_map, axiom_rules, codes)


def build_cst_from_tuples(tg: Grammar, m: int, j: int, codes: dict, tail=(),
                          slt_variant: bool = False) -> CstDecomposition:
    """Encode a hand-made DGNF grammar over m-tuples with a fixed code table.

    ``codes`` maps (prev, cur) pairs, prev being an AxiomMark or a rule label,
    to BracketCode.  T = τ(R_S) · tail(``tail``)."""
    sigma = tuple(sorted_symbols({a for t in tg.terminals for a in t.letters} | set(tail)))
    sys = build_bracket_system(tg, axioms=[tg.axiom])
    params = EncodingParams(m, j, len(codes), "tuples")
    tau_map = tau(sys, params, slt_variant, codes)
    T = assemble_T([(tg.axiom, tuple(tail))], set(), sys, tau_map, False, partial=True)
    stats = {"tupleNonterminals": len(tg.nonterminals), "tupleRules": len(tg.rules), "q": params.q,
             "qBound": sys.bound(), "neutralBrackets": len(sys.dyck.neutrals)}
    return _finish(sigma, "tuples", slt_variant, params, T, False, stats, sys, tau_map,
                   [(tg.axiom, tuple(tail))], codes)


def _finish(sigma, mode, slt_variant, params, T, eps, stats, sys, tau_map, axiom_rules, codes):
    dyck = TupleDyck(frozenset(sigma), params.j, slt_variant)
    slt = None
    core = T
    if slt_variant:
        slt = slt_hull(T, params.m + 1)
        T = slt_to_nfa(slt).renumbered()
    materialized = T.used_symbols()
    neutral_brackets = stats.get("neutralBrackets", 0)
    l = len(sigma) * params.j * (2 if slt_variant else 1) if neutral_brackets else len(sigma)
    stats.update({
        "m": params.m, "j": params.j, "q": params.q,
        "n": 2 * params.j * len(sigma) ** 2 * (2 if slt_variant else 1),
        "l": l,
        "materializedSymbols": len(materialized),
        "materializedNeutrals": sum(1 for x in materialized if POLARITIES[x.polarity] == "neutral"),
        "tNfaStates": len(T.states),
        "tNfaTransitions": len(T.transitions),
        "sltWidth": slt.k if slt is not None else None,
    })
    return CstDecomposition(sigma, mode, slt_variant, params, T, dyck, eps, stats, slt, sys, tau_map,
                            tuple(axiom_rules), core)
