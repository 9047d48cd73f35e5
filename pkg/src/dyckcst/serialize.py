"""JSON form of decompositions.  Output is deterministic: sets are emitted
sorted by their JSON text and objects with sorted keys."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

from .automata import DyckSpec, FiniteDyck, Nfa, SltDescriptor
from .encode import BracketCode, CstDecomposition, OmegaNSymbol, TupleDyck
from .grammar import Grammar, sort_key
from .medvedev import LinearDecomposition
from .normal_forms import TupleSymbol
from .okhotin import AxiomMark
from .stanley import StanleyDecomposition, StanleySymbol

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _key(x) -> str:
    return json.dumps(x, sort_keys=True, ensure_ascii=False)


def _sorted(xs) -> list:
    return sorted(xs, key=_key)


def nfa_to_json(a: Nfa, enc) -> dict:
    a = a.renumbered()
    return {
        "states": sorted(a.states),
        "initial": sorted(a.initial),
        "finals": sorted(a.finals),
        "transitions": sorted(([p, enc(x), q] for p, x, q in a.transitions),
                              key=lambda t: (t[0], _key(t[1]), t[2])),
    }


def nfa_from_json(d: dict, dec) -> Nfa:
    try:
        trans = [(p, dec(x), q) for p, x, q in d["transitions"]]
        return Nfa.make(d["states"], (), trans, d["initial"], d["finals"])
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"malformed automaton: {e}") from e


def slt_to_json(s: SltDescriptor, enc) -> dict:
    part = lambda ws: _sorted([[enc(x) for x in w] for w in ws])
    return {"k": s.k, "W": part(s.W), "I": part(s.I), "T": part(s.T), "F": part(s.F),
            "acceptsEmpty": s.accepts_empty}


def _omega(x):
    return x.to_json()


def cst_to_json(dec: CstDecomposition) -> dict:
    p = dec.params
    symbols = dec.materialized()
    out = {
        "schemaVersion": SCHEMA_VERSION,
        "kind": "cst",
        "mode": dec.mode,
        "slt": dec.slt_variant,
        "sigma": list(dec.sigma),
        "acceptsEmpty": dec.eps,
        "params": {"m": p.m, "j": p.j, "q": p.q, "n": dec.stats["n"], "l": dec.stats["l"]},
        "rho": _sorted([[x.to_json(), x.out] for x in symbols]),
        "T": {"nfa": nfa_to_json(dec.T, _omega)},
        "stats": dec.stats,
    }
    if dec.slt is not None:
        out["T"]["slt"] = slt_to_json(dec.slt, _omega)
    return out


def stanley_to_json(dec: StanleyDecomposition) -> dict:
    enc = lambda x: x.to_json()
    return {
        "schemaVersion": SCHEMA_VERSION,
        "kind": "stanley",
        "code": dec.code,
        "sigma": sorted(dec.grammar.terminals, key=sort_key),
        "acceptsEmpty": dec.eps,
        "dyck": {"pairs": _sorted([[enc(o), enc(c)] for o, c in dec.dyck.pairs]), "neutrals": []},
        "h": _sorted([[enc(x), list(img)] for x, img in dec.h.items()]),
        "R": {"nfa": nfa_to_json(dec.R, enc), "slt": {"k": dec.width}},
        "stats": {"rules": len(dec.grammar.rules), "width": dec.width, "codeLength": dec.code_length,
                  "alphabet": dec.alphabet_size, "rStates": len(dec.R.states),
                  "rTransitions": len(dec.R.transitions)},
    }


def linear_to_json(dec: LinearDecomposition) -> dict:
    enc = lambda x: x.to_json()
    fac = dec.factorization
    return {
        "schemaVersion": SCHEMA_VERSION,
        "kind": "linear",
        "sigma": sorted(dec.grammar.terminals, key=sort_key),
        "lambda": [{"index": t.index, "f": [str(t.src), str(t.symbol), str(t.dst)]} for t in fac.lam],
        "dyck": {"pairs": _sorted([[enc(o), enc(c)] for o, c in dec.dyck.pairs]),
                 "neutrals": _sorted(enc(x) for x in dec.dyck.neutrals)},
        "g": _sorted([[enc(x), a] for x, a in dec.g.items()]),
        "U": {"nfa": nfa_to_json(dec.U_nfa, enc), "slt": slt_to_json(dec.U, enc)},
        "report": dec.report,
    }


# ---------------------------------------------------------------- loading

@dataclass
class LoadedDecomposition:
    kind: str
    dyck: DyckSpec
    control: Nfa
    hom: Callable
    decode: Callable
    data: dict


def _decode_omega(x):
    try:
        return OmegaNSymbol.from_json(x)
    except ValueError as e:
        raise SchemaError(str(e)) from e


def _decode_lin(x):
    if not (isinstance(x, list) and len(x) == 2 and x[0] in ("o", "c", "-")):
        raise SchemaError(f"not a linear bracket: {x!r}")
    return tuple(x)


def _decode_stanley(x):
    if not isinstance(x, str):
        raise SchemaError(f"not a symbol string: {x!r}")
    return StanleySymbol.from_json(x)


def load_decomposition(data: dict) -> LoadedDecomposition:
    if not isinstance(data, dict) or data.get("schemaVersion") != SCHEMA_VERSION:
        raise SchemaError("unsupported or missing schemaVersion")
    kind = data.get("kind", "cst")
    try:
        if kind == "cst":
            dyck = TupleDyck(frozenset(data["sigma"]), data["params"]["j"], bool(data.get("slt")))
            T = nfa_from_json(data["T"]["nfa"], _decode_omega)
            return LoadedDecomposition(kind, dyck, T, lambda x: x.out, _decode_omega, data)
        if kind == "stanley":
            pairs = [(_decode_stanley(o), _decode_stanley(c)) for o, c in data["dyck"]["pairs"]]
            h = {_decode_stanley(x): tuple(img) for x, img in data["h"]}
            R = nfa_from_json(data["R"]["nfa"], _decode_stanley)
            return LoadedDecomposition(kind, FiniteDyck.make(pairs), R, h.__getitem__, _decode_stanley, data)
        if kind == "linear":
            pairs = [(_decode_lin(o), _decode_lin(c)) for o, c in data["dyck"]["pairs"]]
            neutrals = [_decode_lin(x) for x in data["dyck"]["neutrals"]]
            g = {_decode_lin(x): a for x, a in data["g"]}
            U = nfa_from_json(data["U"]["nfa"], _decode_lin)
            return LoadedDecomposition(kind, FiniteDyck.make(pairs, neutrals), U, g.__getitem__,
                                       _decode_lin, data)
    except (KeyError, TypeError) as e:
        raise SchemaError(f"malformed decomposition: missing {e}") from e
    raise SchemaError(f"unknown decomposition kind {kind!r}")


# ---------------------------------------------------------------- tuple fixtures

def tuple_fixture(data: dict):
    """Read a hand-made tuple grammar with its code table.

    Terminals are written "<ab>"; code rows are [prev, cur, digits] with prev
    "-" for the root mark.  Returns (grammar, m, j, codes, tail)."""
    try:
        m, j = int(data["order"]), int(data["j"])
        axiom = data["axiom"]

        def sym(x):
            if isinstance(x, str) and x.startswith("<") and x.endswith(">"):
                letters = tuple(x[1:-1])
                if len(letters) != m:
                    raise SchemaError(f"tuple {x} does not have {m} letters")
                return TupleSymbol(letters)
            return x

        rules = [(lhs, tuple(sym(x) for x in rhs)) for lhs, rhs in data["rules"]]
        nts = {lhs for lhs, _ in rules}
        g = Grammar.make(rules, axiom, nonterminals=nts, tag="dgnf")
        codes = {}
        for prev, cur, digits in data["codes"]:
            key = (AxiomMark(axiom) if prev == "-" else int(prev), int(cur))
            codes[key] = BracketCode(tuple(int(d) for d in str(digits)))
        return g, m, j, codes, tuple(data.get("tail", ""))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, SchemaError):
            raise
        raise SchemaError(f"malformed tuple fixture: {e}") from e
