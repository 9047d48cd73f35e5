"""Command-line front end.

Exit codes: 0 success (or equality for ``verify``), 1 mismatch, 2 input or
usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .automata import ForeignSymbolError, dyck_check
from .encode import EncodingError, build_cst, build_cst_from_tuples
from .grammar import (BudgetError, GrammarError, fmt_word, format_grammar, gen_gruska, parse_grammar,
                      to_cnf)
from .medvedev import linear_cst_build
from .normal_forms import ShapeError, cnf_to_cubic_dgnf, to_q_cnf, to_q_dgnf
from .serialize import (SCHEMA_VERSION, SchemaError, cst_to_json, dumps, linear_to_json, load_decomposition,
                        stanley_to_json, tuple_fixture)
from .stanley import stanley_build
from .verify import verify_identity

INPUT_ERRORS = (GrammarError, SchemaError, ShapeError, EncodingError, BudgetError, OSError,
                json.JSONDecodeError, ValueError)


class UsageError(Exception):
    pass


def _read_grammar(path):
    return parse_grammar(Path(path).read_text())


def _read_json(path):
    return json.loads(Path(path).read_text())


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_normalize(args):
    g = _read_grammar(args.file)
    if args.form == "cnf":
        out = to_cnf(g)
    elif args.form == "dgnf":
        out = cnf_to_cubic_dgnf(to_cnf(g))
    elif args.form == "qcnf":
        out = to_q_cnf(to_cnf(g), args.order).grammar
    else:
        out = to_q_dgnf(to_cnf(g), args.order).grammar
    sys.stdout.write(format_grammar(out, strict=not args.names))
    return 0


def cmd_cst_build(args):
    if args.tuples:
        tg, m, j, codes, tail = tuple_fixture(_read_json(args.file))
        dec = build_cst_from_tuples(tg, m, j, codes, tail, slt_variant=args.slt)
    else:
        dec = build_cst(_read_grammar(args.file), mode=args.mode, slt_variant=args.slt)
    _emit(dumps(cst_to_json(dec)), args.output)
    return 0


def cmd_cst_verify(args):
    g = _read_grammar(args.file)
    loaded = load_decomposition(_read_json(args.json))
    if args.maxlen < 0:
        raise UsageError("--maxlen must be non-negative")
    rep = verify_identity(loaded.dyck, loaded.control, loaded.hom, g, args.maxlen)
    sys.stdout.write(dumps(rep.to_json()))
    return 0 if rep.equal else 1


def cmd_cst_map_word(args):
    loaded = load_decomposition(_read_json(args.json))
    raw = json.loads(args.word)
    if not isinstance(raw, list):
        raise SchemaError("the word must be a JSON list of symbols")
    word = tuple(loaded.decode(x) for x in raw)
    try:
        in_d = dyck_check(loaded.dyck, word)
    except ForeignSymbolError:
        in_d = False
    image = []
    for x in word:
        try:
            y = loaded.hom(x)
        except (KeyError, AttributeError):
            raise SchemaError(f"symbol {x} has no image")
        image.extend(y if isinstance(y, tuple) else (y,))
    member = in_d and loaded.control.accepts(word)
    print(fmt_word(tuple(image)))
    print(f"in D∩T: {'true' if member else 'false'}")
    return 0


def cmd_stanley_build(args):
    dec = stanley_build(_read_grammar(args.file), args.code)
    _emit(dumps(stanley_to_json(dec)), args.output)
    return 0


def cmd_linear_build(args):
    dec = linear_cst_build(_read_grammar(args.file))
    _emit(dumps(linear_to_json(dec)), args.output)
    return 0


def metrics(g) -> dict:
    plain = build_cst(g)
    slt = build_cst(g, slt_variant=True)
    s = plain.stats
    omega = s["n"] + s["l"]
    states = s["tNfaStates"]
    product_ = omega * states ** 2
    stage = lambda *keys: {k: s.get(k) for k in keys}
    return {
        "schemaVersion": SCHEMA_VERSION,
        "grammar": {"nonterminals": len(g.nonterminals), "rules": len(g.rules)},
        "cnf": stage("cnfNonterminals", "cnfRules"),
        "qcnf": stage("qcnfNonterminals", "qcnfRules"),
        "qdgnf": stage("qdgnfNonterminals", "qdgnfRules"),
        "tuple": stage("tupleNonterminals", "tupleRules"),
        "params": {k: s[k] for k in ("q", "m", "j", "n", "l")},
        "qBound": s.get("qBound"),
        "tNfaStates": states,
        "tNfaTransitions": s["tNfaTransitions"],
        "materializedSymbols": s["materializedSymbols"],
        "sltWidth": slt.stats["sltWidth"],
        "sltTNfaStates": slt.stats["tNfaStates"],
        "tradeoff": {
            "omega": omega,
            "states": states,
            "product": product_,
            "nonterminals": len(g.nonterminals),
            "holds": product_ >= len(g.nonterminals),
            "statesKind": "upper-bound NFA",
            "note": "states are counted on the constructed, non-minimized automaton for T",
        },
    }


def cmd_metrics(args):
    sys.stdout.write(dumps(metrics(_read_grammar(args.file))))
    return 0


def cmd_gen(args):
    if args.family != "gruska":
        raise UsageError(f"unknown family {args.family}")
    sys.stdout.write(format_grammar(gen_gruska(args.m)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dyckcst", description="Dyck-language decompositions of context-free grammars")
    sub = p.add_subparsers(dest="command", required=True)

    n = sub.add_parser("normalize", help="print a normal form")
    n.add_argument("--form", choices=["cnf", "qcnf", "qdgnf", "dgnf"], required=True)
    n.add_argument("--order", type=int, default=2)
    n.add_argument("--names", action="store_true", help="keep descriptive nonterminal names (not re-parseable)")
    n.add_argument("file")
    n.set_defaults(func=cmd_normalize)

    cst = sub.add_parser("cst", help="non-erasing decomposition").add_subparsers(dest="action", required=True)
    b = cst.add_parser("build")
    b.add_argument("--mode", choices=["minimal", "paper"], default="minimal")
    b.add_argument("--slt", action="store_true", help="emit an SLT descriptor for T")
    b.add_argument("--tuples", action="store_true", help="input is a tuple-grammar fixture with codes")
    b.add_argument("file")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_cst_build)
    v = cst.add_parser("verify")
    v.add_argument("--maxlen", type=int, required=True)
    v.add_argument("file")
    v.add_argument("json")
    v.set_defaults(func=cmd_cst_verify)
    mw = cst.add_parser("map-word")
    mw.add_argument("json")
    mw.add_argument("word")
    mw.set_defaults(func=cmd_cst_map_word)

    st = sub.add_parser("stanley", help="erasing decomposition").add_subparsers(dest="action", required=True)
    sb = st.add_parser("build")
    sb.add_argument("--code", choices=["unary", "binary"], default="unary")
    sb.add_argument("file")
    sb.add_argument("-o", "--output")
    sb.set_defaults(func=cmd_stanley_build)

    lin = sub.add_parser("linear", help="linear-grammar decomposition").add_subparsers(dest="action", required=True)
    lb = lin.add_parser("build")
    lb.add_argument("file")
    lb.add_argument("-o", "--output")
    lb.set_defaults(func=cmd_linear_build)

    m = sub.add_parser("metrics", help="size report")
    m.add_argument("file")
    m.set_defaults(func=cmd_metrics)

    gen = sub.add_parser("gen", help="grammar generators")
    gen.add_argument("family", choices=["gruska"])
    gen.add_argument("-m", type=int, required=True)
    gen.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, *INPUT_ERRORS) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
