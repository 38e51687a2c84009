"""Command-line entry point: ``nbox <subcommand> ...``.

Everything is written to stdout as JSON (``--pretty`` indents it, ``--dot``
switches model output to Graphviz).  Errors go to stderr.

Exit codes: 0 success; 2 malformed input; ``proof`` uses 1 for a rejected
proof; ``decide`` uses 3 for unprovable and 4 for a resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .countermodels import fig1_model, prop41_model, prop43_model
from .decide import (
    DEFAULT_BUDGET_MS,
    DEFAULT_MAX_GENERATORS,
    ConfigError,
    Provable,
    ResourceLimit,
    decide,
)
from .formula import (
    BOT,
    Neg,
    ParseError,
    box_iter,
    parse,
    relevance_closure,
    sort_key,
    sub,
    to_json,
    to_text,
    variables,
)
from .logic import LogicId
from .proofs import ProofError, check_proof, proof_from_json
from .semantics import (
    ExtensionalModel,
    ModelError,
    falsifying_worlds,
    is_accessible,
    is_fully_accessible,
    is_serial,
    is_set_accessible,
    is_transitive,
    model_from_json,
    model_to_json,
    satisfies,
    to_dot,
)

EXIT_OK, EXIT_REJECTED, EXIT_MALFORMED, EXIT_UNPROVABLE, EXIT_LIMIT = 0, 1, 2, 3, 4


class Malformed(Exception):
    pass


def _emit(args, obj) -> None:
    print(json.dumps(obj, indent=2 if args.pretty else None, sort_keys=False))


def _formula(text: str):
    try:
        return parse(text)
    except ParseError as exc:
        raise Malformed(json.dumps({"error": "syntax", "offset": exc.offset,
                                    "expected": list(exc.expected), "found": exc.found,
                                    "message": str(exc)}))


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise Malformed(f"cannot read {path}: {exc}")


def _load_model(path: str) -> ExtensionalModel:
    obj = _read_json(path)
    # accept a decide certificate as well as a bare model
    if isinstance(obj, dict) and "model" in obj and "worlds" not in obj:
        obj = obj["model"]
    try:
        return model_from_json(obj)
    except (ModelError, ParseError) as exc:
        raise Malformed(f"bad model in {path}: {exc}")


def _write(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def cmd_parse(args) -> int:
    f = _formula(args.formula)
    _emit(args, {"formula": to_text(f), "ast": to_json(f)})
    return EXIT_OK


def cmd_mc(args) -> int:
    model = _load_model(args.model)
    f = _formula(args.formula)
    if args.dot:
        sys.stdout.write(to_dot(model))
        return EXIT_OK
    if args.world is not None:
        try:
            holds = satisfies(model, args.world, f)
        except ModelError as exc:
            raise Malformed(str(exc))
        _emit(args, {"holds": holds})
    else:
        bad = falsifying_worlds(model, f)
        _emit(args, {"valid": not bad, "falsified_at": bad})
    return EXIT_OK


def cmd_frame(args) -> int:
    model = _load_model(args.model)
    f = _formula(args.formula) if args.formula else None
    needs_formula = args.check in ("serial", "transitive", "accessible", "set-accessible")
    if needs_formula and f is None:
        raise Malformed(f"--check {args.check} needs a formula")
    if args.check == "serial":
        result = is_serial(model, f)
    elif args.check == "transitive":
        result = is_transitive(model, f)
    elif args.check == "accessible":
        result = is_accessible(model, f, args.m, args.n)
    elif args.check == "set-accessible":
        # Gamma = Sub(formula), or its relevance closure with --closure
        gamma = relevance_closure(f, args.m, args.n) if args.closure else sub(f)
        result = is_set_accessible(model, gamma, args.m, args.n)
    else:
        result = is_fully_accessible(model, args.m, args.n)
    _emit(args, {"check": args.check, "result": result})
    return EXIT_OK


def cmd_proof(args) -> int:
    obj = _read_json(args.file)
    try:
        proof = proof_from_json(obj)
    except (ValueError, ParseError) as exc:
        raise Malformed(f"bad proof in {args.file}: {exc}")
    logic = proof.logic
    if args.m is not None or args.n is not None:
        base = logic or LogicId(0, 0)
        logic = LogicId(args.m if args.m is not None else base.m, args.n if args.n is not None else base.n,
                        base.rosbox, base.ros)
    if logic is None:
        raise Malformed("proof has no logic; pass --m and --n")
    if args.rosbox or args.ros:
        logic = LogicId(logic.m, logic.n, logic.rosbox or args.rosbox, logic.ros or args.ros)
    try:
        theorem = check_proof(proof, logic)
    except ProofError as exc:
        _emit(args, {"status": "rejected", "logic": logic.to_json(), "line": exc.line, "reason": exc.reason})
        return EXIT_REJECTED
    _emit(args, {"status": "accepted", "logic": logic.to_json(), "theorem": to_text(theorem)})
    return EXIT_OK


def cmd_decide(args) -> int:
    f = _formula(args.formula)
    logic = LogicId(args.m, args.n, rosbox=args.rosbox)
    try:
        result = decide(logic, f, max_generators=args.max_generators, budget_ms=args.budget_ms)
    except ConfigError as exc:
        raise Malformed(str(exc))
    out = result.to_json()
    if args.emit:
        _write(args.emit, out)
    _emit(args, out)
    if isinstance(result, Provable):
        return EXIT_OK
    if isinstance(result, ResourceLimit):
        return EXIT_LIMIT
    return EXIT_UNPROVABLE


def cmd_countermodel(args) -> int:
    try:
        if args.which == "prop41":
            model, marker = prop41_model(), None
        elif args.which == "prop43":
            model = prop43_model(_formula(args.psi), args.n)
            marker = None
        else:
            im = fig1_model(args.n)
            probe = _formula(args.psi) if args.psi else Neg(box_iter(args.n + 1, BOT))
            closure = sorted(relevance_closure(probe, 0, args.n), key=sort_key)
            model = im.fragment(closure, sorted(variables(probe)))
            marker = f"fig1({args.n})"
    except ValueError as exc:
        raise Malformed(str(exc))
    obj = model_to_json(model, fragment_of=marker)
    if args.emit:
        _write(args.emit, obj)
    if args.dot:
        sys.stdout.write(to_dot(model))
    else:
        _emit(args, obj)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nbox", description=__doc__.splitlines()[0])
    p.add_argument(
        "--version", action="version",
        version=f"nbox {__version__} (max-generators={DEFAULT_MAX_GENERATORS}, budget-ms={DEFAULT_BUDGET_MS})",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indent JSON output")
    sp = p.add_subparsers(dest="command", required=True)

    q = sp.add_parser("parse", parents=[common], help="parse a formula and print its core form")
    q.add_argument("formula")
    q.set_defaults(func=cmd_parse)

    q = sp.add_parser("mc", parents=[common], help="model-check a formula")
    q.add_argument("--model", required=True)
    q.add_argument("--world")
    q.add_argument("--dot", action="store_true")
    q.add_argument("formula")
    q.set_defaults(func=cmd_mc)

    q = sp.add_parser("frame", parents=[common], help="check a frame property")
    q.add_argument("--model", required=True)
    q.add_argument("--check", required=True,
                   choices=["serial", "transitive", "accessible", "set-accessible", "fully-accessible"])
    q.add_argument("--m", type=int, default=0)
    q.add_argument("--n", type=int, default=0)
    q.add_argument("--closure", action="store_true", help="use the relevance closure as Gamma")
    q.add_argument("formula", nargs="?")
    q.set_defaults(func=cmd_frame)

    q = sp.add_parser("proof", parents=[common], help="check a proof file")
    q.add_argument("file")
    q.add_argument("--m", type=int)
    q.add_argument("--n", type=int)
    q.add_argument("--rosbox", action="store_true")
    q.add_argument("--ros", action="store_true")
    q.set_defaults(func=cmd_proof)

    q = sp.add_parser("decide", parents=[common], help="decide provability in N+A_{m,n}")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--rosbox", action="store_true")
    q.add_argument("--emit")
    q.add_argument("--max-generators", type=int, default=DEFAULT_MAX_GENERATORS)
    q.add_argument("--budget-ms", type=int, default=DEFAULT_BUDGET_MS)
    q.add_argument("--sequential", action="store_true",
                   help="accepted for compatibility; the search is always sequential")
    q.add_argument("formula")
    q.set_defaults(func=cmd_decide)

    q = sp.add_parser("countermodel", parents=[common], help="emit a fixture model")
    q.add_argument("which", choices=["prop41", "prop43", "fig1"])
    q.add_argument("--psi")
    q.add_argument("--n", type=int, default=2)
    q.add_argument("--emit")
    q.add_argument("--dot", action="store_true")
    q.set_defaults(func=cmd_countermodel)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "which", None) == "prop43" and not args.psi:
        print("prop43 needs --psi", file=sys.stderr)
        return EXIT_MALFORMED
    try:
        return args.func(args)
    except Malformed as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
