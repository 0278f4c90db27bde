"""Command-line front end: ``strathyper <command> ...``.

Exit status is 0 on success or agreement, 1 on usage or validation errors and
2 when the two sides of an equivalence check disagree.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import tempfile
import time
from pathlib import Path
from typing import Optional, Sequence

from .cgs import HORIZON, MEMORY_KINDS, WINDOW, CgsError, cgs_to_json, digest, dumps, validate_cgs
from .checker import StrategyClass, check_hypersl, check_slii
from .encode_h2s import MUTATIONS as H2S_MUTATIONS, size_report_h2s, translate_hypersl
from .encode_s2h import MUTATIONS as S2H_MUTATIONS, size_report_s2h, translate_slii
from .generate import (MAX_STATES, hypersl_pool, random_hypersl, random_instance, random_slii,
                       slii_pool)
from .ilar import infer_certificate, make_il_ar
from .syntax import FormulaError, parse_hypersl, parse_slii, to_text
from .verify import ensure_il_ar, verify_theorem1, verify_theorem2

EXIT_OK, EXIT_INVALID, EXIT_DISAGREE = 0, 1, 2
SLII, HYPERSL = "slii", "hypersl"
_EXTENSIONS = {".sl": SLII, ".slii": SLII, ".hsl": HYPERSL, ".hypersl": HYPERSL}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# -- I/O helpers -------------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _emit(doc, out: Optional[str]) -> None:
    text = dumps(doc)
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _load_cgs(path: str):
    return validate_cgs(_read(path))


def _logic_of(path: str, logic: Optional[str]) -> str:
    if logic:
        return logic
    ext = Path(path).suffix.lower()
    if ext not in _EXTENSIONS:
        raise UsageError(f"cannot tell the logic of {path}; pass --logic")
    return _EXTENSIONS[ext]


def _parse(text: str, logic: str, cgs=None, fam=None):
    if logic == SLII:
        return parse_slii(text, cgs.agents if cgs else None, fam.observations if fam else None)
    return parse_hypersl(text, cgs.agents if cgs else None)


def _strategy_class(args) -> StrategyClass:
    return StrategyClass(args.window, args.memory)


# -- commands ----------------------------------------------------------------------

def cmd_validate(args) -> int:
    status = EXIT_OK
    for path in args.paths:
        try:
            if path.lower().endswith(".json"):
                cgs, fam = _load_cgs(path)
                print(f"{path}: ok ({len(cgs.states)} states, {len(cgs.agents)} agents, "
                      f"digest {digest(cgs, fam)})")
            else:
                ctx = _load_cgs(args.cgs) if args.cgs else (None, None)
                phi = _parse(_read(path), _logic_of(path, args.logic), *ctx)
                print(f"{path}: ok ({to_text(phi)})")
        except (CgsError, FormulaError, UsageError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            status = EXIT_INVALID
    return status


def cmd_transform(args) -> int:
    cgs, fam = _load_cgs(args.cgs)
    cert = infer_certificate(cgs)
    if cert.is_il and cert.is_ar:
        print("already IL+AR", file=sys.stderr)
        out_cgs, out_fam = cgs, fam
    else:
        out_cgs, out_fam, cert = make_il_ar(cgs, fam, prune=not args.no_prune)
    doc = cgs_to_json(out_cgs, out_fam)
    doc["certificate"] = cert.to_json()
    _emit(doc, args.output)
    return EXIT_OK


def cmd_encode(args) -> int:
    cgs, fam = _load_cgs(args.cgs)
    logic = SLII if args.direction == "s2h" else HYPERSL
    phi = _parse(_read(args.formula), logic, cgs, fam if logic == SLII else None)
    g, f, cert = ensure_il_ar(cgs, fam)
    applied = g is not cgs
    if args.direction == "s2h":
        out = translate_slii(phi, g, f, cert, args.mutation)
        sizes = size_report_s2h(phi, g, f, cert)
        structure = cgs_to_json(g, f)
        structure["certificate"] = cert.to_json()
    else:
        comp, out = translate_hypersl(phi, g, args.prune, cert, args.mutation)
        sizes = size_report_h2s(phi, g, args.prune, cert)
        structure = cgs_to_json(comp.product, comp.family)
        structure["name_maps"] = comp.name_maps_json()
    text = to_text(out)
    if args.formula_out:
        write_atomic(args.formula_out, text + "\n")
    if args.cgs_out:
        write_atomic(args.cgs_out, dumps(structure))
    report = {"direction": args.direction, "instance_digest": digest(cgs, fam),
              "il_ar_applied": applied, "prune": bool(args.prune), "mutation": args.mutation,
              "states": len(structure["states"]), "sizes": sizes}
    if not args.formula_out:
        report["formula"] = text
    _emit(report, args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    cgs, fam = _load_cgs(args.cgs)
    phi = _parse(_read(args.formula), args.logic, cgs, fam if args.logic == SLII else None)
    cls = _strategy_class(args)
    stats: dict = {}
    t = time.perf_counter()
    if args.logic == SLII:
        verdict = check_slii(cgs, fam, phi, cls, stats)
    else:
        verdict = check_hypersl(cgs, phi, cls, stats)
    _emit({"logic": args.logic, "formula": to_text(phi), "instance_digest": digest(cgs, fam),
           "class": cls.to_json(), "lhs": verdict, "seconds": time.perf_counter() - t,
           "stats": stats}, args.output)
    return EXIT_OK


def _verify_one(direction, cgs, fam, phi, cls, prune, mutation) -> dict:
    if direction == "s2h":
        return verify_theorem1(cgs, fam, phi, cls, mutation)
    return verify_theorem2(cgs, phi, cls, prune=prune, mutation=mutation, fam=fam)


def cmd_verify(args) -> int:
    cls = _strategy_class(args)
    prune = not args.no_prune
    if args.pool:
        if args.cgs or args.formula:
            raise UsageError("--pool generates its own instances; drop --cgs/--formula")
        reports = []
        if args.direction == "s2h":
            items = [(g, f, phi) for g, f, phi in slii_pool(args.pool, args.seed)]
        else:
            items = [(g, None, phi) for g, phi in hypersl_pool(args.pool, args.seed)]
        for g, f, phi in items:
            reports.append(_verify_one(args.direction, g, f, phi, cls, prune, args.mutation))
        bad = [i for i, r in enumerate(reports) if not r["agree"]]
        _emit({"direction": args.direction, "class": cls.to_json(), "pool": args.pool,
               "seed": args.seed, "mutation": args.mutation, "agree": not bad,
               "disagreements": [dict(reports[i], index=i) for i in bad],
               "seconds": sum(sum(r["timings"].values()) for r in reports)}, args.output)
        return EXIT_DISAGREE if bad else EXIT_OK
    if not (args.cgs and args.formula):
        raise UsageError("verify needs --cgs and --formula, or --pool N")
    cgs, fam = _load_cgs(args.cgs)
    logic = SLII if args.direction == "s2h" else HYPERSL
    phi = _parse(_read(args.formula), logic, cgs, fam if logic == SLII else None)
    report = _verify_one(args.direction, cgs, fam, phi, cls, prune, args.mutation)
    cert = infer_certificate(cgs)
    report["il_ar_applied"] = not (cert.is_il and cert.is_ar)
    _emit(report, args.output)
    return EXIT_OK if report["agree"] else EXIT_DISAGREE


def cmd_gen(args) -> int:
    cgs, fam = random_instance(args.seed, states=args.states, actions=args.actions,
                               agents=args.agents, aps=args.aps,
                               observations=args.observations)
    if args.formula:
        rng = random.Random(args.seed)
        phi = (random_slii(rng, cgs, fam) if args.formula == SLII
               else random_hypersl(rng, cgs))
        text = to_text(phi) + "\n"
        if args.formula_out:
            write_atomic(args.formula_out, text)
        else:
            sys.stderr.write(text)
    _emit(cgs_to_json(cgs, fam), args.output)
    return EXIT_OK


# -- argument parsing --------------------------------------------------------------

def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _class_flags(p) -> None:
    p.add_argument("--window", "-k", type=_positive, default=1, help="strategy memory k")
    p.add_argument("--memory", choices=MEMORY_KINDS, default=WINDOW,
                   help=f"'{WINDOW}' reads the last k symbols, '{HORIZON}' the first k")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="strathyper",
                     description="Strategy logics with imperfect information and HyperSL.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="validate CGS JSON files and formula files")
    p.add_argument("paths", nargs="+")
    p.add_argument("--logic", choices=(SLII, HYPERSL),
                   help="logic of formula files (default: from the extension)")
    p.add_argument("--cgs", help="check formula files against this structure")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("transform", help="make a CGS injectively labeled and action recording")
    p.add_argument("cgs")
    p.add_argument("-o", "--output")
    p.add_argument("--no-prune", action="store_true", help="keep unreachable product states")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("encode", help="translate a formula between the two logics")
    p.add_argument("--direction", choices=("s2h", "h2s"), required=True)
    p.add_argument("--cgs", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--prune", action="store_true", help="h2s: only quantify used copies")
    p.add_argument("--mutation", choices=S2H_MUTATIONS + H2S_MUTATIONS,
                   help="deliberately break the translation (harness testing)")
    p.add_argument("--formula-out", help="write the translated formula here")
    p.add_argument("--cgs-out", help="write the structure the translation is read on")
    p.add_argument("-o", "--output", help="write the report here")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("check", help="model check a formula")
    p.add_argument("--logic", choices=(SLII, HYPERSL), required=True)
    p.add_argument("--cgs", required=True)
    p.add_argument("--formula", required=True)
    _class_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", help="check a formula against its translation")
    p.add_argument("--direction", choices=("s2h", "h2s"), required=True)
    p.add_argument("--cgs")
    p.add_argument("--formula")
    _class_flags(p)
    p.add_argument("--no-prune", action="store_true", help="h2s: unpruned translation")
    p.add_argument("--mutation", choices=S2H_MUTATIONS + H2S_MUTATIONS)
    p.add_argument("--pool", type=_positive, help="run N generated pairs instead")
    p.add_argument("--seed", type=int, default=0, help="pool seed")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a random CGS")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--states", type=_positive, default=3)
    p.add_argument("--actions", type=_positive, default=2)
    p.add_argument("--agents", type=_positive, default=2)
    p.add_argument("--aps", type=int, default=2)
    p.add_argument("--observations", type=int, default=2)
    p.add_argument("--formula", choices=(SLII, HYPERSL), help="also draw a random formula")
    p.add_argument("--formula-out", help="where to write it (default: stderr)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    try:
        if getattr(args, "mutation", None):
            allowed = S2H_MUTATIONS if args.direction == "s2h" else H2S_MUTATIONS
            if args.mutation not in allowed:
                raise UsageError(f"mutation {args.mutation!r} does not apply to {args.direction}")
        if args.command == "gen" and args.states > MAX_STATES:
            raise UsageError(f"--states is capped at {MAX_STATES}")
        return args.func(args)
    except (CgsError, FormulaError, UsageError, ValueError) as exc:
        print(f"strathyper {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
