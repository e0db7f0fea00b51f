"""Command line entry point ``lab``.

    lab run CONFIG.json [--seed N] [--out DIR] [--workers N] [--no-figures]
    lab verify [--quick]
    lab oracle word_eval SYSTEM WORD X
    lab oracle periodic_points SYSTEM WORD
    lab oracle set_return_time SYSTEM OMEGA ARCSET N_MAX

Exit status: 0 success, 2 configuration error, 3 failed check.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .circle import parse_arcset
from .errors import ConfigError, LabError
from .generators import SemigroupSystem, SineSquared, parse_word
from .recurrence import set_return_time
from .symbols import SymbolStream, parse_walk

EXIT_OK, EXIT_CONFIG, EXIT_FAILED = 0, 2, 3


def _show(x):
    if isinstance(x, SineSquared):
        return f"sin2({x.angle})"
    return str(x)


def oracle(op: str, args: list[str]) -> dict:
    """Evaluate one exact oracle; raises ConfigError on bad arguments."""
    try:
        if op == "word_eval":
            system_spec, word, x = args
            system = SemigroupSystem.parse(system_spec)
            value = system.word_eval(parse_word(word), Fraction(x))
            return {"op": op, "system": system.spec, "word": word, "x": x, "value": _show(value)}
        if op == "periodic_points":
            system_spec, word = args
            system = SemigroupSystem.parse(system_spec)
            pts = system.periodic_points(parse_word(word))
            return {"op": op, "system": system.spec, "word": word, "count": len(pts), "points": [_show(p) for p in pts]}
        if op == "set_return_time":
            system_spec, omega, arcset, n_max = args
            system = SemigroupSystem.parse(system_spec)
            stream = parse_walk(omega if ":" in omega else f"cyclic:{omega}")
            if not isinstance(stream, SymbolStream):
                raise ValueError("omega must be a cyclic word such as 12 or cyclic:12")
            t = set_return_time(system, stream, parse_arcset(arcset), int(n_max))
            return {"op": op, "system": system.spec, "omega": stream.mode, "A": arcset, "value": t, "censored": t is None}
    except (ValueError, ZeroDivisionError, LabError) as exc:
        raise ConfigError(f"{op}: {exc}") from None
    raise ConfigError(f"unknown oracle {op!r}; expected word_eval, periodic_points or set_return_time")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lab", description="Random compositions of circle maps: experiments and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment from a JSON config")
    run.add_argument("config")
    run.add_argument("--seed", type=int)
    run.add_argument("--out", help="output directory (default: results/<experiment>-<digest prefix>)")
    run.add_argument("--workers", type=int)
    run.add_argument("--no-figures", action="store_true", help="skip the PNG figures")

    ver = sub.add_parser("verify", help="run the acceptance suite")
    ver.add_argument("--quick", action="store_true", help="reduced sample sizes, same tolerances")

    orc = sub.add_parser("oracle", help="exact rational oracles for spot checks")
    orc.add_argument("op", choices=["word_eval", "periodic_points", "set_return_time"])
    orc.add_argument("args", nargs="*")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "verify":
            from .verify import verify_all

            results = verify_all(quick=args.quick)
            failed = [r.number for r in results if not r.passed]
            print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""))
            return EXIT_FAILED if failed else EXIT_OK
        print(json.dumps(oracle(args.op, args.args)))
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _run(args) -> int:
    from .experiments import config_digest, load_config, run, validate

    raw, text = load_config(args.config)
    out = args.out
    if out is None:
        probe = dict(raw)
        if args.seed is not None:
            probe["seed"] = args.seed
        digest = config_digest(validate(probe, text))
        out = f"results/{raw['experiment']}-{digest[:12]}"
    result = run(args.config, seed=args.seed, out=out, workers=args.workers, figures=False if args.no_figures else None)
    for v in result.verdicts:
        print(v.line())
    print(f"digest {result.summary['config_digest']} -> {out}")
    return EXIT_OK if result.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
