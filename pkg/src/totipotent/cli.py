"""Command-line front end.

Exit codes: 0 success, 1 a verification clause failed, 2 bad configuration,
usage or missing/unreadable input, 3 the requested build is infeasible.
"""

from __future__ import annotations

import argparse
import json
import math
import shutil
import sys
import time
from pathlib import Path

from . import __version__
from .errors import ConfigError, Infeasible, SerializationError, TotipotentError

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2, 3


def _emit(data, out: str | None = None) -> None:
    text = json.dumps(data, indent=1, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fail(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_build(args) -> int:
    from .builder import BuildParams, build, verify_all
    from .bundle import write_bundle

    try:
        params = BuildParams.from_text(Path(args.config).read_text())
    except FileNotFoundError:
        return _fail(f"config file {args.config} not found", EXIT_CONFIG)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    started = time.perf_counter()
    try:
        res = build(params)
    except Infeasible as exc:
        return _fail(f"infeasible: {exc}", EXIT_INFEASIBLE)
    built = time.perf_counter()
    reports = verify_all(res, args.radius)
    verified = time.perf_counter()
    out = Path(args.out)
    if out.exists():
        shutil.rmtree(out)
    timing = None if args.no_timing else {"build_seconds": round(built - started, 3), "verify_seconds": round(verified - built, 3)}
    write_bundle(res, reports, out, timing)
    failed = [f"{r.title}: {name}" for r in reports for name in r.failures()]
    for line in failed:
        print(f"FAILED {line}", file=sys.stderr)
    print(f"wrote bundle to {out}")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_verify(args) -> int:
    from .builder import verify_all
    from .bundle import load_bundle

    try:
        res = load_bundle(args.bundle)
    except FileNotFoundError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    except ConfigError as exc:
        return _fail(f"config.txt: {exc}", EXIT_CONFIG)
    except SerializationError as exc:
        print(f"FAILED load: {exc}", file=sys.stderr)
        _emit([{"title": "load", "passed": False, "clauses": [{"name": "load", "passed": False, "detail": str(exc)}]}], args.out)
        return EXIT_VERIFY
    reports = verify_all(res, args.radius)
    _emit([r.to_json() for r in reports], args.out)
    failed = [f"{r.title}: {name}" for r in reports for name in r.failures()]
    for line in failed:
        print(f"FAILED {line}", file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_enumerate_balls(args) -> int:
    from .schreier import canonical_code, enumerate_partial_actions, to_dot

    try:
        stream = enumerate_partial_actions(args.r, args.min, args.max)
        counts: dict[int, int] = {}
        lines = []
        dots = []
        for g in stream:
            counts[g.size] = counts.get(g.size, 0) + 1
            if args.out:
                lines.append(json.dumps({**g.to_json(), "code": canonical_code(g).hex()}, sort_keys=True))
                if args.dot:
                    dots.append(to_dot(g, f"ball_{len(lines)}"))
    except ValueError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "balls.jsonl").write_text("".join(line + "\n" for line in lines))
        if args.dot:
            (out / "balls.dot").write_text("".join(dots))
    _emit({"r": args.r, "min": args.min, "max": args.max, "count": sum(counts.values()), "by_size": {str(k): v for k, v in sorted(counts.items())}})
    return EXIT_OK


def cmd_irs_sample(args) -> int:
    from .builder import irs_sample
    from .bundle import load_bundle
    from .exactmaps import rat
    from .subgroups import in_perfect_kernel, index, stabilizer_to_subgroup

    try:
        res = load_bundle(args.bundle)
        x = rat(args.x)
    except FileNotFoundError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    except (ValueError, TypeError, TotipotentError) as exc:
        return _fail(str(exc), EXIT_CONFIG)
    if not 0 <= x < 1:
        return _fail("x must lie in [0, 1)", EXIT_CONFIG)
    sample = irs_sample(res, x, args.radius, args.word_len)
    sub = stabilizer_to_subgroup(sample, rank=res.params.r)
    data = sample.to_json()
    idx = index(sub)
    data["stabilizer_approximation"] = {
        "automaton": sub.to_json(),
        "index": "infinite" if idx == math.inf else idx,
        "in_perfect_kernel": in_perfect_kernel(sub),
    }
    _emit(data, args.out)
    return EXIT_OK


def cmd_subgroup(args) -> int:
    from .subgroups import (
        contains_word,
        format_word,
        hall_completion,
        in_perfect_kernel,
        index,
        isolation_witness,
        parse_word,
        parse_words,
        subgroup_from_generators,
    )

    try:
        gens = parse_words(args.gens)
        sub = subgroup_from_generators(gens, rank=args.rank)
        words = [parse_word(w) for w in args.contains]
    except ConfigError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    if sub.rank < 2:
        return _fail("subgroups are taken in F_r with r >= 2; pass --rank", EXIT_CONFIG)
    idx = index(sub)
    data = {
        "generators": [format_word(w) for w in gens],
        "rank": sub.rank,
        "automaton": sub.to_json(),
        "index": "infinite" if idx == math.inf else idx,
        "in_perfect_kernel": in_perfect_kernel(sub),
    }
    if words:
        data["contains"] = {format_word(w): contains_word(sub, w) for w in words}
    if idx == math.inf:
        data["hall_completion"] = hall_completion(sub).to_json()
        if args.isolation:
            wit = isolation_witness(sub, args.isolation)
            data["isolation"] = {
                "g": format_word(wit.element),
                "steps": [
                    {"n": s.n, "index": "infinite" if s.index == math.inf else s.index, "agreement_radius": s.agreement}
                    for s in wit.steps
                ],
                "strictly_increasing": wit.strictly_increasing,
            }
    if args.dot:
        sys.stdout.write(sub.to_dot())
        return EXIT_OK
    _emit(data, args.out)
    return EXIT_OK


def cmd_distance(args) -> int:
    from .exactmaps import PiecewiseTranslation, rat_str, uniform_distance

    try:
        s = PiecewiseTranslation.loads(Path(args.first).read_text())
        t = PiecewiseTranslation.loads(Path(args.second).read_text())
        d = uniform_distance(s, t)
    except FileNotFoundError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    except (SerializationError, ValueError) as exc:
        return _fail(str(exc), EXIT_CONFIG)
    print(rat_str(d))
    return EXIT_OK


def cmd_export_dot(args) -> int:
    from .schreier import MarkedAction, PartialAction, to_dot
    from .subgroups import StallingsAutomaton

    try:
        data = json.loads(Path(args.file).read_text())
    except FileNotFoundError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    except json.JSONDecodeError as exc:
        return _fail(f"{args.file}: not JSON ({exc})", EXIT_CONFIG)
    try:
        if isinstance(data, dict) and "completed" in data:
            text = to_dot(MarkedAction.from_json(data["completed"]), args.name)
        elif isinstance(data, dict) and "rank" in data and "base" in data:
            text = StallingsAutomaton.from_json(data).to_dot(args.name)
        elif isinstance(data, dict) and "marked" in data:
            text = to_dot(MarkedAction.from_json(data), args.name)
        else:
            text = to_dot(PartialAction.from_json(data), args.name)
    except (SerializationError, ValueError, KeyError, TypeError) as exc:
        return _fail(f"{args.file}: {exc}", EXIT_CONFIG)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="totipotent", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build an action and write a bundle")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--radius", type=int, default=3, help="orbit-ball radius for the totipotency check")
    p.add_argument("--no-timing", action="store_true", help="leave timing out of the manifest so the whole bundle is reproducible")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="re-run every check on a bundle")
    p.add_argument("bundle")
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--out", help="write the JSON reports here instead of standard output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate-balls", help="enumerate partial Schreier graphs")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--min", type=int, default=1)
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--out", help="directory for balls.jsonl (and balls.dot with --dot)")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_enumerate_balls)

    p = sub.add_parser("irs-sample", help="orbit ball and stabilizing words of a point")
    p.add_argument("bundle")
    p.add_argument("--x", required=True, help="rational point p/q in [0, 1)")
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--word-len", type=int, default=6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_irs_sample)

    p = sub.add_parser("subgroup", help="query a finitely generated subgroup of F_r")
    p.add_argument("gens", help='comma-separated words, e.g. "a1^2,a2,a1 a2 a1^-1"')
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--contains", action="append", default=[], metavar="WORD")
    p.add_argument("--isolation", type=int, metavar="NMAX", help="isolation witness for n = 2..NMAX")
    p.add_argument("--dot", action="store_true", help="print the automaton as DOT")
    p.add_argument("--out")
    p.set_defaults(func=cmd_subgroup)

    p = sub.add_parser("distance", help="uniform distance between two transforms")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("export-dot", help="render a graph or automaton JSON file as DOT")
    p.add_argument("file")
    p.add_argument("--name", default="G")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
