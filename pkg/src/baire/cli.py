"""Command line: ``baire build``, ``baire verify`` and ``baire schreier``.

Exit codes: 0 success, 2 validation error, 3 certificate failure, 4 budget diagnostic.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .certs import parse_log, write_run
from .composer import compose
from .engine import RunAborted
from .errors import BaireError, BudgetExceeded, ValidationError
from .graph import parse
from .verify import verify_run

EXIT_OK, EXIT_VALIDATION, EXIT_CERT, EXIT_BUDGET = 0, 2, 3, 4


def build(input_path: Path, out: Path, budget: int | None = None) -> tuple:
    text = Path(input_path).read_text()
    graph = parse(text)
    if budget is None:
        budget = int(graph.header.get("budget", 0))
    comp = compose(graph)
    certificates = comp.top.run_schedule(budget)
    manifest = write_run(out, text, comp, certificates, budget)
    return manifest, certificates, comp


def restore(run_dir: Path):
    run_dir = Path(run_dir)
    graph = parse((run_dir / "input.txt").read_text())
    comp = compose(graph)
    logs = parse_log((run_dir / "wlog.txt").read_text())
    for name, engine in comp.engines.items():
        X = engine.X
        engine.restore([(X.decode_point(x), X.decode_point(z)) for x, z in logs.get(name, [])])
    return comp


def schreier(run_dir: Path, k: int, gens: list[str]) -> str:
    comp = restore(run_dir)
    engine = comp.top
    G = engine.group
    table = dict(G.generators())
    table["1"] = G.identity
    for name in gens:
        if name not in table:
            raise ValidationError(f"unknown generator {name!r}; known: {', '.join(table)}")
    points = [engine.canonical_point(i) for i in range(k)]
    ids = {p: i for i, p in enumerate(points)}
    lines = ["digraph schreier {"]
    lines += [f'  p{i} [label="{i}"];' for i in range(k)]
    extra = {}
    for i, p in enumerate(points):
        for name in gens:
            q = engine.evaluate(table[name], p)
            if q not in ids:
                extra.setdefault(q, f"q{len(extra)}")
                target = extra[q]
            else:
                target = f"p{ids[q]}"
            lines.append(f'  p{i} -> {target} [label="{name}"];')
    lines += [f'  {name} [label="", shape=point];' for name in extra.values()]
    lines.append("}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="baire", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    b = sub.add_parser("build", help="run the requirement schedule and write certificates")
    b.add_argument("input", type=Path)
    b.add_argument("--budget", type=int, default=None, help="requirement count (default: header key)")
    b.add_argument("--out", type=Path, required=True)
    v = sub.add_parser("verify", help="recheck a build directory")
    v.add_argument("run", type=Path)
    v.add_argument("--mode", choices=["folner", "transitive", "faithful", "equivariance", "all"], default="all")
    v.add_argument("--depth", type=int, default=0, help="faithfulness word length")
    s = sub.add_parser("schreier", help="DOT graph of the first points under generators")
    s.add_argument("run", type=Path)
    s.add_argument("--points", type=int, default=10)
    s.add_argument("--gens", default="1", help="comma separated generator names")
    args = ap.parse_args(argv)

    try:
        if args.cmd == "build":
            manifest, certs, _ = build(args.input, args.out, args.budget)
            print(f"{len(certs)} certificates, manifest {manifest}")
            return EXIT_OK
        if args.cmd == "verify":
            report = verify_run(args.run, args.mode, args.depth)
            sys.stdout.write(report.render())
            return EXIT_OK if report.ok else EXIT_CERT
        sys.stdout.write(schreier(args.run, args.points, [g for g in args.gens.split(",") if g]))
        return EXIT_OK
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except RunAborted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET if isinstance(exc.cause, BudgetExceeded) else EXIT_CERT
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except BaireError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CERT


if __name__ == "__main__":
    sys.exit(main())
