"""Command line interface.

Exit codes: 0 success, 1 domain error (bad pedigree string, mismatched n),
2 assertion or conformance failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import __version__
from .cycles import (
    Pedigree,
    PedigreeError,
    cycle_from_pedigree,
    enumerate_pedigrees,
    sample_uniform,
)
from .demo import DEMO_A, DEMO_B, narration_lines
from .graph import IdenticalPedigreeError, InvariantViolation, build, pedigree_adjacent
from .harness import (
    CSV_HEADER,
    ExperimentConfig,
    census,
    lemma4_campaign,
    monte_carlo,
    stats_csv_rows,
)
from .polytope import verify_theorem2

SCHEMAS = {
    "pedigree-text": "n:<n>;idx:<c3,...,c_{n-1}> or n:<n>;nu:<a-b,...> (entries for nodes 4..n)",
    "pedigree-json": {"n": "int", "insertions": ["int"]},
    "graph-json": {
        "n": "int",
        "vertices": ["int"],
        "edges": [{"u": "int", "v": "int", "tag": "T1-AB|T1-BA|T2-AB|T2-BA"}],
        "components": "int",
    },
    "trajectory-json": {
        "seed": "int", "strategy": "str", "n_max": "int",
        "S": ["int"], "T": ["int"], "dmoves": ["int"],
        "isolated_at": ["int"], "connected_at": {"<n>": "bool"},
    },
    "aggregate-csv-header": CSV_HEADER,
    "theorem2-json": {
        "n": "int", "vertices": "int", "pairs": "int", "sampled": "bool",
        "disagreements": "int", "complete": "bool",
        "min_degree": "int", "max_degree": "int",
    },
    "census-json": {
        "n": "int", "vertices": "int", "pairs": "int", "edges": "int",
        "min_degree": "int", "max_degree": "int",
        "min_degree_fraction": "float", "complete": "bool",
        "degree_hist": {"<degree>": "count"},
    },
}


def _write(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _parse_pedigree(text: str) -> Pedigree:
    text = text.strip()
    if text.startswith("{"):
        return Pedigree.from_json(text)
    return Pedigree.from_text(text)


def cmd_graph(args) -> int:
    a = _parse_pedigree(args.a)
    b = _parse_pedigree(args.b)
    g = build(a, b)
    if args.format == "dot":
        _write(g.to_dot(), args.out)
    elif args.format == "text":
        lines = [f"n={g.n} vertices={sorted(g.vertices)} components={g.component_count}"]
        lines += [f"{e.lo} -- {e.hi}  {e.tag}" for e in g.sorted_edges()]
        lines.append(f"connected: {g.is_connected}")
        _write("\n".join(lines), args.out)
    else:
        d = g.to_json_dict()
        d["connected"] = g.is_connected
        _write(json.dumps(d), args.out)
    return 0


def cmd_adjacent(args) -> int:
    a = _parse_pedigree(args.a)
    b = _parse_pedigree(args.b)
    adj = pedigree_adjacent(a, b)
    if args.format == "text":
        _write("adjacent" if adj else "not adjacent", args.out)
    else:
        _write(json.dumps({"n": a.n, "adjacent": adj}), args.out)
    return 0


def cmd_simulate(args) -> int:
    if args.config:
        with open(args.config) as fh:
            cfg = ExperimentConfig.from_text(fh.read())
    else:
        n_targets = tuple(int(x) for x in args.n.split(","))
        checkpoints = (
            tuple(int(x) for x in args.checkpoints.split(",")) if args.checkpoints else ()
        )
        cfg = ExperimentConfig(
            strategy=args.alice,
            n_targets=n_targets,
            samples=args.samples,
            master_seed=args.seed,
            checkpoints=checkpoints,
            y_cut=args.y_cut,
            lemma3_rate=args.lemma3_rate,
            lemma4_rate=args.lemma4_rate,
            workers=args.workers,
            out_csv=(args.out or "") if args.format == "csv" else "",
            out_json=(args.out or "") if args.format == "json" else "",
        )
    stats = monte_carlo(cfg)
    if args.format == "json":
        text = stats.to_json()
    elif args.format == "text":
        rows = [f"strategy={stats.strategy} games={stats.games} mean_Y={stats.mean_y():.4f}"]
        for cp in sorted(stats.connected):
            rows.append(
                f"  n={cp}: connected {stats.connected_freq(cp):.4f}"
                f" mean_T={stats.mean_t(cp):.3f}"
            )
        text = "\n".join(rows)
    else:
        text = CSV_HEADER + "\n" + "\n".join(stats_csv_rows(stats))
    if not (cfg.out_csv or cfg.out_json):
        _write(text, args.out)
    if stats.lemma4_strict_failures or stats.lemma3_failures:
        return 2
    return 0


def cmd_census(args) -> int:
    rep = census(args.n)
    if args.format == "text":
        _write(
            f"n={rep.n} vertices={rep.vertices} pairs={rep.pairs} edges={rep.edges}\n"
            f"degrees {rep.min_degree}..{rep.max_degree}"
            f" min_fraction={rep.min_degree_fraction:.4f} complete={rep.complete}",
            args.out,
        )
    else:
        _write(json.dumps(rep.to_json_dict(), sort_keys=True), args.out)
    return 0


def cmd_verify_polytope(args) -> int:
    rep = verify_theorem2(args.n, sample=args.sample, seed=args.seed)
    if args.format == "text":
        _write(
            f"n={rep.n} vertices={rep.vertices} pairs={rep.pairs_checked}"
            f" disagreements={len(rep.disagreements)} complete={rep.complete}",
            args.out,
        )
    else:
        _write(rep.to_json(), args.out)
    return 0 if not rep.disagreements else 2


def cmd_verify_transitions(args) -> int:
    rep = lemma4_campaign(args.games, args.n_max, args.seed)
    if args.format == "text":
        _write(
            f"instances={rep.instances} (c={rep.c_moves}, d={rep.d_moves})\n"
            f"strict_failures={rep.strict_failures}"
            f" printed_bound_exceedances={rep.printed_bound_exceedances}",
            args.out,
        )
    else:
        _write(json.dumps(rep.to_json_dict(), sort_keys=True), args.out)
    return 0 if rep.strict_failures == 0 else 2


def cmd_example(args) -> int:
    if args.format == "json":
        from .demo import narrate

        reports, g = narrate()
        payload = {
            "a": DEMO_A.to_text(),
            "b": DEMO_B.to_text(),
            "rounds": [
                {
                    "n": r.m,
                    "alice": list(r.alice_pair),
                    "bob": list(r.bob_pair),
                    "vertex_added": r.vertex_added,
                    "isolated": r.isolated,
                    "rules": [
                        {"tag": ru.tag, "target": ru.target, "reason": ru.reason}
                        for ru in r.rules
                    ],
                    "components": r.components,
                }
                for r in reports
            ],
            "graph": g.to_json_dict(),
            "connected": g.is_connected,
        }
        _write(json.dumps(payload), args.out)
    else:
        _write("\n".join(narration_lines()), args.out)
    return 0


def cmd_enumerate(args) -> int:
    lines = []
    for p in enumerate_pedigrees(args.n):
        entry = p.to_text(form=args.form)
        if args.cycles:
            entry += "  " + ",".join(str(x) for x in cycle_from_pedigree(p).order)
        lines.append(entry)
    _write("\n".join(lines), args.out)
    return 0


def cmd_sample(args) -> int:
    import random as _random

    rng = _random.Random(args.seed)
    lines = [sample_uniform(args.n, rng).to_text(form=args.form) for _ in range(args.count)]
    _write("\n".join(lines), args.out)
    return 0


def cmd_schema(args) -> int:
    _write(json.dumps(SCHEMAS, indent=2, sort_keys=True), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="ped",
        description="Pedigree cycles, typed pedigree graphs, polytope adjacency, "
        "and the random-growth connectivity game.",
    )
    top.add_argument("--version", action="version", version=f"ped {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, fmt=("json", "text"), default="json"):
        p.add_argument("--format", choices=fmt, default=default)
        p.add_argument("--out", default=None, help="write output to a file")

    p = sub.add_parser("graph", help="typed pedigree graph of a cycle pair")
    p.add_argument("--a", required=True, help="pedigree (text or JSON form)")
    p.add_argument("--b", required=True)
    common(p, fmt=("json", "dot", "text"))
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("adjacent", help="polytope vertex adjacency of two pedigrees")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    common(p)
    p.set_defaults(fn=cmd_adjacent)

    p = sub.add_parser("simulate", help="Monte Carlo connectivity games")
    p.add_argument("--config", default=None, help="flat key=value config file")
    p.add_argument("--alice", default="random",
                   help="scripted:<pedigree> | random | greedy-common | isolationist[:prefer-c]")
    p.add_argument("--n", default="100", help="comma-separated n targets")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoints", default="", help="comma-separated subset of n targets")
    p.add_argument("--y-cut", dest="y_cut", type=int, default=0)
    p.add_argument("--lemma3-rate", dest="lemma3_rate", type=int, default=0)
    p.add_argument("--lemma4-rate", dest="lemma4_rate", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    common(p, fmt=("csv", "json", "text"), default="csv")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("census", help="exhaustive skeleton census for 4 <= n <= 8")
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.set_defaults(fn=cmd_census)

    p = sub.add_parser("verify-polytope", help="cross-validate adjacency geometrically")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sample", type=int, default=None, help="pair sample size (n=7)")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(fn=cmd_verify_polytope)

    p = sub.add_parser("verify-transitions", help="transition-table conformance campaign")
    p.add_argument("--games", type=int, default=250)
    p.add_argument("--n-max", dest="n_max", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(fn=cmd_verify_transitions)

    p = sub.add_parser("example", help="replay the bundled 10-node pair, narrated")
    common(p, fmt=("text", "json"), default="text")
    p.set_defaults(fn=cmd_example)

    p = sub.add_parser("enumerate", help="all pedigrees on [n]")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--form", choices=("idx", "nu"), default="idx")
    p.add_argument("--cycles", action="store_true", help="append the cycle order")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("sample", help="uniformly random pedigrees")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--form", choices=("idx", "nu"), default="idx")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("schema", help="machine-readable output schemas")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_schema)

    return top


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except IdenticalPedigreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except PedigreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
