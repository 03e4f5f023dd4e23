"""Command-line front end.

Exit status: 0 when the command answered (whatever the answer), 2 on input
errors, 3 when an oracle cross-check or the fuzzer finds a disagreement.
"""

from __future__ import annotations

import argparse
import json
import sys

from .admg import _choose_links, _colliders, ancestors, mutilate
from .cdag_io import FORMAT_VERSION, export, parse_document, witness_to_json_data
from .cluster import DsepQuery, size1_violation
from .construction import minimal_compatible_graph, unfolded_graph
from .criterion import cluster_d_connected, docalc_check, oracle_cluster_d_connected
from .errors import EnumerationLimitError, InputError
from .fuzz import PROFILES, SizeLimits, fuzz_equivalence

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DISAGREE = 3


class _Fail(Exception):
    def __init__(self, lines, status=EXIT_INPUT):
        super().__init__(lines)
        self.lines = lines
        self.status = status


def _names(text):
    if text is None or text.strip() in ("", "-"):
        return frozenset()
    return frozenset(part.strip() for part in text.split(",") if part.strip())


def _load(path, need_admissible=True):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise _Fail([f"{path}: {exc.strerror}"]) from None
    doc = parse_document(text)
    if doc.diagnostics:
        raise _Fail([f"{path}:{line}: {msg}" for line, msg in doc.diagnostics])
    if need_admissible:
        problem = size1_violation(doc.parsed)
        if problem:
            raise _Fail([f"inadmissible: {problem}"])
    return doc.parsed


def _edges(g):
    parts = [f"{a} -> {b}" for a, b in sorted(g.directed)]
    parts += [f"{a} <-> {b}" for a, b in sorted(g.bidirected)]
    return ", ".join(parts) or "(none)"


def _path_text(g, path, z):
    links = _choose_links(g, list(path), z, ancestors(g, z))
    out = [str(path[0])]
    for (kind, a, _), nxt in zip(links, path[1:]):
        arrow = "<->" if kind == "<->" else ("->" if a != nxt else "<-")
        out.append(f"{arrow} {nxt}")
    return " ".join(out), [str(v) for v in _colliders(list(path), links)]


def cmd_check(args, out):
    c = _load(args.file)
    out.write(f"admissible: {len(c.sizes)} clusters, {c.edge_count()} cluster edges\n")
    return EXIT_OK


def cmd_build(args, out):
    c = _load(args.file)
    obj = minimal_compatible_graph(c) if args.emit == "gmin" else unfolded_graph(c)
    out.write(export(obj, args.format))
    return EXIT_OK


def _query(args, c):
    q = DsepQuery(_names(args.x), _names(args.y), _names(args.z),
                  _names(args.do), _names(args.underline))
    return q.validate(c)


def cmd_dsep(args, out):
    c = _load(args.file)
    q = _query(args, c)
    w = cluster_d_connected(c, q)
    answer = "connected" if w is not None else "separated"
    report = {"answer": answer}
    status = EXIT_OK
    if args.oracle:
        truth = oracle_cluster_d_connected(c, q)
        report["oracle"] = "connected" if truth else "separated"
        report["oracle_agrees"] = truth == (w is not None)
        if not report["oracle_agrees"]:
            status = EXIT_DISAGREE
    if args.json:
        report["format_version"] = FORMAT_VERSION
        if args.witness and w is not None:
            report["witness"] = witness_to_json_data(w)
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
        return status
    out.write(answer + "\n")
    if args.witness and w is not None:
        x, y, z, over, under = q.micro(c)
        path, colliders = _path_text(mutilate(w.compatible_graph, over, under), w.active_path, z)
        out.write(f"sigma: {_edges(w.sigma.subgraph)}\n")
        out.write(f"roots: {', '.join(map(str, sorted(w.sigma.roots)))}\n")
        out.write(f"compatible graph: {_edges(w.compatible_graph)}\n")
        out.write(f"active path: {path}\n")
        out.write(f"colliders: {', '.join(colliders) or '(none)'}\n")
    if args.oracle:
        verdict = "agrees" if report["oracle_agrees"] else "DISAGREES"
        out.write(f"oracle: {report['oracle']} ({verdict})\n")
    return status


def cmd_docalc(args, out):
    c = _load(args.file)
    applies = docalc_check(c, args.rule, _names(args.x), _names(args.y),
                           _names(args.z), _names(args.w))
    out.write(f"rule {args.rule} {'applies' if applies else 'does not apply'}\n")
    return EXIT_OK


def cmd_fuzz(args, out):
    if args.cases < 0 or args.jobs < 1:
        raise _Fail(["--cases must be nonnegative and --jobs positive"])
    limits = SizeLimits(args.max_clusters, args.max_size, args.max_edges)
    if limits.max_clusters < 2 or limits.max_size < 1 or limits.max_edges < 0:
        raise _Fail(["fuzz limits need at least 2 clusters and size 1"])
    report = fuzz_equivalence(args.cases, args.seed, limits, jobs=args.jobs, profile=args.profile)
    out.write(report.text())
    return EXIT_OK if report.ok else EXIT_DISAGREE


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cdagsep", description="d-separation queries over cluster-DAGs with cycles"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse a cluster-DAG file and test admissibility")
    p.add_argument("file")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("build", help="emit the minimal compatible or unfolded graph")
    p.add_argument("file")
    p.add_argument("--emit", choices=("gmin", "gu"), required=True)
    p.add_argument("--format", choices=("dot", "json"), default="json")
    p.set_defaults(run=cmd_build)

    p = sub.add_parser("dsep", help="decide cluster-level d-separation")
    p.add_argument("file")
    p.add_argument("--x", required=True, help="comma-separated clusters")
    p.add_argument("--y", required=True)
    p.add_argument("--z", default="")
    p.add_argument("--do", default="", help="clusters whose incoming arrows are cut")
    p.add_argument("--underline", default="", help="clusters whose outgoing arrows are cut")
    p.add_argument("--witness", action="store_true")
    p.add_argument("--oracle", action="store_true", help="cross-check with the oracle")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_dsep)

    p = sub.add_parser("docalc", help="test whether do-calculus rule 1 or 2 applies")
    p.add_argument("file")
    p.add_argument("--rule", type=int, choices=(1, 2), required=True)
    p.add_argument("--x", default="")
    p.add_argument("--y", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--w", default="")
    p.set_defaults(run=cmd_docalc)

    p = sub.add_parser("fuzz", help="compare the criterion with the oracle on random cases")
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--seed", default="0")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--profile", choices=PROFILES, default="uniform")
    p.add_argument("--max-clusters", type=int, default=4)
    p.add_argument("--max-size", type=int, default=3)
    p.add_argument("--max-edges", type=int, default=6)
    p.set_defaults(run=cmd_fuzz)
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.run(args, out)
    except _Fail as exc:
        for line in exc.lines:
            err.write(line + "\n")
        return exc.status
    except EnumerationLimitError as exc:
        err.write(f"oracle: {exc}\n")
        return EXIT_INPUT
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
