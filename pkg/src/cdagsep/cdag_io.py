"""Line-oriented cluster-DAG format plus DOT and JSON export.

Format, one statement per line, ``#`` starts a comment::

    cluster NAME size=N [selfloop] [bidiloop]
    NAME -> NAME
    NAME <-> NAME

``A -> A`` and ``A <-> A`` are accepted as self-loops.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .admg import MicroGraph, MicroVertex, StructureOfInterest
from .cluster import ClusterDag
from .construction import UnfoldedGraph
from .criterion import Witness
from .errors import CdagParseError, InputError

FORMAT_VERSION = 1

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_SIZE = re.compile(r"^size=(.*)$")


@dataclass
class CdagDocument:
    lines: list
    parsed: ClusterDag | None
    diagnostics: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.diagnostics


def parse_document(text):
    lines = text.splitlines()
    diagnostics = []
    sizes = {}
    flags = {"selfloop": set(), "bidiloop": set()}
    edges = []
    for lineno, raw in enumerate(lines, 1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        if tokens[0] == "cluster":
            _parse_cluster(lineno, tokens, sizes, flags, diagnostics)
        elif len(tokens) == 3 and tokens[1] in ("->", "<->"):
            bad = [t for t in (tokens[0], tokens[2]) if not _NAME.match(t)]
            if bad:
                diagnostics.append((lineno, f"invalid cluster name {bad[0]!r}"))
            else:
                edges.append((lineno, tokens[1], tokens[0], tokens[2]))
        else:
            diagnostics.append((lineno, f"unknown statement {raw.strip()!r}"))

    directed, bidirected = set(), set()
    seen = {}
    for lineno, kind, u, v in edges:
        missing = [n for n in dict.fromkeys((u, v)) if n not in sizes]
        for name in missing:
            diagnostics.append((lineno, f"undeclared cluster {name}"))
        if missing:
            continue
        if u == v:
            flag = "selfloop" if kind == "->" else "bidiloop"
            key = (flag, u)
        else:
            key = (kind, u, v) if kind == "->" else (kind, *sorted((u, v)))
        if key in seen or (u == v and u in flags[key[0]]):
            diagnostics.append((lineno, f"duplicate edge {u} {kind} {v}"))
            continue
        seen[key] = lineno
        if u == v:
            flags[key[0]].add(u)
        elif kind == "->":
            directed.add((u, v))
        else:
            bidirected.add((u, v))

    diagnostics.sort()
    parsed = None
    if not diagnostics:
        parsed = ClusterDag(sizes, directed, bidirected, flags["selfloop"], flags["bidiloop"])
    return CdagDocument(lines, parsed, diagnostics)


def _parse_cluster(lineno, tokens, sizes, flags, diagnostics):
    if len(tokens) < 3:
        diagnostics.append((lineno, "expected 'cluster NAME size=N'"))
        return
    name = tokens[1]
    if not _NAME.match(name):
        diagnostics.append((lineno, f"invalid cluster name {name!r}"))
        return
    match = _SIZE.match(tokens[2])
    if not match:
        diagnostics.append((lineno, f"cluster {name}: expected size=N, got {tokens[2]!r}"))
        return
    try:
        size = int(match.group(1))
    except ValueError:
        diagnostics.append((lineno, f"cluster {name}: size must be an integer"))
        return
    if size < 1:
        diagnostics.append((lineno, f"cluster {name}: size must be positive, got {size}"))
        return
    if name in sizes:
        diagnostics.append((lineno, f"duplicate cluster {name}"))
        return
    sizes[name] = size
    for flag in tokens[3:]:
        if flag not in flags:
            diagnostics.append((lineno, f"cluster {name}: unknown option {flag!r}"))
        elif name in flags[flag]:
            diagnostics.append((lineno, f"cluster {name}: repeated option {flag}"))
        else:
            flags[flag].add(name)


def parse_cdag(text):
    doc = parse_document(text)
    if doc.diagnostics:
        raise CdagParseError(doc.diagnostics)
    return doc.parsed


def render(c):
    out = []
    for name, size in c.sizes.items():
        words = ["cluster", name, f"size={size}"]
        if name in c.selfloops:
            words.append("selfloop")
        if name in c.bidiloops:
            words.append("bidiloop")
        out.append(" ".join(words))
    out.extend(f"{u} -> {v}" for u, v in sorted(c.directed))
    out.extend(f"{u} <-> {v}" for u, v in sorted(c.bidirected))
    return "\n".join(out) + "\n"


def _vertex_json(v):
    return {"cluster": v.cluster, "index": v.index}


def _edges_json(edges):
    return [[_vertex_json(a), _vertex_json(b)] for a, b in sorted(edges)]


def micro_to_json(g):
    return {
        "vertices": [_vertex_json(v) for v in sorted(g.vertices)],
        "directed_edges": _edges_json(g.directed),
        "bidirected_edges": _edges_json(g.bidirected),
    }


def to_json_data(obj):
    if isinstance(obj, ClusterDag):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "cluster_dag",
            "vertices": [
                {"name": n, "size": s, "selfloop": n in obj.selfloops, "bidiloop": n in obj.bidiloops}
                for n, s in obj.sizes.items()
            ],
            "directed_edges": [list(e) for e in sorted(obj.directed)],
            "bidirected_edges": [list(e) for e in sorted(obj.bidirected)],
        }
    if isinstance(obj, UnfoldedGraph):
        data = {"format_version": FORMAT_VERSION, "kind": "unfolded_graph"}
        data.update(micro_to_json(obj.g_min))
        data["to_choose"] = _edges_json(obj.to_choose)
        return data
    if isinstance(obj, MicroGraph):
        data = {"format_version": FORMAT_VERSION, "kind": "micro_graph"}
        data.update(micro_to_json(obj))
        return data
    raise TypeError(f"cannot export {type(obj).__name__}")


def _read_vertex(d):
    return MicroVertex(d["cluster"], int(d["index"]))


def _read_micro(data):
    return MicroGraph(
        frozenset(_read_vertex(v) for v in data["vertices"]),
        {(_read_vertex(a), _read_vertex(b)) for a, b in data["directed_edges"]},
        {(_read_vertex(a), _read_vertex(b)) for a, b in data["bidirected_edges"]},
    )


def from_json_data(data):
    try:
        if data.get("format_version") != FORMAT_VERSION:
            raise InputError(f"unsupported format_version {data.get('format_version')!r}")
        kind = data["kind"]
        if kind == "cluster_dag":
            vertices = data["vertices"]
            return ClusterDag(
                {v["name"]: v["size"] for v in vertices},
                {tuple(e) for e in data["directed_edges"]},
                {tuple(e) for e in data["bidirected_edges"]},
                {v["name"] for v in vertices if v.get("selfloop")},
                {v["name"] for v in vertices if v.get("bidiloop")},
            )
        if kind == "micro_graph":
            return _read_micro(data)
        if kind == "unfolded_graph":
            g_min = _read_micro(data)
            to_choose = frozenset((_read_vertex(a), _read_vertex(b)) for a, b in data["to_choose"])
            g_u = MicroGraph(g_min.vertices, g_min.directed | to_choose, g_min.bidirected)
            return UnfoldedGraph(g_min, to_choose, g_u)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed JSON document: {exc}") from None
    raise InputError(f"unknown document kind {kind!r}")


def from_json(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    return from_json_data(data)


def _quote(v):
    return '"' + str(v) + '"'


def _dot_micro(g, to_choose=frozenset(), name="micro"):
    out = [f"digraph {name} {{"]
    clusters = {}
    for v in sorted(g.vertices):
        clusters.setdefault(v.cluster, []).append(v)
    for cname, vs in clusters.items():
        out.append(f"  subgraph {_quote('cluster_' + cname)} {{")
        out.append(f"    label={_quote(cname)};")
        out.extend(f"    {_quote(v)};" for v in vs)
        out.append("  }")
    for a, b in sorted(g.directed):
        out.append(f"  {_quote(a)} -> {_quote(b)};")
    for a, b in sorted(to_choose):
        out.append(f"  {_quote(a)} -> {_quote(b)} [color=red, style=bold];")
    for a, b in sorted(g.bidirected):
        out.append(f"  {_quote(a)} -> {_quote(b)} [dir=both, style=dashed];")
    out.append("}")
    return "\n".join(out) + "\n"


def _dot_cdag(c):
    out = ["digraph cdag {"]
    for name, size in c.sizes.items():
        out.append(f"  {_quote(name)} [shape=box, label={_quote(f'{name} ({size})')}];")
    for u, v in sorted(c.directed):
        out.append(f"  {_quote(u)} -> {_quote(v)};")
    for name in sorted(c.selfloops):
        out.append(f"  {_quote(name)} -> {_quote(name)};")
    for u, v in sorted(c.bidirected):
        out.append(f"  {_quote(u)} -> {_quote(v)} [dir=both, style=dashed];")
    for name in sorted(c.bidiloops):
        out.append(f"  {_quote(name)} -> {_quote(name)} [dir=both, style=dashed];")
    out.append("}")
    return "\n".join(out) + "\n"


def export(obj, format="json"):
    """Serialize a cluster-DAG, micro graph or unfolded graph as ``dot`` or ``json``.

    In DOT output optional edges of an unfolded graph are drawn red.
    """
    if format == "json":
        return json.dumps(to_json_data(obj), indent=2) + "\n"
    if format != "dot":
        raise InputError(f"unknown export format {format!r}")
    if isinstance(obj, ClusterDag):
        return _dot_cdag(obj)
    if isinstance(obj, UnfoldedGraph):
        return _dot_micro(obj.g_min, obj.to_choose, "unfolded")
    if isinstance(obj, MicroGraph):
        return _dot_micro(obj)
    raise TypeError(f"cannot export {type(obj).__name__}")


def witness_to_json_data(w):
    return {
        "sigma": micro_to_json(w.sigma.subgraph),
        "roots": [_vertex_json(v) for v in sorted(w.sigma.roots)],
        "compatible_graph": micro_to_json(w.compatible_graph),
        "active_path": [_vertex_json(v) for v in w.active_path],
    }


def witness_from_json_data(data):
    try:
        return Witness(
            StructureOfInterest(_read_micro(data["sigma"])),
            _read_micro(data["compatible_graph"]),
            tuple(_read_vertex(v) for v in data["active_path"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed witness: {exc}") from None
