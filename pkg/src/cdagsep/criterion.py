"""Cluster-level d-separation under mutilation, with witnesses and an oracle.

The decision procedure searches for a set ``S`` of optional ("to choose")
edges of the unfolded graph such that ``g_min ∪ S`` is acyclic and its
mutilation d-connects the query.  Each search node fixes some optional edges
as committed or forbidden; the remaining ones that are individually acyclic
with the committed graph form an optimistic supergraph.  If that supergraph
does not connect, no completion does (d-connection only grows with edges).
Otherwise the cheapest connecting walk and its collider escapes name the
optional edges they need; when those edges are jointly acyclic the search
stops, else it branches on one of them.
"""

from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass

from . import kernels
from .admg import (
    DIRECTED,
    MicroGraph,
    MicroVertex,
    StructureOfInterest,
    _colliders,
    _search_walk,
    connecting_structure,
    connects_under,
    d_separated_admg,
    is_active_path,
    mutilate,
    parse_vertex,
    path_from_structure,
)
from .cluster import DsepQuery, enumerate_compatible, is_compatible, reduce_clusters
from .construction import _require_admissible, unfolded_graph
from .errors import EnumerationLimitError, InputError
from .toporder import IncrementalTopoOrder

DEFAULT_ORACLE_BOUND = 5_000_000
_OPTIONAL_COST = 10_000


def oracle_bound():
    """Default enumeration bound, overridable through ``CDAGSEP_ORACLE_BOUND``."""
    raw = os.environ.get("CDAGSEP_ORACLE_BOUND")
    if not raw:
        return DEFAULT_ORACLE_BOUND
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"CDAGSEP_ORACLE_BOUND must be an integer, got {raw!r}") from None
    if value < 1:
        raise InputError("CDAGSEP_ORACLE_BOUND must be positive")
    return value


@dataclass(frozen=True)
class Witness:
    sigma: StructureOfInterest
    compatible_graph: MicroGraph
    active_path: tuple


def _search_commitments(g_min, candidates, probe):
    """Branch and bound over optional edges; returns the chosen edge set or None.

    ``probe(committed, available)`` returns the available edges a connecting
    witness needs in the optimistic graph, or None when even that graph fails.
    """
    start = IncrementalTopoOrder(g_min.vertices, g_min.directed)

    def visit(committed, forbidden, topo):
        available = [e for e in candidates
                     if e not in committed and e not in forbidden and not topo.would_cycle(*e)]
        needed = probe(committed, available)
        if needed is None:
            return None
        trial = topo.copy()
        for edge in sorted(needed):
            if not trial.add(*edge):
                break
        else:
            return committed | needed
        with_edge = topo.copy()
        with_edge.add(*edge)
        found = visit(committed | {edge}, forbidden, with_edge)
        if found is not None:
            return found
        return visit(committed, forbidden | {edge}, topo)

    return visit(frozenset(), frozenset(), start)


def _cheapest_descent(g, start, targets, cost):
    """Cheapest directed path from ``start`` into ``targets`` as a list of edges."""
    children = g._neighbours[1]
    best = {start: 0}
    back = {start: None}
    heap = [(0, start)]
    while heap:
        dist, v = heapq.heappop(heap)
        if dist > best[v]:
            continue
        if v in targets:
            edges = []
            while back[v] is not None:
                edges.append((back[v], v))
                v = back[v]
            return edges[::-1]
        for w in sorted(children[v]):
            nd = dist + cost((DIRECTED, v, w))
            if w not in best or nd < best[w]:
                best[w] = nd
                back[w] = v
                heapq.heappush(heap, (nd, w))
    return None


def _connection_probe(fixed, bidirected, vertices, x, y, z):
    def probe(committed, available):
        optional = set(available)
        g = MicroGraph(vertices, fixed | committed | optional, bidirected)
        parents, bidi = g.masks
        if not kernels.dconnected(parents, bidi, g.mask_of(x), g.mask_of(z)) & g.mask_of(y):
            return None

        def cost(link):
            kind, a, b = link
            return _OPTIONAL_COST if kind == DIRECTED and (a, b) in optional else 1

        anc = g.vertices_of(kernels.ancestors(parents, g.mask_of(z)))
        walk, links = _search_walk(g, x, y, z, anc, cost)
        needed = {(a, b) for kind, a, b in links if kind == DIRECTED and (a, b) in optional}
        for c in set(_colliders(walk, links)) - z:
            needed.update(e for e in _cheapest_descent(g, c, z, cost) if e in optional)
        return frozenset(needed)

    return probe


def _reduced_setting(c, q):
    _require_admissible(c)
    q.validate(c)
    r = reduce_clusters(c)
    return r, unfolded_graph(r), q.micro(r)


def cluster_d_connected(c, q):
    """A :class:`Witness` that some compatible graph d-connects the query, or None.

    Clusters larger than four are reduced first.  The witness graph is lifted
    back to the original cluster sizes by adding the dropped slots isolated.
    """
    _, u, (x, y, z, over, under) = _reduced_setting(c, q)
    fixed = mutilate(u.g_min, over, under)
    candidates = sorted(e for e in u.to_choose if e[1] not in over and e[0] not in under)
    probe = _connection_probe(fixed.directed, fixed.bidirected, fixed.vertices, x, y, z)
    chosen = _search_commitments(u.g_min, candidates, probe)
    if chosen is None:
        return None
    host = MicroGraph(u.g_min.vertices, u.g_min.directed | chosen, u.g_min.bidirected)
    sigma = connecting_structure(mutilate(host, over, under), x, y, z)
    path = path_from_structure(sigma, x, y, z)
    compatible = MicroGraph(
        c.micro_vertices(),
        u.g_min.directed | sigma.subgraph.directed,
        u.g_min.bidirected | sigma.subgraph.bidirected,
    )
    return Witness(sigma, compatible, path)


def witness_problems(c, q, w):
    """Every witness invariant that ``w`` breaks for query ``q`` on ``c`` (empty when valid)."""
    problems = []
    _, u, (x, y, z, over, under) = _reduced_setting(c, q)
    expected = MicroGraph(
        c.micro_vertices(),
        u.g_min.directed | w.sigma.subgraph.directed,
        u.g_min.bidirected | w.sigma.subgraph.bidirected,
    )
    graph = w.compatible_graph
    if graph != expected:
        problems.append("compatible graph is not g_min joined with sigma")
    if graph.vertices != c.micro_vertices() or not is_compatible(graph, c):
        problems.append("compatible graph is not compatible with the cluster-DAG")
    if not connects_under(w.sigma, mutilate(u.g_u, over, under), x, y, z):
        problems.append("sigma does not connect x and y inside the mutilated unfolded graph")
    if graph.vertices == c.micro_vertices():
        bx, by, bz, bover, bunder = q.micro(c)
        path = w.active_path
        if (len(path) < 2 or len(set(path)) != len(path)
                or path[0] not in bx or path[-1] not in by
                or not is_active_path(mutilate(graph, bover, bunder), path, bz)):
            problems.append("active path is not an active x-y path of the mutilated graph")
    return problems


def validate_witness(c, q, w):
    return not witness_problems(c, q, w)


def unfolded_d_connected(c, q):
    """Plain d-connection in the mutilated unfolded graph, ignoring acyclicity.

    This is not a decision procedure for cluster-DAGs with cycles; it exists
    as a deliberately wrong variant for testing the fuzzer.
    """
    _, u, (x, y, z, over, under) = _reduced_setting(c, q)
    g = mutilate(u.g_u, over, under)
    parents, bidi = g.masks
    return bool(kernels.dconnected(parents, bidi, g.mask_of(x), g.mask_of(z)) & g.mask_of(y))


def _word_count(sizes):
    total = math.factorial(sum(sizes))
    for size in sizes:
        total //= math.factorial(size)
    return total


def _oracle_maximal(c, q, bound):
    names = c.names
    index = {name: i for i, name in enumerate(names)}
    sizes = [c.sizes[name] for name in names]
    count = _word_count(sizes)
    if count > bound:
        raise EnumerationLimitError(count, bound)
    offsets = {}
    start = 0
    for name, size in zip(names, sizes):
        offsets[name] = start
        start += size

    def slot_mask(cluster_names):
        mask = 0
        for name in cluster_names:
            mask |= ((1 << c.sizes[name]) - 1) << offsets[name]
        return mask

    pred = [0] * len(names)
    dep = [1 << i for i in range(len(names))]
    for u, v in c.directed:
        pred[index[v]] |= 1 << index[u]
        dep[index[u]] |= 1 << index[v]
        dep[index[v]] |= 1 << index[u]
    required = list(pred)
    for name in c.selfloops:
        pred[index[name]] |= 1 << index[name]
    over = slot_mask(q.overline)
    bidi = [0] * start
    pairs = [(a, b) for a, b in c.bidirected] + [(n, n) for n in c.bidiloops]
    for a, b in pairs:
        for i in range(offsets[a], offsets[a] + c.sizes[a]):
            for j in range(offsets[b], offsets[b] + c.sizes[b]):
                if i != j and not (over >> i) & 1 and not (over >> j) & 1:
                    bidi[i] |= 1 << j
                    bidi[j] |= 1 << i
    found, _ = kernels.oracle_search(
        sizes, pred, dep, required, bidi, over, slot_mask(q.underline),
        slot_mask(q.x), slot_mask(q.y), slot_mask(q.z),
    )
    return found


def _oracle_enumerate(c, q, bound):
    x, y, z, over, under = q.micro(c)
    for m in enumerate_compatible(c, bound):
        if not d_separated_admg(mutilate(m, over, under), x, y, z):
            return True
    return False


def oracle_cluster_d_connected(c, q, bound=None, method="maximal"):
    """Ground truth: does some compatible graph, once mutilated, d-connect the query?

    ``method="enumerate"`` checks every compatible graph one by one.  The
    default ``"maximal"`` checks only the maximal compatible graphs, one per
    interleaving of cluster slots: every compatible graph is contained in one
    of them, and adding edges never destroys d-connection.
    """
    _require_admissible(c)
    q.validate(c)
    bound = oracle_bound() if bound is None else bound
    if method == "maximal":
        return _oracle_maximal(c, q, bound)
    if method == "enumerate":
        return _oracle_enumerate(c, q, bound)
    raise InputError(f"unknown oracle method {method!r}")


def _vertex(c, v):
    if isinstance(v, str):
        v = parse_vertex(v)
    v = MicroVertex(*v)
    if v.cluster not in c.sizes or not 1 <= v.index <= c.sizes[v.cluster]:
        raise InputError(f"unknown micro vertex {v}")
    return v


def exists_directed_micro_path(c, source, target):
    """Whether some compatible graph has a directed path ``source`` to ``target``.

    Slot indices are read under the convention that they follow a topological
    order within each cluster, which is how ``g_min`` labels them.
    """
    _require_admissible(c)
    source, target = _vertex(c, source), _vertex(c, target)
    if source == target:
        raise InputError("source and target must differ")
    u = unfolded_graph(c)
    candidates = sorted(u.to_choose)

    def probe(committed, available):
        optional = set(available)
        g = MicroGraph(u.g_min.vertices, u.g_min.directed | committed | optional)

        def cost(link):
            return _OPTIONAL_COST if (link[1], link[2]) in optional else 1

        route = _cheapest_descent(g, source, {target}, cost)
        if route is None:
            return None
        return frozenset(e for e in route if e in optional)

    return _search_commitments(u.g_min, candidates, probe) is not None


def docalc_check(c, rule, x, y, z, w=()):
    """Whether do-calculus rule 1 or 2 applies, as a d-separation of ``y`` and ``z``.

    Rule 1 tests ``y`` against ``z`` given ``x ∪ w`` with arrows into ``x``
    cut; rule 2 additionally cuts arrows out of ``z``.
    """
    x, y, z, w = (frozenset((s,) if isinstance(s, str) else s) for s in (x, y, z, w))
    if rule not in (1, 2):
        raise InputError(f"only rules 1 and 2 are supported, got {rule!r}")
    if not y or not z:
        raise InputError("y and z must be nonempty")
    sets = (x, y, z, w)
    for i, a in enumerate(sets):
        for b in sets[i + 1:]:
            if a & b:
                raise InputError("x, y, z and w must be pairwise disjoint")
    q = DsepQuery(y, z, x | w, overline=x, underline=z if rule == 2 else frozenset())
    return cluster_d_connected(c, q) is None
