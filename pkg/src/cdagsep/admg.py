"""Acyclic directed mixed graphs: mutilation, d-separation and structures of interest.

Vertices may be any hashable, mutually orderable values.  Cluster-based code
uses :class:`MicroVertex`, but the functions here do not depend on it.

A *link* is one concrete edge used by a path or walk: ``("->", a, b)`` for a
directed edge ``a -> b`` and ``("<->", a, b)`` (``a < b``) for a bidirected
edge.  Paths are returned as vertex tuples; when two vertices are joined by
parallel edges of different kinds, activeness is judged on the best choice.
"""

from __future__ import annotations

import heapq
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

from . import kernels
from .errors import InputError

DIRECTED = "->"
BIDIRECTED = "<->"


class MicroVertex(NamedTuple):
    cluster: str
    index: int

    def __str__(self):
        return f"{self.cluster}[{self.index}]"


_VERTEX_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\[(\d+)\]\s*$")


def parse_vertex(text):
    """Parse ``"A[2]"`` into ``MicroVertex("A", 2)``."""
    m = _VERTEX_RE.match(text)
    if not m:
        raise InputError(f"malformed micro vertex {text!r}, expected NAME[INDEX]")
    return MicroVertex(m.group(1), int(m.group(2)))


def _pair(u, v):
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class MicroGraph:
    """A mixed graph with directed and bidirected edges.

    Endpoints of the given edges are added to ``vertices`` automatically.
    Bidirected edges are stored as ordered pairs ``(u, v)`` with ``u < v``.
    """

    vertices: frozenset = frozenset()
    directed: frozenset = frozenset()
    bidirected: frozenset = frozenset()

    def __post_init__(self):
        directed = frozenset((u, v) for u, v in self.directed)
        bidirected = frozenset(_pair(u, v) for u, v in self.bidirected)
        for u, v in directed | bidirected:
            if u == v:
                raise InputError(f"edge joins {u} to itself")
        vertices = set(self.vertices)
        for u, v in directed | bidirected:
            vertices.add(u)
            vertices.add(v)
        object.__setattr__(self, "vertices", frozenset(vertices))
        object.__setattr__(self, "directed", directed)
        object.__setattr__(self, "bidirected", bidirected)

    def __repr__(self):
        d = ", ".join(f"{u}->{v}" for u, v in sorted(self.directed))
        b = ", ".join(f"{u}<->{v}" for u, v in sorted(self.bidirected))
        return f"MicroGraph(|V|={len(self.vertices)}, directed=[{d}], bidirected=[{b}])"

    @cached_property
    def order(self):
        return tuple(sorted(self.vertices))

    @cached_property
    def position(self):
        return {v: i for i, v in enumerate(self.order)}

    @cached_property
    def masks(self):
        """``(parents, bidi)`` bitmask lists indexed by :attr:`position`."""
        pos = self.position
        parents = [0] * len(pos)
        bidi = [0] * len(pos)
        for u, v in self.directed:
            parents[pos[v]] |= 1 << pos[u]
        for u, v in self.bidirected:
            bidi[pos[u]] |= 1 << pos[v]
            bidi[pos[v]] |= 1 << pos[u]
        return parents, bidi

    @cached_property
    def _neighbours(self):
        parents = {v: set() for v in self.vertices}
        children = {v: set() for v in self.vertices}
        spouses = {v: set() for v in self.vertices}
        for u, v in self.directed:
            parents[v].add(u)
            children[u].add(v)
        for u, v in self.bidirected:
            spouses[u].add(v)
            spouses[v].add(u)
        return parents, children, spouses

    def parents(self, v):
        return frozenset(self._neighbours[0][v])

    def children(self, v):
        return frozenset(self._neighbours[1][v])

    def spouses(self, v):
        return frozenset(self._neighbours[2][v])

    @cached_property
    def adjacency(self):
        """``v -> [(w, head_at_v, head_at_w, link), ...]`` in a fixed order."""
        adj = {v: [] for v in self.vertices}
        for u, v in self.directed:
            link = (DIRECTED, u, v)
            adj[u].append((v, False, True, link))
            adj[v].append((u, True, False, link))
        for u, v in self.bidirected:
            link = (BIDIRECTED, u, v)
            adj[u].append((v, True, True, link))
            adj[v].append((u, True, True, link))
        for lst in adj.values():
            lst.sort(key=lambda item: (item[0], item[3]))
        return adj

    def links_between(self, u, w):
        return [item for item in self.adjacency[u] if item[0] == w]

    def mask_of(self, vs):
        pos = self.position
        mask = 0
        for v in vs:
            mask |= 1 << pos[v]
        return mask

    def vertices_of(self, mask):
        order = self.order
        return frozenset(order[i] for i in range(len(order)) if (mask >> i) & 1)

    def union(self, other):
        return MicroGraph(
            self.vertices | other.vertices,
            self.directed | other.directed,
            self.bidirected | other.bidirected,
        )

    def is_subgraph_of(self, other):
        return (
            self.vertices <= other.vertices
            and self.directed <= other.directed
            and self.bidirected <= other.bidirected
        )

    def edge_count(self):
        return len(self.directed) + len(self.bidirected)


def _vertex_set(g, vs, name):
    vs = frozenset(vs)
    unknown = vs - g.vertices
    if unknown:
        raise InputError(f"{name} contains unknown vertices: {sorted(map(str, unknown))}")
    return vs


def _disjoint_sets(g, x, y, z):
    x = _vertex_set(g, x, "x")
    y = _vertex_set(g, y, "y")
    z = _vertex_set(g, z, "z")
    if x & y or x & z or y & z:
        raise InputError("x, y and z must be pairwise disjoint")
    return x, y, z


def is_acyclic(g):
    return kernels.is_acyclic(g.masks[0])


def roots(g):
    """Vertices without a directed child."""
    children = g._neighbours[1]
    return frozenset(v for v in g.vertices if not children[v])


def ancestors(g, vs):
    """``vs`` together with every vertex having a directed path into ``vs``."""
    vs = _vertex_set(g, vs, "vertex set")
    return g.vertices_of(kernels.ancestors(g.masks[0], g.mask_of(vs)))


def descendants(g, vs):
    vs = _vertex_set(g, vs, "vertex set")
    children = g._neighbours[1]
    seen = set(vs)
    stack = list(vs)
    while stack:
        for w in children[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)


def mutilate(g, overline=(), underline=()):
    """Drop edges with an arrowhead into ``overline`` and edges with a tail on ``underline``."""
    over = _vertex_set(g, overline, "overline")
    under = _vertex_set(g, underline, "underline")
    if not over and not under:
        return g
    directed = {(u, v) for u, v in g.directed if v not in over and u not in under}
    bidirected = {(u, v) for u, v in g.bidirected if u not in over and v not in over}
    return MicroGraph(g.vertices, directed, bidirected)


def d_separated_admg(g, x, y, z=()):
    x, y, z = _disjoint_sets(g, x, y, z)
    if not x or not y:
        raise InputError("x and y must be nonempty")
    parents, bidi = g.masks
    if not kernels.is_acyclic(parents):
        raise InputError("d-separation needs an acyclic graph")
    reach = kernels.dconnected(parents, bidi, g.mask_of(x), g.mask_of(z))
    return not reach & g.mask_of(y)


def _vertex_active(v, head_in, head_out, z, anc):
    if head_in and head_out:
        return v in anc
    return v not in z


def _search_walk(g, x, y, z, anc, cost=None):
    """Cheapest active walk from ``x`` to ``y``, as ``(vertices, links)``.

    ``cost(link)`` weights each traversal (default 1).  The walk may repeat
    vertices.  States are ``(vertex, arrived_with_arrowhead)``.
    """
    adj = g.adjacency
    heap = []
    best = {}
    back = {}
    tick = 0
    for v in sorted(x):
        state = (v, None)
        best[state] = 0
        back[state] = None
        heap.append((0, tick, state))
        tick += 1
    heapq.heapify(heap)
    while heap:
        dist, _, state = heapq.heappop(heap)
        if dist > best[state]:
            continue
        v, head_in = state
        if head_in is not None and v in y:
            vertices, links = [], []
            while state is not None:
                vertices.append(state[0])
                prev = back[state]
                if prev is not None:
                    links.append(prev[1])
                    state = prev[0]
                else:
                    state = None
            vertices.reverse()
            links.reverse()
            return vertices, links
        for w, head_v, head_w, link in adj[v]:
            if head_in is not None and not _vertex_active(v, head_in, head_v, z, anc):
                continue
            nxt = (w, head_w)
            nd = dist + (1 if cost is None else cost(link))
            if nxt not in best or nd < best[nxt]:
                best[nxt] = nd
                back[nxt] = (state, link)
                heapq.heappush(heap, (nd, tick, nxt))
                tick += 1
    return None


def _shortcut(vertices, links):
    """Turn a walk into a path by jumping past the last visit of each vertex."""
    last = {v: i for i, v in enumerate(vertices)}
    path = [vertices[0]]
    path_links = []
    i = last[vertices[0]]
    while i < len(vertices) - 1:
        path_links.append(links[i])
        path.append(vertices[i + 1])
        i = last[vertices[i + 1]]
    return path, path_links


def _link_heads(link, u, w):
    kind, a, _ = link
    if kind == BIDIRECTED:
        return True, True
    return (False, True) if a == u else (True, False)


def _choose_links(g, seq, z, anc):
    """Pick one edge per step so that every interior vertex is active, or None."""
    if len(seq) < 2:
        return []
    options = []
    for u, w in zip(seq, seq[1:]):
        opts = g.links_between(u, w) if u in g.vertices else []
        if not opts:
            raise InputError(f"{u} and {w} are not adjacent")
        options.append(opts)
    feasible = [{j: None for j in range(len(options[0]))}]
    for i in range(1, len(options)):
        v = seq[i]
        layer = {}
        for j, (_, head_v_out, _, _) in enumerate(options[i]):
            for jp in feasible[-1]:
                head_v_in = options[i - 1][jp][2]
                if _vertex_active(v, head_v_in, head_v_out, z, anc):
                    layer[j] = jp
                    break
        if not layer:
            return None
        feasible.append(layer)
    j = min(feasible[-1])
    chosen = []
    for i in range(len(options) - 1, -1, -1):
        chosen.append(options[i][j][3])
        j = feasible[i][j]
    chosen.reverse()
    return chosen


def _colliders(seq, links):
    result = []
    for i in range(1, len(seq) - 1):
        v = seq[i]
        if _link_heads(links[i - 1], seq[i - 1], v)[1] and _link_heads(links[i], v, seq[i + 1])[0]:
            result.append(v)
    return result


def is_active_path(g, seq, z):
    """True when ``seq`` is a walk of ``g`` that some edge choice makes ``z``-active."""
    z = _vertex_set(g, z, "z")
    anc = ancestors(g, z)
    try:
        return _choose_links(g, list(seq), z, anc) is not None
    except InputError:
        return False


def walk_to_active_path(g, walk, z=()):
    """Shortcut an active walk into an active path with the same endpoints."""
    walk = list(walk)
    if not walk:
        raise InputError("empty walk")
    _vertex_set(g, walk, "walk")
    z = _vertex_set(g, z, "z")
    anc = ancestors(g, z)
    links = _choose_links(g, walk, z, anc)
    if links is None:
        raise InputError("walk is not active")
    path, _ = _shortcut(walk, links)
    return tuple(path)


def _connecting_path(g, x, y, z, cost=None):
    anc = g.vertices_of(kernels.ancestors(g.masks[0], g.mask_of(z)))
    found = _search_walk(g, x, y, z, anc, cost)
    if found is None:
        return None
    return _shortcut(*found)


def d_connecting_path(g, x, y, z=()):
    """An active path from ``x`` to ``y`` given ``z``, or None when separated."""
    x, y, z = _disjoint_sets(g, x, y, z)
    if not is_acyclic(g):
        raise InputError("d-connection witnesses need an acyclic graph")
    found = _connecting_path(g, x, y, z)
    return None if found is None else tuple(found[0])


def _components(g):
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, v in g.directed | g.bidirected:
        parent[find(u)] = find(v)
    return len({find(v) for v in g.vertices})


def is_structure_of_interest(g):
    if not g.vertices or _components(g) != 1:
        return False
    parents, children, _ = g._neighbours
    for v in g.vertices:
        out = len(children[v])
        if out > 1 and not (out == 2 and not parents[v]):
            return False
    return True


@dataclass(frozen=True)
class StructureOfInterest:
    subgraph: MicroGraph
    roots: frozenset = field(init=False)

    def __post_init__(self):
        if not is_structure_of_interest(self.subgraph):
            raise InputError("not a structure of interest")
        object.__setattr__(self, "roots", roots(self.subgraph))


def _as_structure(sigma):
    if isinstance(sigma, StructureOfInterest):
        return sigma
    if isinstance(sigma, MicroGraph):
        return StructureOfInterest(sigma)
    raise InputError("expected a StructureOfInterest")


def connects_under(sigma, host, x, y, z=()):
    sigma = _as_structure(sigma)
    x, y, z = frozenset(x), frozenset(y), frozenset(z)
    if x & y or x & z or y & z:
        raise InputError("x, y and z must be pairwise disjoint")
    sub = sigma.subgraph
    return (
        sub.is_subgraph_of(host)
        and bool(sub.vertices & x)
        and bool(sub.vertices & y)
        and sigma.roots <= x | y | z
        and not (sub.vertices - sigma.roots) & z
    )


def _orient(path, links, x, y):
    if path[0] in x and path[-1] in y:
        return list(path), list(links)
    if path[0] in y and path[-1] in x:
        return list(reversed(path)), list(reversed(links))
    raise InputError("path must run from x to y")


def _check_escape(g, collider, escape, z):
    if not escape or escape[0] != collider:
        raise InputError(f"escape of collider {collider} must start at it")
    for a, b in zip(escape, escape[1:]):
        if (a, b) not in g.directed:
            raise InputError(f"escape of {collider} uses missing edge {a}->{b}")
    if escape[-1] not in z or any(v in z for v in escape[:-1]):
        raise InputError(f"escape of {collider} must meet z exactly at its end")


def _is_fork(path, links, i):
    if i == 0 or i == len(path) - 1:
        return False
    return not _link_heads(links[i - 1], path[i - 1], path[i])[1] and not _link_heads(
        links[i], path[i], path[i + 1]
    )[0]


def _structure_from_links(g, path, links, escapes, x, y, z):
    path, links = list(path), list(links)
    escapes = dict(escapes)
    while True:
        on_path = {v: i for i, v in enumerate(path)}
        kept = {}
        covered = set()
        reroute = None
        for c in _colliders(path, links):
            if c in z:
                continue
            trunc = [c]
            for w in escapes[c][1:]:
                trunc.append(w)
                if w in on_path or w in covered:
                    break
            end = trunc[-1]
            if end in on_path and _is_fork(path, links, on_path[end]):
                reroute = (on_path[c], on_path[end], trunc)
                break
            kept[c] = trunc
            covered.update(trunc[1:])
        if reroute is None:
            break
        # an escape into a fork yields a path with one collider fewer
        i, j, trunc = reroute
        esc_links = [(DIRECTED, a, b) for a, b in zip(trunc, trunc[1:])]
        if j > i:
            path = path[: i + 1] + trunc[1:-1] + path[j:]
            links = links[:i] + esc_links + links[j:]
        else:
            path = path[: j + 1] + list(reversed(trunc[1:-1])) + path[i:]
            links = links[:j] + list(reversed(esc_links)) + links[i:]
    directed = set()
    bidirected = set()
    for kind, a, b in links:
        (directed if kind == DIRECTED else bidirected).add((a, b))
    for trunc in kept.values():
        directed.update(zip(trunc, trunc[1:]))
    sigma = StructureOfInterest(MicroGraph(frozenset(path), directed, bidirected))
    if not connects_under(sigma, g, x, y, z):
        raise AssertionError("constructed structure does not connect")
    return sigma


def structure_from_path(g, path, collider_escapes, x, y, z=()):
    """Grow an active path plus collider escapes into a connecting structure of interest.

    ``collider_escapes`` maps each collider outside ``z`` to a directed path
    from it into ``z``.  Escapes are cut where they first reach the path or an
    earlier escape; an escape landing on a fork of the path replaces the
    stretch between collider and fork, removing that collider.
    """
    x, y, z = _disjoint_sets(g, x, y, z)
    path = list(path)
    _vertex_set(g, path, "path")
    if len(set(path)) != len(path):
        raise InputError("path repeats a vertex")
    escapes = {c: list(e) for c, e in collider_escapes.items() if e}
    links = _choose_links(g, path, z, z | frozenset(escapes))
    if links is None:
        raise InputError("path is not active given z and the escapes")
    path, links = _orient(path, links, x, y)
    for c in _colliders(path, links):
        if c not in z:
            _check_escape(g, c, escapes.get(c), z)
    return _structure_from_links(g, path, links, escapes, x, y, z)


def _escape_paths(g, path, links, z):
    """Shortest directed path from each collider outside ``z`` into ``z``."""
    children = g._neighbours[1]
    escapes = {}
    for c in _colliders(path, links):
        if c in z or c in escapes:
            continue
        back = {c: None}
        queue = deque([c])
        end = None
        while queue:
            v = queue.popleft()
            if v in z:
                end = v
                break
            for w in sorted(children[v]):
                if w not in back:
                    back[w] = v
                    queue.append(w)
        if end is None:
            raise InputError(f"collider {c} is not an ancestor of z")
        route = []
        while end is not None:
            route.append(end)
            end = back[end]
        escapes[c] = route[::-1]
    return escapes


def connecting_structure(g, x, y, z=()):
    """A structure of interest connecting ``x`` and ``y`` under ``z``, or None."""
    x, y, z = _disjoint_sets(g, x, y, z)
    if not is_acyclic(g):
        raise InputError("connecting structures need an acyclic graph")
    found = _connecting_path(g, x, y, z)
    if found is None:
        return None
    path, links = found
    return _structure_from_links(g, path, links, _escape_paths(g, path, links, z), x, y, z)


def path_from_structure(sigma, x, y, z=()):
    """Extract a ``z``-active path from ``x`` to ``y`` inside a connecting structure."""
    sigma = _as_structure(sigma)
    sub = sigma.subgraph
    x, y, z = frozenset(x), frozenset(y), frozenset(z)
    if not connects_under(sigma, sub, x, y, z):
        raise InputError("structure does not connect x and y under z")
    adj = sub.adjacency
    back = {v: None for v in sorted(x & sub.vertices)}
    queue = deque(back)
    end = None
    while queue:
        v = queue.popleft()
        if v in y:
            end = v
            break
        for w, _, _, link in adj[v]:
            if w not in back:
                back[w] = (v, link)
                queue.append(w)
    path, links = [end], []
    while back[path[-1]] is not None:
        prev, link = back[path[-1]]
        links.append(link)
        path.append(prev)
    path.reverse()
    links.reverse()

    anc_z = ancestors(sub, z & sub.vertices)
    children = sub._neighbours[1]
    while True:
        bad = [i for i, c in enumerate(path[1:-1], 1)
               if c in _colliders(path[i - 1:i + 2], links[i - 1:i + 1]) and c not in anc_z]
        if not bad:
            break
        i = bad[0]
        c = path[i]
        descent = [c]
        while children[descent[-1]]:
            descent.append(min(children[descent[-1]]))
        down = [(DIRECTED, a, b) for a, b in zip(descent, descent[1:])]
        root = descent[-1]
        if root in x:
            tail = set(path[i:])
            t = max(k for k, v in enumerate(descent) if v in tail)
            pos = path.index(descent[t])
            path = list(reversed(descent[t:])) + path[pos + 1:]
            links = list(reversed(down[t:])) + links[pos:]
        else:
            head = set(path[: i + 1])
            t = max(k for k, v in enumerate(descent) if v in head)
            pos = path.index(descent[t])
            path = path[: pos + 1] + descent[t + 1:]
            links = links[:pos] + down[t:]
    return tuple(path)
