"""Cluster-DAGs, compatible micro graphs and the size-four reduction."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

from . import kernels
from .admg import MicroGraph, MicroVertex, is_acyclic
from .errors import EnumerationLimitError, InputError

SIZE_CAP = 4


@dataclass(frozen=True)
class ClusterDag:
    """Clusters with sizes plus cluster-level directed/bidirected edges and self-loops.

    A pair ``(A, A)`` given as a directed or bidirected edge is stored as the
    corresponding self-loop.  Bidirected pairs are stored sorted.
    """

    sizes: dict
    directed: frozenset = frozenset()
    bidirected: frozenset = frozenset()
    selfloops: frozenset = frozenset()
    bidiloops: frozenset = frozenset()

    def __post_init__(self):
        sizes = dict(self.sizes)
        for name, size in sizes.items():
            if not isinstance(size, int) or isinstance(size, bool) or size < 1:
                raise InputError(f"cluster {name} needs a positive integer size, got {size!r}")
        selfloops = set(self.selfloops)
        bidiloops = set(self.bidiloops)
        directed = set()
        for u, v in self.directed:
            if u == v:
                selfloops.add(u)
            else:
                directed.add((u, v))
        bidirected = set()
        for u, v in self.bidirected:
            if u == v:
                bidiloops.add(u)
            else:
                bidirected.add((u, v) if u <= v else (v, u))
        for u, v in directed | bidirected:
            for end in (u, v):
                if end not in sizes:
                    raise InputError(f"edge endpoint {end} is not a declared cluster")
        for end in selfloops | bidiloops:
            if end not in sizes:
                raise InputError(f"self-loop on undeclared cluster {end}")
        object.__setattr__(self, "sizes", dict(sorted(sizes.items())))
        object.__setattr__(self, "directed", frozenset(directed))
        object.__setattr__(self, "bidirected", frozenset(bidirected))
        object.__setattr__(self, "selfloops", frozenset(selfloops))
        object.__setattr__(self, "bidiloops", frozenset(bidiloops))

    def __hash__(self):
        return hash((tuple(self.sizes.items()), self.directed, self.bidirected,
                     self.selfloops, self.bidiloops))

    @property
    def names(self):
        return tuple(self.sizes)

    def slots(self, name):
        return tuple(MicroVertex(name, i) for i in range(1, self.sizes[name] + 1))

    def slots_of(self, names):
        return frozenset(v for name in names for v in self.slots(name))

    def micro_vertices(self):
        return self.slots_of(self.names)

    def edge_count(self):
        return (len(self.directed) + len(self.bidirected)
                + len(self.selfloops) + len(self.bidiloops))

    def with_sizes(self, sizes):
        return replace(self, sizes=sizes)


@dataclass(frozen=True)
class DsepQuery:
    """Cluster sets ``x``, ``y``, ``z`` and the mutilation sets ``overline``/``underline``."""

    x: frozenset
    y: frozenset
    z: frozenset = frozenset()
    overline: frozenset = frozenset()
    underline: frozenset = frozenset()

    def __post_init__(self):
        for name in ("x", "y", "z", "overline", "underline"):
            value = getattr(self, name)
            if isinstance(value, str):
                value = (value,)
            object.__setattr__(self, name, frozenset(value))

    def validate(self, c):
        for name in ("x", "y", "z", "overline", "underline"):
            unknown = getattr(self, name) - set(c.sizes)
            if unknown:
                raise InputError(f"query set {name} names undeclared clusters {sorted(unknown)}")
        if not self.x or not self.y:
            raise InputError("query sets x and y must be nonempty")
        if self.x & self.y or self.x & self.z or self.y & self.z:
            raise InputError("query sets x, y and z must be pairwise disjoint")
        return self

    def swapped(self):
        return replace(self, x=self.y, y=self.x)

    def micro(self, c):
        """Slot sets ``(x, y, z, overline, underline)`` over the micro vertices of ``c``."""
        return tuple(c.slots_of(getattr(self, name))
                     for name in ("x", "y", "z", "overline", "underline"))


def size1_violation(c):
    """Describe why ``c`` has no compatible graph, or return None."""
    ones = {name for name, size in c.sizes.items() if size == 1}
    for name in sorted(ones & c.selfloops):
        return f"directed self-loop on size-1 cluster {name}"
    for name in sorted(ones & c.bidiloops):
        return f"bidirected self-loop on size-1 cluster {name}"
    succ = {name: sorted(v for u, v in c.directed if u == name and v in ones) for name in ones}
    state = {}

    def visit(node, stack):
        state[node] = 1
        stack.append(node)
        for nxt in succ[node]:
            if state.get(nxt) == 1:
                return stack[stack.index(nxt):] + [nxt]
            if nxt not in state:
                found = visit(nxt, stack)
                if found:
                    return found
        stack.pop()
        state[node] = 2
        return None

    for name in sorted(ones):
        if name not in state:
            cycle = visit(name, [])
            if cycle:
                return "size-1 cycle " + "→".join(cycle)
    return None


def is_admissible(c):
    return size1_violation(c) is None


def _check_layout(m, c):
    if m.vertices != c.micro_vertices():
        raise InputError("micro graph vertices do not match the cluster slots")


def is_compatible(m, c):
    _check_layout(m, c)
    realized_dir = set()
    realized_bi = set()
    for u, v in m.directed:
        if u.cluster == v.cluster:
            if u.cluster not in c.selfloops:
                return False
            realized_dir.add((u.cluster, u.cluster))
        else:
            if (u.cluster, v.cluster) not in c.directed:
                return False
            realized_dir.add((u.cluster, v.cluster))
    for u, v in m.bidirected:
        a, b = sorted((u.cluster, v.cluster))
        if a == b:
            if a not in c.bidiloops:
                return False
        elif (a, b) not in c.bidirected:
            return False
        realized_bi.add((a, b))
    if realized_dir != set(c.directed) | {(n, n) for n in c.selfloops}:
        return False
    if realized_bi != set(c.bidirected) | {(n, n) for n in c.bidiloops}:
        return False
    return is_acyclic(m)


def _relabel(m, mapping):
    return MicroGraph(
        frozenset(mapping[v] for v in m.vertices),
        {(mapping[u], mapping[v]) for u, v in m.directed},
        {(mapping[u], mapping[v]) for u, v in m.bidirected},
    )


def canonicalize_indices(m, c):
    """Relabel slots so that indices follow a topological order of ``m``.

    A graph whose labels already agree with some topological order is
    returned unchanged; otherwise the order is Kahn's algorithm with ties
    broken by the smallest vertex.
    """
    _check_layout(m, c)
    parents, _ = m.masks
    if not kernels.is_acyclic(parents):
        raise InputError("cannot canonicalize a cyclic graph")
    pos = m.position
    chained = list(parents)
    for name in c.names:
        slots = c.slots(name)
        for a, b in zip(slots, slots[1:]):
            chained[pos[b]] |= 1 << pos[a]
    if kernels.is_acyclic(chained):
        return m
    indegree = {v: len(m.parents(v)) for v in m.vertices}
    ready = sorted(v for v, d in indegree.items() if d == 0)
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for w in m.children(v):
            indegree[w] -= 1
            if indegree[w] == 0:
                ready.append(w)
        ready.sort()
    counters = dict.fromkeys(c.names, 0)
    mapping = {}
    for v in order:
        counters[v.cluster] += 1
        mapping[v] = MicroVertex(v.cluster, counters[v.cluster])
    return _relabel(m, mapping)


def _edge_options(c):
    """Per cluster-level edge: ``(is_directed, candidate micro pairs)``."""
    options = []
    for u, v in sorted(c.directed):
        options.append((True, [(a, b) for a in c.slots(u) for b in c.slots(v)]))
    for name in sorted(c.selfloops):
        slots = c.slots(name)
        options.append((True, [(a, b) for a in slots for b in slots if a != b]))
    for u, v in sorted(c.bidirected):
        options.append((False, [(a, b) for a in c.slots(u) for b in c.slots(v)]))
    for name in sorted(c.bidiloops):
        options.append((False, list(itertools.combinations(c.slots(name), 2))))
    return options


def compatible_candidates(c):
    """Number of edge-subset combinations :func:`enumerate_compatible` would scan."""
    total = 1
    for _, pairs in _edge_options(c):
        total *= (1 << len(pairs)) - 1
    return total


def enumerate_compatible(c, bound):
    """All compatible micro graphs of ``c``, one per canonical labelling.

    Scans every combination of nonempty micro-edge subsets (one subset per
    cluster-level edge, in lexicographic order), keeps the acyclic ones and
    yields each canonical form once.  Raises :class:`EnumerationLimitError`
    up front when the number of combinations exceeds ``bound``.
    """
    total = compatible_candidates(c)
    if total > bound:
        raise EnumerationLimitError(total, bound)
    return _iter_compatible(c)


def _iter_compatible(c):
    options = _edge_options(c)
    vertices = c.micro_vertices()
    order = sorted(vertices)
    pos = {v: i for i, v in enumerate(order)}
    choices = []
    for directed, pairs in options:
        subsets = []
        for mask in range(1, 1 << len(pairs)):
            chosen = [pairs[i] for i in range(len(pairs)) if (mask >> i) & 1]
            subsets.append((directed, chosen))
        choices.append(subsets)
    seen = set()
    for combo in itertools.product(*choices):
        parents = [0] * len(order)
        for directed, chosen in combo:
            if directed:
                for a, b in chosen:
                    parents[pos[b]] |= 1 << pos[a]
        if not kernels.is_acyclic(parents):
            continue
        directed_edges = [e for d, chosen in combo if d for e in chosen]
        bidirected_edges = [e for d, chosen in combo if not d for e in chosen]
        m = canonicalize_indices(MicroGraph(vertices, directed_edges, bidirected_edges), c)
        key = (m.directed, m.bidirected)
        if key not in seen:
            seen.add(key)
            yield m


def reduce_clusters(c, cap=SIZE_CAP):
    """Shrink every cluster to at most ``cap`` slots; edges are kept."""
    if cap < SIZE_CAP:
        raise InputError(f"cluster sizes can only be capped at {SIZE_CAP} or more, got {cap}")
    return c.with_sizes({name: min(size, cap) for name, size in c.sizes.items()})
