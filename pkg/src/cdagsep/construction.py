"""Minimal compatible graph and unfolded graph of a cluster-DAG."""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .admg import MicroGraph
from .cluster import size1_violation
from .errors import InputError


def _require_admissible(c):
    problem = size1_violation(c)
    if problem:
        raise InputError(f"inadmissible: {problem}")


def minimal_compatible_graph(c):
    """The canonical compatible graph with as few forced directed edges as possible.

    Every bidirected cluster edge (or bidirected self-loop) is realized on all
    slot pairs, a directed self-loop on ``V`` becomes ``V_i -> V_j`` for all
    ``i < j`` and each directed cluster edge ``U -> V`` becomes the single
    edge ``U_1 -> V_#V``.
    """
    _require_admissible(c)
    directed = set()
    bidirected = set()
    for u, v in c.bidirected:
        bidirected.update((a, b) for a in c.slots(u) for b in c.slots(v))
    for name in c.bidiloops:
        slots = c.slots(name)
        bidirected.update((a, b) for a in slots for b in slots if a < b)
    for name in c.selfloops:
        slots = c.slots(name)
        directed.update((a, b) for a in slots for b in slots if a < b)
    for u, v in c.directed:
        directed.add((c.slots(u)[0], c.slots(v)[-1]))
    return MicroGraph(c.micro_vertices(), directed, bidirected)


@dataclass(frozen=True)
class UnfoldedGraph:
    g_min: MicroGraph
    to_choose: frozenset
    g_u: MicroGraph


def unfolded_graph(c):
    """``g_min`` plus every inter-cluster edge that alone keeps ``g_min`` acyclic."""
    g_min = minimal_compatible_graph(c)
    parents, _ = g_min.masks
    pos = g_min.position
    to_choose = set()
    for u, v in sorted(c.directed):
        for a in c.slots(u):
            for b in c.slots(v):
                if (a, b) in g_min.directed:
                    continue
                trial = list(parents)
                trial[pos[b]] |= 1 << pos[a]
                if kernels.is_acyclic(trial):
                    to_choose.add((a, b))
    g_u = MicroGraph(g_min.vertices, g_min.directed | to_choose, g_min.bidirected)
    return UnfoldedGraph(g_min, frozenset(to_choose), g_u)
