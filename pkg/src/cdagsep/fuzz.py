"""Differential fuzzing of the criterion against the enumeration oracle."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .cdag_io import render
from .cluster import ClusterDag, DsepQuery, is_admissible
from .criterion import Witness, cluster_d_connected, oracle_cluster_d_connected, witness_problems
from .errors import InputError

NAMES = "ABCDEFGH"


@dataclass(frozen=True)
class SizeLimits:
    max_clusters: int = 4
    max_size: int = 3
    max_edges: int = 6
    min_clusters: int = 2


PROFILES = ("uniform", "cyclic")


def _edge_pool(names):
    pool = [("d", u, v) for u in names for v in names if u != v]
    pool += [("b", u, v) for i, u in enumerate(names) for v in names[i + 1:]]
    pool += [("s", n, n) for n in names] + [("l", n, n) for n in names]
    return pool


def _build(sizes, chosen):
    return ClusterDag(
        sizes,
        {(u, v) for kind, u, v in chosen if kind == "d"},
        {(u, v) for kind, u, v in chosen if kind == "b"},
        {u for kind, u, _ in chosen if kind == "s"},
        {u for kind, u, _ in chosen if kind == "l"},
    )


def _uniform_cdag(rng, limits):
    k = rng.randint(limits.min_clusters, limits.max_clusters)
    names = NAMES[:k]
    sizes = {n: rng.randint(1, limits.max_size) for n in names}
    pool = _edge_pool(names)
    budget = rng.randint(0, min(limits.max_edges, len(pool)))
    chosen = []
    if budget >= 2 and rng.random() < 0.5:
        # plant a directed cluster cycle: acyclic cluster-DAGs are the easy case
        ring = rng.sample(names, rng.randint(2, min(k, budget)))
        chosen = [("d", u, v) for u, v in zip(ring, ring[1:] + ring[:1])]
    rest = [e for e in pool if e not in chosen]
    return _build(sizes, chosen + rng.sample(rest, budget - len(chosen)))


def _cyclic_cdag(rng, limits):
    # a directed ring of size-1 clusters kept admissible by one larger cluster
    k = rng.randint(max(3, limits.min_clusters), max(3, limits.max_clusters))
    names = NAMES[:k]
    ring = rng.sample(names, rng.randint(2, min(k, max(2, limits.max_edges))))
    big = rng.choice(ring)
    sizes = {}
    for n in names:
        if n == big:
            sizes[n] = rng.randint(2, max(2, limits.max_size))
        else:
            sizes[n] = 1 if n in ring else rng.randint(1, limits.max_size)
    chosen = [("d", u, v) for u, v in zip(ring, ring[1:] + ring[:1])]
    rest = [e for e in _edge_pool(names) if e not in chosen]
    extra = rng.randint(0, max(0, limits.max_edges - len(chosen)))
    return _build(sizes, chosen + rng.sample(rest, extra))


def random_cdag(rng, limits=SizeLimits(), profile="uniform"):
    """A random admissible cluster-DAG within ``limits``.

    The ``cyclic`` profile always contains a directed cluster cycle through
    size-1 clusters, where joint acyclicity of micro edges matters most.
    """
    make = {"uniform": _uniform_cdag, "cyclic": _cyclic_cdag}.get(profile)
    if make is None:
        raise InputError(f"unknown fuzz profile {profile!r}")
    while True:
        c = make(rng, limits)
        if is_admissible(c):
            return c


def _subset(rng, items, p):
    return frozenset(i for i in items if rng.random() < p)


def random_query(rng, c, mutilate=True):
    names = list(c.names)
    rng.shuffle(names)
    if rng.random() < 0.5:
        nx = ny = 1
    else:
        nx = rng.randint(1, len(names) - 1)
        ny = rng.randint(1, len(names) - nx)
    x, y = frozenset(names[:nx]), frozenset(names[nx:nx + ny])
    z = _subset(rng, names[nx + ny:], 0.5)
    over = _subset(rng, c.names, 0.25) if mutilate else frozenset()
    under = _subset(rng, c.names, 0.25) if mutilate else frozenset()
    return DsepQuery(x, y, z, over, under)


def case_rng(seed, i):
    return random.Random(f"{seed}:{i}")


def generate_case(seed, i, limits=SizeLimits(), profile="uniform"):
    rng = case_rng(seed, i)
    c = random_cdag(rng, limits, profile)
    return c, random_query(rng, c)


def _answer(result):
    return result if isinstance(result, bool) else result is not None


def _disagrees(c, q, decider):
    return _answer(decider(c, q)) != oracle_cluster_d_connected(c, q)


def _variants(c, q):
    """Candidate reductions of a failing case, smallest change first."""
    for e in sorted(c.directed):
        yield replace(c, directed=c.directed - {e}), q
    for e in sorted(c.bidirected):
        yield replace(c, bidirected=c.bidirected - {e}), q
    for n in sorted(c.selfloops):
        yield replace(c, selfloops=c.selfloops - {n}), q
    for n in sorted(c.bidiloops):
        yield replace(c, bidiloops=c.bidiloops - {n}), q
    for n in c.names:
        sizes = {m: s for m, s in c.sizes.items() if m != n}
        if not sizes:
            continue
        smaller = ClusterDag(
            sizes,
            {e for e in c.directed if n not in e},
            {e for e in c.bidirected if n not in e},
            c.selfloops - {n},
            c.bidiloops - {n},
        )
        yield smaller, DsepQuery(q.x - {n}, q.y - {n}, q.z - {n},
                                 q.overline - {n}, q.underline - {n})
    for n, s in c.sizes.items():
        if s > 1:
            yield c.with_sizes({**c.sizes, n: s - 1}), q
    for name in ("z", "overline", "underline"):
        for n in sorted(getattr(q, name)):
            yield c, replace(q, **{name: getattr(q, name) - {n}})


def minimize(c, q, decider=cluster_d_connected):
    """Greedily delete edges, clusters and slots while the disagreement persists."""
    changed = True
    while changed:
        changed = False
        for c2, q2 in _variants(c, q):
            try:
                if not is_admissible(c2):
                    continue
                q2.validate(c2)
                if _disagrees(c2, q2, decider):
                    c, q, changed = c2, q2, True
                    break
            except InputError:
                continue
    return c, q


@dataclass
class CaseResult:
    index: int
    cdag: ClusterDag
    query: DsepQuery
    expected: bool
    answer: bool
    witness_problems: list = field(default_factory=list)

    @property
    def ok(self):
        return self.expected == self.answer and not self.witness_problems


def run_case(seed, i, limits=SizeLimits(), decider=cluster_d_connected, profile="uniform"):
    c, q = generate_case(seed, i, limits, profile)
    expected = oracle_cluster_d_connected(c, q)
    result = decider(c, q)
    problems = witness_problems(c, q, result) if isinstance(result, Witness) else []
    return CaseResult(i, c, q, expected, _answer(result), problems)


def _run_case_args(args):
    return run_case(*args)


@dataclass
class FuzzReport:
    seed: object
    limits: SizeLimits
    results: list
    minimized: dict
    profile: str = "uniform"

    @property
    def disagreements(self):
        return [r for r in self.results if r.expected != r.answer]

    @property
    def witness_failures(self):
        return [r for r in self.results if r.witness_problems]

    @property
    def ok(self):
        return all(r.ok for r in self.results)

    def text(self):
        connected = sum(r.expected for r in self.results)
        lines = [
            f"fuzz seed={self.seed} cases={len(self.results)} "
            f"limits=clusters<={self.limits.max_clusters},size<={self.limits.max_size},"
            f"edges<={self.limits.max_edges} profile={self.profile}",
        ]
        for r in self.results:
            verdict = "connected" if r.expected else "separated"
            status = "ok" if r.ok else "FAIL"
            lines.append(f"case {r.index:04d} {_describe(r.cdag, r.query)} {verdict} {status}")
        lines.append(f"oracle connected={connected} separated={len(self.results) - connected}")
        lines.append(f"disagreements={len(self.disagreements)} "
                     f"witness_failures={len(self.witness_failures)}")
        for r in self.disagreements:
            c, q = self.minimized[r.index]
            lines.append(f"--- case {r.index:04d}: criterion says "
                         f"{'connected' if r.answer else 'separated'}, oracle says "
                         f"{'connected' if r.expected else 'separated'}")
            lines.append(f"minimized query: {_query_text(q)}")
            lines.extend("  " + line for line in render(c).splitlines())
        for r in self.witness_failures:
            lines.append(f"--- case {r.index:04d}: invalid witness: {'; '.join(r.witness_problems)}")
        return "\n".join(lines) + "\n"


def _names(s):
    return ",".join(sorted(s)) or "-"


def _query_text(q):
    return (f"x={_names(q.x)} y={_names(q.y)} z={_names(q.z)} "
            f"do={_names(q.overline)} underline={_names(q.underline)}")


def _describe(c, q):
    sizes = "".join(f"{n}{s}" for n, s in c.sizes.items())
    return f"[{sizes} e={c.edge_count()}] {_query_text(q)}"


def fuzz_equivalence(cases, seed, size_limits=None, decider=cluster_d_connected, jobs=1,
                     profile="uniform"):
    """Compare ``decider`` with the oracle on ``cases`` seeded random instances.

    Case ``i`` draws from ``random.Random(f"{seed}:{i}")`` so results do not
    depend on worker count.  Disagreements are minimized in the report.
    """
    limits = size_limits or SizeLimits()
    if profile not in PROFILES:
        raise InputError(f"unknown fuzz profile {profile!r}")
    args = [(seed, i, limits, decider, profile) for i in range(cases)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_case_args, args, chunksize=8))
    else:
        results = [run_case(*a) for a in args]
    minimized = {r.index: minimize(r.cdag, r.query, decider)
                 for r in results if r.expected != r.answer}
    return FuzzReport(seed, limits, results, minimized, profile)
