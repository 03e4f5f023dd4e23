import random
import subprocess
import sys
from pathlib import Path

import pytest

from cdagsep.cluster import ClusterDag, DsepQuery, is_admissible
from cdagsep.criterion import oracle_cluster_d_connected, unfolded_d_connected
from cdagsep.errors import InputError
from cdagsep.fuzz import (
    SizeLimits,
    fuzz_equivalence,
    generate_case,
    minimize,
    random_cdag,
    random_query,
)

ROOT = Path(__file__).resolve().parent.parent


@pytest.mark.parametrize("profile", ["uniform", "cyclic"])
def test_generated_cases_respect_limits(profile):
    limits = SizeLimits(max_clusters=4, max_size=3, max_edges=6)
    for i in range(200):
        c, q = generate_case(5, i, limits, profile)
        assert is_admissible(c)
        assert 2 <= len(c.sizes) <= 4 and max(c.sizes.values()) <= 3
        assert c.edge_count() <= 6
        q.validate(c)


def test_generation_is_seeded():
    assert generate_case("s", 3) == generate_case("s", 3)
    assert [generate_case(1, i) for i in range(10)] != [generate_case(2, i) for i in range(10)]


def test_unknown_profile():
    with pytest.raises(InputError):
        random_cdag(random.Random(0), profile="spiky")
    with pytest.raises(InputError):
        fuzz_equivalence(1, 0, profile="spiky")


def test_report_is_clean_and_deterministic():
    a = fuzz_equivalence(60, 11)
    b = fuzz_equivalence(60, 11)
    assert a.ok and a.text() == b.text()
    assert not a.disagreements and not a.witness_failures


def test_parallel_matches_serial():
    serial = fuzz_equivalence(40, 3, jobs=1)
    parallel = fuzz_equivalence(40, 3, jobs=2)
    assert serial.text() == parallel.text()


def test_edgeless_generator_gives_only_separated():
    report = fuzz_equivalence(100, 0, SizeLimits(max_edges=0))
    assert report.ok
    assert all(not r.expected and not r.answer for r in report.results)


def test_mutant_is_caught_and_minimized():
    # the unfolded graph alone ignores joint acyclicity of optional edges
    report = fuzz_equivalence(2000, 0, decider=unfolded_d_connected, profile="cyclic")
    assert report.disagreements
    assert not report.ok
    text = report.text()
    assert "--- case" in text and "minimized query:" in text
    for r in report.disagreements:
        c, q = report.minimized[r.index]
        assert is_admissible(c)
        assert unfolded_d_connected(c, q) != oracle_cluster_d_connected(c, q)
        assert c.edge_count() <= r.cdag.edge_count()


def test_minimize_shrinks_padded_case():
    c = ClusterDag(
        {"A": 1, "B": 1, "D": 3, "E": 2},
        {("A", "D"), ("D", "B"), ("B", "A"), ("E", "D")},
        {("A", "E")},
        selfloops={"E"},
    )
    q = DsepQuery("A", "B", "E", underline="B")
    small, small_q = minimize(c, q, unfolded_d_connected)
    assert set(small.sizes) == {"A", "B", "D"}
    assert small.directed == {("A", "D"), ("D", "B"), ("B", "A")}
    assert small_q == DsepQuery("A", "B", underline="B")


def test_random_query_without_mutilation():
    rng = random.Random(4)
    c = random_cdag(rng)
    for _ in range(50):
        q = random_query(rng, c, mutilate=False)
        assert not q.overline and not q.underline


def test_benchmark_quick_runs():
    proc = subprocess.run([sys.executable, str(ROOT / "benchmarks" / "bench_kernels.py"), "--quick"],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    assert "dconnected" in proc.stdout and "oracle_search" in proc.stdout
