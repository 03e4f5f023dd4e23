import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdagsep import kernels
from cdagsep.kernels import _pure

compiled = pytest.importorskip("cdagsep.kernels._ckernels")


@st.composite
def dags(draw, max_n=20):
    n = draw(st.integers(1, max_n))
    parents = [draw(st.integers(0, (1 << v) - 1)) if v else 0 for v in range(n)]
    perm = draw(st.permutations(range(n)))
    # relabel so the topological order is not the index order
    relabeled = [0] * n
    for v in range(n):
        mask = 0
        for u in range(n):
            if parents[v] >> u & 1:
                mask |= 1 << perm[u]
        relabeled[perm[v]] = mask
    bidi = [0] * n
    for v in range(n):
        for u in range(v):
            if draw(st.booleans()) and draw(st.booleans()):
                bidi[v] |= 1 << u
                bidi[u] |= 1 << v
    return relabeled, bidi


@st.composite
def digraphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    return [draw(st.integers(0, (1 << n) - 1)) & ~(1 << v) for v in range(n)]


@given(dags(), st.data())
def test_ancestors_and_dconnected_match(graph, data):
    parents, bidi = graph
    n = len(parents)
    x = data.draw(st.integers(0, (1 << n) - 1))
    z = data.draw(st.integers(0, (1 << n) - 1)) & ~x
    assert compiled.ancestors(parents, z) == _pure.ancestors(parents, z)
    assert compiled.dconnected(parents, bidi, x, z) == _pure.dconnected(parents, bidi, x, z)


@given(digraphs())
def test_is_acyclic_matches(parents):
    assert compiled.is_acyclic(parents) == _pure.is_acyclic(parents)


def test_is_acyclic_examples():
    assert _pure.is_acyclic([0, 0b1, 0b10])
    assert not _pure.is_acyclic([0b10, 0b1])
    assert compiled.is_acyclic([0] * 64)
    chain = [0] + [1 << (v - 1) for v in range(1, 64)]
    assert compiled.is_acyclic(chain)
    chain[0] = 1 << 63
    assert not compiled.is_acyclic(chain)


@st.composite
def oracle_inputs(draw):
    k = draw(st.integers(1, 4))
    sizes = [draw(st.integers(1, 3)) for _ in range(k)]
    n = sum(sizes)
    pred = [0] * k
    for c in range(k):
        for p in range(k):
            if draw(st.booleans()) and (p != c or sizes[c] > 1):
                pred[c] |= 1 << p
    dep = [1 << c for c in range(k)]
    for c in range(k):
        for p in range(k):
            if pred[c] >> p & 1:
                dep[c] |= 1 << p
                dep[p] |= 1 << c
    required = [pred[c] & ~(1 << c) for c in range(k)]
    bidi = [0] * n
    for v in range(n):
        for u in range(v):
            if draw(st.integers(0, 5)) == 0:
                bidi[v] |= 1 << u
                bidi[u] |= 1 << v
    masks = [draw(st.integers(0, (1 << n) - 1)) for _ in range(5)]
    over, under, x, y, z = masks
    y &= ~x
    z &= ~(x | y)
    return sizes, pred, dep, required, bidi, over, under, x, y, z


@settings(max_examples=150, deadline=None)
@given(oracle_inputs())
def test_oracle_search_matches(args):
    assert compiled.oracle_search(*args) == _pure.oracle_search(*args)


@settings(max_examples=150, deadline=None)
@given(oracle_inputs())
def test_commutation_pruning_keeps_answer(args):
    sizes, pred, dep, required, bidi, over, under, x, y, z = args
    everything = (1 << len(sizes)) - 1
    found, leaves = compiled.oracle_search(*args)
    full_found, full_leaves = compiled.oracle_search(
        sizes, pred, [everything] * len(sizes), required, bidi, over, under, x, y, z
    )
    assert found == full_found
    if not found:
        assert leaves <= full_leaves


def test_compiled_rejects_large_graphs():
    with pytest.raises(ValueError):
        compiled.is_acyclic([0] * 65)


def test_large_graphs_fall_back_to_pure():
    parents = [0] + [1 << (v - 1) for v in range(1, 80)]
    assert kernels.is_acyclic(parents)
    assert kernels.ancestors(parents, 1 << 79) == (1 << 80) - 1


def test_backend_selection_by_environment():
    env = dict(os.environ, CDAGSEP_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from cdagsep import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "pure"
    assert kernels.BACKEND == "compiled"
