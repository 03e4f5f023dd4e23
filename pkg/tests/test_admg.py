import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from brute import dsep_by_paths, has_connecting_structure
from cdagsep.admg import (
    MicroGraph,
    MicroVertex,
    StructureOfInterest,
    connecting_structure,
    connects_under,
    d_connecting_path,
    d_separated_admg,
    is_active_path,
    is_acyclic,
    is_structure_of_interest,
    mutilate,
    parse_vertex,
    path_from_structure,
    roots,
    structure_from_path,
    walk_to_active_path,
)
from cdagsep.errors import InputError


def graph(directed=(), bidirected=(), vertices=()):
    return MicroGraph(frozenset(vertices), set(directed), set(bidirected))


def edges(text):
    return [tuple(pair.split(">")) for pair in text.split()]


# X, A..H, Y with the red structure X->A, B->A, A->C, B->E, C->F, Y<->E
SAMPLE = graph(
    edges("X>A B>A A>C X>C A>D B>E C>F D>G E>H"),
    [("B", "D"), ("E", "Y"), ("D", "F"), ("G", "H")],
)
RED = graph(edges("X>A B>A A>C B>E C>F"), [("E", "Y")])


@st.composite
def admgs(draw, max_n=7):
    n = draw(st.integers(2, max_n))
    order = draw(st.permutations(list("abcdefgh"[:n])))
    directed, bidirected = set(), set()
    for i in range(n):
        for j in range(i + 1, n):
            kind = draw(st.integers(0, 5))
            if kind == 0:
                directed.add((order[i], order[j]))
            elif kind == 1:
                bidirected.add(tuple(sorted((order[i], order[j]))))
            elif kind == 2:
                directed.add((order[i], order[j]))
                bidirected.add(tuple(sorted((order[i], order[j]))))
    return graph(directed, bidirected, order)


@st.composite
def admg_queries(draw, max_n=7):
    g = draw(admgs(max_n))
    vs = sorted(g.vertices)
    labels = draw(st.lists(st.integers(0, 3), min_size=len(vs), max_size=len(vs)))
    x = {v for v, lab in zip(vs, labels) if lab == 0}
    y = {v for v, lab in zip(vs, labels) if lab == 1}
    z = {v for v, lab in zip(vs, labels) if lab == 2}
    assume(x and y)
    return g, x, y, z


def test_micro_vertex_text_round_trip():
    v = MicroVertex("A", 3)
    assert str(v) == "A[3]"
    assert parse_vertex("A[3]") == v
    with pytest.raises(InputError):
        parse_vertex("A3")


def test_micro_graph_rejects_self_edges():
    with pytest.raises(InputError):
        graph([("a", "a")])
    with pytest.raises(InputError):
        graph(bidirected=[("a", "a")])


def test_is_acyclic_examples():
    assert is_acyclic(graph(edges("A1>B1 B1>C1")))
    assert not is_acyclic(graph(edges("A1>B1 B1>A1")))


def test_roots_examples():
    assert roots(graph(vertices=["v"])) == {"v"}
    assert roots(graph([("X", "Y")])) == {"Y"}
    assert roots(RED) == {"F", "E", "Y"}
    assert roots(graph(bidirected=[("a", "b")])) == {"a", "b"}


def test_mutilate_examples():
    g = graph([("A", "X"), ("X", "B")], [("A", "X")])
    cut = mutilate(g, {"X"}, set())
    assert cut.directed == {("X", "B")} and not cut.bidirected
    assert cut.vertices == g.vertices
    assert not mutilate(graph([("Z", "A")]), set(), {"Z"}).directed
    assert mutilate(g) == g
    with pytest.raises(InputError):
        mutilate(g, {"nope"})


def test_d_separation_examples():
    chain = graph(edges("X>M M>Y"))
    assert d_separated_admg(chain, {"X"}, {"Y"}, {"M"})
    collider = graph(edges("X>C Y>C"))
    assert d_separated_admg(collider, {"X"}, {"Y"}, set())
    assert not d_separated_admg(collider, {"X"}, {"Y"}, {"C"})
    assert not d_separated_admg(SAMPLE, {"X"}, {"Y"}, {"F", "E"})


def test_bidirected_edges_make_colliders():
    g = graph(bidirected=[("X", "C"), ("C", "Y")])
    assert d_separated_admg(g, {"X"}, {"Y"}, set())
    assert not d_separated_admg(g, {"X"}, {"Y"}, {"C"})


def test_d_separation_errors():
    with pytest.raises(InputError):
        d_separated_admg(graph(edges("a>b b>a")), {"a"}, {"b"}, set())
    with pytest.raises(InputError):
        d_separated_admg(SAMPLE, {"X"}, {"X", "Y"}, set())
    with pytest.raises(InputError):
        d_separated_admg(SAMPLE, {"X"}, {"Y"}, {"Y"})


def test_walk_to_active_path_examples():
    # X -> A <- B -> A -> Y given D: A is a collider first (an ancestor of D), B a fork
    g = graph(edges("X>A B>A A>Y A>D"))
    assert walk_to_active_path(g, ["X", "A", "Y"], {"D"}) == ("X", "A", "Y")
    assert walk_to_active_path(g, ["X", "A", "B", "A", "Y"], {"D"}) == ("X", "A", "Y")
    with pytest.raises(InputError):
        walk_to_active_path(g, ["X", "A", "Y"], {"A"})
    with pytest.raises(InputError):
        walk_to_active_path(g, ["X", "B"], set())


def test_structure_of_interest_examples():
    assert is_structure_of_interest(graph([("X", "Y")]))
    assert is_structure_of_interest(RED)
    assert not is_structure_of_interest(graph(edges("B>A A>C A>D")))
    assert is_structure_of_interest(graph(edges("A>C A>D")))
    assert not is_structure_of_interest(graph(edges("a>b c>d")))
    with pytest.raises(InputError):
        StructureOfInterest(graph(edges("B>A A>C A>D")))


def test_connects_under_examples():
    assert connects_under(StructureOfInterest(RED), SAMPLE, {"X"}, {"Y"}, {"F", "E"})
    assert connects_under(StructureOfInterest(graph([("X", "Y")])), graph([("X", "Y")]), {"X"}, {"Y"})
    chain = graph(edges("X>M M>Y"))
    assert not connects_under(StructureOfInterest(chain), chain, {"X"}, {"Y"}, {"M"})
    assert not connects_under(StructureOfInterest(RED), RED, {"X"}, {"Y"}, {"F"})
    with pytest.raises(InputError):
        connects_under(graph(edges("a>b c>d")), SAMPLE, {"a"}, {"d"})


def test_structure_from_path_examples():
    chain = graph(edges("X>M M>Y"))
    sigma = structure_from_path(chain, ["X", "M", "Y"], {}, {"X"}, {"Y"}, set())
    assert sigma.subgraph == chain
    sigma = structure_from_path(
        SAMPLE, ["X", "A", "B", "E", "Y"], {"A": ["A", "C", "F"]}, {"X"}, {"Y"}, {"F", "E"}
    )
    assert sigma.subgraph == RED
    assert sigma.roots == {"F", "E", "Y"}


def test_structure_from_path_rejects_bad_input():
    with pytest.raises(InputError):
        structure_from_path(SAMPLE, ["X", "A", "B", "E", "Y"], {}, {"X"}, {"Y"}, {"F", "E"})
    with pytest.raises(InputError):
        structure_from_path(
            SAMPLE, ["X", "A", "B", "E", "Y"], {"A": ["A", "D", "G"]}, {"X"}, {"Y"}, {"F", "E"}
        )


def test_escape_into_fork_removes_collider():
    # path x <- f -> g <-> c <- y; the escape of collider c runs through the fork f
    g = graph(edges("f>x f>g c>f y>c f>z g>w"), [("g", "c")])
    sigma = structure_from_path(
        g, ["x", "f", "g", "c", "y"], {"g": ["g", "w"], "c": ["c", "f", "z"]},
        {"x"}, {"y"}, {"z", "w"},
    )
    assert sigma.subgraph.directed == {("f", "x"), ("c", "f"), ("y", "c")}
    assert not sigma.subgraph.bidirected
    assert connects_under(sigma, g, {"x"}, {"y"}, {"z", "w"})


def test_path_from_structure_examples():
    assert path_from_structure(StructureOfInterest(graph([("X", "Y")])), {"X"}, {"Y"}) == ("X", "Y")
    path = path_from_structure(StructureOfInterest(RED), {"X"}, {"Y"}, {"F", "E"})
    assert path == ("X", "A", "B", "E", "Y")
    assert is_active_path(SAMPLE, path, {"F", "E"})
    with pytest.raises(InputError):
        path_from_structure(StructureOfInterest(RED), {"X"}, {"Y"}, set())


def test_path_from_structure_reroutes_collider_into_x():
    # collider c has no route to z; its only descent leads back into x
    sigma = StructureOfInterest(graph(edges("a>c b>c c>x b>y")))
    path = path_from_structure(sigma, {"a", "x"}, {"y"}, set())
    assert path[0] in {"a", "x"} and path[-1] == "y"
    assert is_active_path(sigma.subgraph, path, set())


@settings(max_examples=300, deadline=None)
@given(admg_queries())
def test_no_structure_iff_d_separated(case):
    g, x, y, z = case
    assert d_separated_admg(g, x, y, z) == (not has_connecting_structure(g, x, y, z))


@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(case=admg_queries())
def test_matches_simple_path_enumeration(case, backend):
    g, x, y, z = case
    assert d_separated_admg(g, x, y, z) == dsep_by_paths(g, x, y, z)


@settings(max_examples=200, deadline=None)
@given(admg_queries())
def test_symmetry(case):
    g, x, y, z = case
    assert d_separated_admg(g, x, y, z) == d_separated_admg(g, y, x, z)


@settings(max_examples=200, deadline=None)
@given(admgs(), st.data())
def test_mutilate_idempotent_and_shrinking(g, data):
    vs = sorted(g.vertices)
    over = set(data.draw(st.lists(st.sampled_from(vs), max_size=3)))
    under = set(data.draw(st.lists(st.sampled_from(vs), max_size=3)))
    once = mutilate(g, over, under)
    assert mutilate(once, over, under) == once
    assert once.directed <= g.directed and once.bidirected <= g.bidirected


@settings(max_examples=200, deadline=None)
@given(admg_queries(), st.data())
def test_monotone_under_edge_addition(case, data):
    g, x, y, z = case
    sub = graph(
        data.draw(st.sets(st.sampled_from(sorted(g.directed)))) if g.directed else (),
        data.draw(st.sets(st.sampled_from(sorted(g.bidirected)))) if g.bidirected else (),
        g.vertices,
    )
    if not d_separated_admg(sub, x, y, z):
        assert not d_separated_admg(g, x, y, z)


@settings(max_examples=300, deadline=None)
@given(admg_queries())
def test_witness_round_trip(case):
    g, x, y, z = case
    path = d_connecting_path(g, x, y, z)
    sigma = connecting_structure(g, x, y, z)
    assert (path is None) == (sigma is None) == d_separated_admg(g, x, y, z)
    if sigma is None:
        return
    assert is_active_path(g, path, z) and len(set(path)) == len(path)
    assert connects_under(sigma, g, x, y, z)
    back = path_from_structure(sigma, x, y, z)
    assert back[0] in x and back[-1] in y
    assert is_active_path(g, back, z)


@settings(max_examples=300, deadline=None)
@given(admg_queries(), st.randoms(use_true_random=False))
def test_walks_shorten_to_active_paths(case, rnd):
    g, x, y, z = case
    path = d_connecting_path(g, x, y, z)
    assume(path is not None)
    # splice a back-and-forth detour at a non-collider that stays active
    i = rnd.randrange(len(path))
    v = path[i]
    nbrs = sorted(w for w, *_ in g.adjacency[v])
    walk = list(path)
    if nbrs and v not in z:
        w = rnd.choice(nbrs)
        walk = list(path[: i + 1]) + [w, v] + list(path[i + 1:])
    if not is_active_path(g, walk, z):
        return
    out = walk_to_active_path(g, walk, z)
    assert out[0] == walk[0] and out[-1] == walk[-1]
    assert len(set(out)) == len(out)
    assert is_active_path(g, out, z)
