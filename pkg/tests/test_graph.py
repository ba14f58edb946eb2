import random

import pytest

from baire.composed import AmalgamGroup, HNNGroup
from baire.errors import EmbeddingError, ValidationError
from baire.graph import britton_reduce, coset_rep, parse, parse_element, parse_word

from conftest import load
from oracles import free_reduce

LOOP = """
vertex v0 group Z^1 x table:0,1;1,0 names:e,a
edge t from v0 to v0 sigma table:0,1;1,0 s_images:(0;e),(0;a) r_images:(0;e),(0;a)
"""


def test_single_loop_is_hnn():
    g = parse(LOOP)
    assert isinstance(g.group, HNNGroup)
    assert g.tree == frozenset()
    assert [s.kind for s in g.steps()] == ["hnn"]


def test_single_edge_is_amalgam():
    g = load("amalgam")
    assert isinstance(g.group, AmalgamGroup)
    assert g.tree == frozenset({"e"})


def test_no_edges_rejected():
    with pytest.raises(ValidationError, match="at least one edge"):
        parse("vertex v0 group Z^1\nvertex v1 group Z^1\n")


def test_disconnected_rejected():
    text = LOOP + "vertex v1 group Z^1\n"
    with pytest.raises(ValidationError, match="disconnected"):
        parse(text)


def test_dangling_incidence_cites_line():
    text = "vertex v0 group Z^1\nedge e from v0 to v9 sigma table:0 s_images:(0) r_images:(0)\n"
    with pytest.raises(ValidationError) as err:
        parse(text)
    assert err.value.line == 2 and "v9" in str(err.value)


def test_infinite_edge_group_rejected():
    text = "vertex v0 group Z^1\nedge e from v0 to v0 sigma Z^1 s_images:(0) r_images:(0)\n"
    with pytest.raises(ValidationError, match="finite"):
        parse(text)


def test_embedding_violation_cites_edge():
    text = LOOP.replace("r_images:(0;e),(0;a)", "r_images:(0;e),(2;e)")
    with pytest.raises(EmbeddingError) as err:
        parse(text)
    assert "edge t" in str(err.value) and err.value.line == 3


def test_bad_table_cites_line():
    with pytest.raises(ValidationError) as err:
        parse("\nvertex v0 group Z^1 x table:0,1;0,1\n")
    assert err.value.line == 2


def test_tree_markers_must_span():
    text = """
vertex v0 group Z^1
vertex v1 group Z^1
edge e1 from v0 to v1 sigma table:0 s_images:(0) r_images:(0)
edge e2 from v0 to v1 sigma table:0 s_images:(0) r_images:(0) tree
"""
    g = parse(text)
    assert g.tree == frozenset({"e2"})
    # without markers the first edge found from v0 wins
    assert parse(text.replace(" tree", "")).tree == frozenset({"e1"})
    with pytest.raises(ValidationError, match="spanning tree"):
        parse(text.replace("(0) r_images:(0)\nedge", "(0) r_images:(0) tree\nedge"))


def test_header_keys():
    assert load("free").header["budget"] == "30"


def test_element_syntax():
    g = parse(LOOP)
    G = g.vertices["v0"]
    assert parse_element(G, "(3;a)") == G.element([3], 1)
    assert parse_element(G, "(-2;1)") == G.element([-2], 1)
    assert parse_element(G, "(5)") == G.element([5], 0)
    with pytest.raises(ValidationError):
        parse_element(G, "(1;b)")


def test_britton_stable_letter_conjugation():
    g = parse(LOOP)
    nf = britton_reduce(g, parse_word(g, "t v0:(0;a) t^-1"))
    assert str(nf) == "v0:(0;a)"
    assert britton_reduce(g, ()).is_trivial


def test_britton_free_product_example():
    g = load("free")
    word = parse_word(g, "a:(1) b:(1) a:(-1) a:(1) b:(-1) a:(-1)")
    assert britton_reduce(g, word).is_trivial
    nf = britton_reduce(g, parse_word(g, "a:(1) b:(1) a:(-1) a:(1) b:(-1)"))
    assert str(nf) == "a:(1;e)"


def test_britton_matches_free_reduction():
    g = load("free")
    rng = random.Random(4)
    letters = {("a", 1): "a:(1)", ("a", -1): "a:(-1)", ("b", 1): "b:(1)", ("b", -1): "b:(-1)"}
    for _ in range(300):
        w = [rng.choice(list(letters)) for _ in range(rng.randint(0, 8))]
        nf = britton_reduce(g, parse_word(g, " ".join(letters[x] for x in w)))
        reduced = free_reduce(w)
        assert nf.is_trivial == (reduced == ())
        assert len(g.group.letters(nf.element)) <= len(reduced)


def test_britton_idempotent():
    g = parse(LOOP)
    w = parse_word(g, "v0:(1;a) t v0:(2;e) t^-1 t v0:(0;a)")
    nf = britton_reduce(g, w)
    again = britton_reduce(g, parse_word(g, str(nf)))
    assert again == nf


def test_tree_edge_letters_are_trivial():
    g = load("two_edge")
    w = parse_word(g, "e2 v1:(1) e2^-1")
    assert britton_reduce(g, w) == britton_reduce(g, parse_word(g, "v1:(1)"))


def test_coset_rep():
    g = parse(LOOP)
    G = g.group
    h = G.embed(g.vertices["v0"].element([3], 1))
    assert coset_rep(G, h) == G.identity
    assert coset_rep(G, G.mul(h, G.t)) == coset_rep(G, G.t)
    A = load("amalgam").group
    with pytest.raises(ValueError):
        coset_rep(A, A.identity)
