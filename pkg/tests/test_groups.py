import itertools
import random

import pytest
from hypothesis import given, strategies as st

from baire.errors import EmbeddingError, StructuralError, ValidationError
from baire.groups import BaseGroup, Embedding, FiniteGroup, FiniteSubgroup, check_embedding

S3_PERMS = list(itertools.permutations(range(3)))


def s3():
    return FiniteGroup.from_permutations(S3_PERMS)


def klein():
    return FiniteGroup([[a ^ b for b in range(4)] for a in range(4)])


def test_table_validation():
    with pytest.raises(ValidationError):
        FiniteGroup([[0, 1], [1, 1]])
    with pytest.raises(ValidationError):
        FiniteGroup([[1, 0], [0, 1]])
    # a Latin square with identity 0 that is not associative (order 5 loop)
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(ValidationError, match="associativity"):
        FiniteGroup(loop)


def test_s3_table_matches_permutation_composition():
    G = s3()
    for a, b in itertools.product(range(6), repeat=2):
        p, q = S3_PERMS[a], S3_PERMS[b]
        assert S3_PERMS[G.mul(a, b)] == tuple(p[q[i]] for i in range(3))
    assert all(G.mul(a, G.inv(a)) == 0 for a in range(6))
    assert sorted(G.element_order(a) for a in range(6)) == [1, 2, 2, 2, 3, 3]


def test_componentwise_product():
    G = BaseGroup(1, FiniteGroup.cyclic(2))
    assert G.mul(G.element([3], 1), G.element([-1], 1)) == G.element([2], 0)
    g = G.element([5], 1)
    assert G.mul(g, G.identity) == g
    with pytest.raises(StructuralError):
        G.mul(g, BaseGroup(2).identity)


def test_nonabelian_finite_part_associativity_sweep():
    G = BaseGroup(0, s3())
    els = list(G.enumerate())
    assert len(els) == 6
    count = 0
    for a, b, c in itertools.product(els, repeat=3):
        assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
        count += 1
    assert count == 216


def test_enumeration_order():
    Z = BaseGroup(1)
    first = [g.vector[0] for g in itertools.islice(Z.enumerate(), 5)]
    assert first == [0, -1, 1, -2, 2]
    Z2 = BaseGroup(2)
    head = list(itertools.islice(Z2.enumerate(), 25))
    assert {g.vector for g in head} == set(itertools.product(range(-2, 3), repeat=2))
    keys = [Z2.key(g) for g in head]
    assert keys == sorted(keys)


def test_enumeration_is_injective_and_positions_agree():
    G = BaseGroup(2, FiniteGroup.cyclic(3))
    seen = list(itertools.islice(G.enumerate(), 600))
    assert len(set(seen)) == len(seen)
    for i, g in enumerate(seen):
        assert G.position(g) == i


@given(st.lists(st.integers(-6, 6), min_size=3, max_size=3), st.integers(0, 1))
def test_position_hits_enumeration(vec, fin):
    G = BaseGroup(3, FiniteGroup.cyclic(2))
    g = G.element(vec, fin)
    i = G.position(g)
    assert next(itertools.islice(G.enumerate(), i, None)) == g


@given(
    st.lists(st.integers(-20, 20), min_size=2, max_size=2),
    st.lists(st.integers(-20, 20), min_size=2, max_size=2),
    st.lists(st.integers(-20, 20), min_size=2, max_size=2),
    st.integers(0, 5),
    st.integers(0, 5),
    st.integers(0, 5),
)
def test_group_laws_random_vectors(u, v, x, a, b, c):
    G = BaseGroup(2, s3())
    g, h, k = G.element(u, a), G.element(v, b), G.element(x, c)
    assert G.mul(G.mul(g, h), k) == G.mul(g, G.mul(h, k))
    assert G.mul(g, G.inv(g)) == G.identity


def test_embedding_examples():
    C2 = FiniteGroup.cyclic(2)
    check_embedding(Embedding(C2, C2, (0, 1)))
    ZC2 = BaseGroup(1, C2)
    check_embedding(Embedding(C2, ZC2, (ZC2.identity, ZC2.element([0], 1))))
    with pytest.raises(EmbeddingError, match="infinite order"):
        check_embedding(Embedding(C2, ZC2, (ZC2.identity, ZC2.element([1], 0))))


def _brute_ok(dom, cod, images):
    # an injective homomorphism is exactly a bijection onto a subgroup preserving products
    pairs_ok = all(
        images[dom.mul(a, b)] == cod.mul(images[a], images[b]) for a in range(dom.order) for b in range(dom.order)
    )
    return pairs_ok and len(set(images)) == dom.order


@pytest.mark.parametrize(
    "dom,cod",
    [
        (FiniteGroup.cyclic(2), FiniteGroup.cyclic(4)),
        (FiniteGroup.cyclic(2), klein()),
        (klein(), FiniteGroup.cyclic(4)),
        (FiniteGroup.cyclic(3), s3()),
        (FiniteGroup.cyclic(2), s3()),
        (klein(), FiniteGroup.cyclic(8)),
    ],
)
def test_check_embedding_matches_brute_force(dom, cod):
    accepted = 0
    for images in itertools.product(range(cod.order), repeat=dom.order):
        try:
            check_embedding(Embedding(dom, cod, images))
            ok = True
        except EmbeddingError:
            ok = False
        assert ok == _brute_ok(dom, cod, images)
        accepted += ok
    # number of injective homomorphisms, counted by hand
    expected = {(2, 4): 1, (2, 4, "k"): 3, (4, 4): 0, (3, 6): 2, (2, 6): 3, (4, 8): 0}
    key = (dom.order, cod.order) if not (dom.order == 2 and cod == klein()) else (2, 4, "k")
    assert accepted == expected[key]


def test_embedding_violation_reports_pair():
    C4 = FiniteGroup.cyclic(4)
    with pytest.raises(EmbeddingError) as err:
        check_embedding(Embedding(C4, C4, (0, 1, 3, 2)))
    assert err.value.pair is not None


def test_transversal_is_key_least_and_consistent():
    C2 = FiniteGroup.cyclic(2)
    G = BaseGroup(1, C2)
    sub = FiniteSubgroup(G, C2, [G.identity, G.element([0], 1)])
    rng = random.Random(5)
    for _ in range(200):
        x = G.element([rng.randint(-9, 9)], rng.randint(0, 1))
        s, c = sub.decompose(x)
        assert G.mul(sub.images[s], c) == x
        coset = [G.mul(img, x) for img in sub.images]
        assert c == min(coset, key=G.key)
