import random

import pytest

from fgr import (
    CoreGraph,
    InfiniteIndexError,
    NotAMemberError,
    Permutation,
    Word,
    basis,
    canonicalize,
    contains,
    coset_permutation,
    evaluate_basis_word,
    fold,
    from_generators,
    graph_from_json,
    graph_to_json,
    identity,
    parse_word,
    pullback,
    render_word,
    rewrite_in_basis,
    schreier_graph,
    spanning_tree,
    subgroup_index,
    subgroup_rank,
    trivial_graph,
)
from fgr.constructions import gamma_graph, hm_graph, wk_word


def words(rank, *texts):
    return [parse_word(t, rank) for t in texts]


def random_reduced_word(rng, rank, max_len):
    length = rng.randint(1, max_len)
    letters = []
    for _ in range(length):
        options = [
            l for l in range(-rank, rank + 1)
            if l != 0 and (not letters or l != -letters[-1])
        ]
        letters.append(rng.choice(options))
    return Word(rank, tuple(letters))


H3_GENS = ("a", "baBB", "bbaB", "bbb")
L3_GENS = ("a", "baBB", "bbaB")


# --- from_generators -------------------------------------------------------

def test_whole_group_graph():
    g = from_generators(2, words(2, "a", "b"))
    assert g.vertex_count == 1
    assert len(g.edges) == 2
    assert subgroup_rank(g) == 2
    assert subgroup_index(g) == 1


def test_h3_graph_shape():
    g = from_generators(2, words(2, *H3_GENS))
    assert g.vertex_count == 3
    assert len(g.edges) == 6
    assert subgroup_index(g) == 3
    assert canonicalize(g) == canonicalize(gamma_graph(3))


def test_l3_graph_shape():
    # hand-fold: the m=3 cover with the nontree b-edge removed
    g = from_generators(2, words(2, *L3_GENS))
    assert g.vertex_count == 3
    assert len(g.edges) == 5
    assert g.edges == ((0, 0, 1), (0, 1, 2), (1, 2, 1), (1, 2, 2), (2, 1, 1))
    assert subgroup_index(g) is None
    assert subgroup_rank(g) == 3


def test_trivial_generators_give_trivial_graph():
    assert from_generators(2, []) == trivial_graph(2)
    assert from_generators(2, [identity(2)]) == trivial_graph(2)


def test_generator_rank_mismatch():
    with pytest.raises(ValueError):
        from_generators(2, [parse_word("c", 3)])


def test_generators_are_members():
    rng = random.Random(7)
    for _ in range(25):
        rank = rng.choice((2, 3))
        gens = [random_reduced_word(rng, rank, 12) for _ in range(rng.randint(1, 4))]
        g = from_generators(rank, gens)
        for w in gens:
            assert contains(g, w)
        for _ in range(20):
            product = identity(rank)
            for _ in range(rng.randint(1, 5)):
                factor = rng.choice(gens)
                product = product * (factor if rng.random() < 0.5 else factor.inverse())
            assert contains(g, product)
        assert subgroup_rank(g) <= len(gens)


# --- fold ------------------------------------------------------------------

def test_fold_is_idempotent_on_folded_graphs():
    g = from_generators(2, words(2, *H3_GENS))
    assert fold(g.rank, g.vertex_count, g.edges) == canonicalize(g)


def test_fold_merges_double_loop():
    # wedge of "aa" and "a": the subgroup is generated by a alone
    folded = fold(1, 2, [(0, 1, 1), (1, 0, 1), (0, 0, 1)])
    assert folded == CoreGraph(1, 1, ((0, 0, 1),))


def test_fold_one_step():
    # two a-edges leaving the base with distinct termini get merged
    folded = fold(2, 3, [(0, 1, 1), (0, 2, 1), (1, 2, 2)])
    assert folded.vertex_count == 2
    assert folded == fold(2, 3, [(0, 2, 1), (0, 1, 1), (1, 2, 2)])


def test_fold_confluence_under_shuffling():
    rng = random.Random(11)
    gens = words(2, "abab", "bbaB", "aabb", "abA")
    reference = from_generators(2, gens)
    edges = []
    next_vertex = 1
    for g in gens:
        current = 0
        for i, letter in enumerate(g.letters):
            target = 0 if i == len(g.letters) - 1 else next_vertex
            if target:
                next_vertex += 1
            edges.append(
                (current, target, letter) if letter > 0 else (target, current, -letter)
            )
            current = target
    for _ in range(10):
        shuffled = edges[:]
        rng.shuffle(shuffled)
        assert fold(2, next_vertex, shuffled) == reference


# --- membership ------------------------------------------------------------

def test_membership_examples():
    g = from_generators(2, words(2, *H3_GENS))
    assert contains(g, parse_word("bbb", 2))
    assert not contains(g, parse_word("a[a,b]", 2))
    assert contains(g, parse_word("(a[a,b])^2", 2))


def test_membership_rank_mismatch():
    g = from_generators(2, words(2, "a"))
    with pytest.raises(ValueError):
        contains(g, parse_word("a", 3))


# --- rank and index --------------------------------------------------------

def test_rank_examples():
    assert subgroup_rank(from_generators(2, words(2, "a", "b"))) == 2
    for m in (2, 3, 5, 8):
        assert subgroup_rank(hm_graph(m)[0]) == m + 1
    assert subgroup_rank(from_generators(2, words(2, *L3_GENS))) == 3


def test_index_examples():
    for m in (2, 3, 7):
        assert subgroup_index(hm_graph(m)[0]) == m
    assert subgroup_index(from_generators(2, words(2, *L3_GENS))) is None
    assert subgroup_index(from_generators(2, words(2, "a", "b"))) == 1


# --- spanning trees and bases ----------------------------------------------

def test_spanning_tree_of_rose():
    g = from_generators(2, words(2, "a", "b"))
    tree = spanning_tree(g)
    assert tree.tree_edges == frozenset()
    assert tree.nontree_edges == ((0, 0, 1), (0, 0, 2))


def test_spanning_tree_override_preferred_tree():
    g = gamma_graph(3)
    tree = spanning_tree(g, override=[(0, 1, 2), (1, 2, 2)])
    assert tree.tree_edges == frozenset({(0, 1, 2), (1, 2, 2)})
    assert tree.nontree_edges == ((0, 0, 1), (1, 2, 1), (2, 1, 1), (2, 0, 2))


def test_default_tree_on_gamma3_consists_of_b_edges():
    tree = spanning_tree(gamma_graph(3))
    assert tree.tree_edges == frozenset({(0, 1, 2), (2, 0, 2)})


def test_spanning_tree_override_validation():
    g = gamma_graph(3)
    with pytest.raises(ValueError):
        spanning_tree(g, override=[(0, 1, 2)])
    with pytest.raises(ValueError):
        spanning_tree(g, override=[(0, 1, 2), (0, 0, 1)])
    with pytest.raises(ValueError):
        spanning_tree(g, override=[(0, 1, 2), (9, 9, 2)])


def test_basis_of_h3_under_preferred_tree():
    graph, tree = hm_graph(3)
    assert [render_word(w) for w in basis(graph, tree)] == ["a", "baBB", "bbaB", "bbb"]


def test_basis_of_whole_group():
    g = from_generators(2, words(2, "a", "b"))
    assert [render_word(w) for w in basis(g)] == ["a", "b"]


def test_basis_of_h9_matches_t_pattern():
    graph, tree = hm_graph(9)
    expected = ["a"] + ["b" * i + "a" + "B" * (9 - i) for i in range(1, 9)] + ["b" * 9]
    assert [render_word(w) for w in basis(graph, tree)] == expected


def test_basis_generates_the_same_subgroup():
    rng = random.Random(13)
    for _ in range(20):
        gens = [random_reduced_word(rng, 2, 10) for _ in range(rng.randint(1, 3))]
        g = from_generators(2, gens)
        regenerated = from_generators(2, basis(g))
        assert regenerated == canonicalize(g)
        assert len(basis(g)) == subgroup_rank(g)


# --- rewriting --------------------------------------------------------------

def test_rewrite_w1_squared_in_h3():
    graph, tree = hm_graph(3)
    symbols = rewrite_in_basis(graph, tree, wk_word(1) ** 2)
    assert symbols.letters == (1, 1, -3, 2, 3, -2)


def test_rewrite_identity_is_empty():
    graph, tree = hm_graph(4)
    assert rewrite_in_basis(graph, tree, identity(2)).letters == ()


def test_rewrite_rejects_non_members():
    graph, tree = hm_graph(3)
    with pytest.raises(NotAMemberError):
        rewrite_in_basis(graph, tree, parse_word("b", 2))


def test_rewrite_round_trip():
    rng = random.Random(17)
    for _ in range(25):
        gens = [random_reduced_word(rng, 2, 12) for _ in range(rng.randint(1, 3))]
        graph = from_generators(2, gens)
        tree = spanning_tree(graph)
        base_words = basis(graph, tree)
        # random member: a product of basis words
        member = identity(2)
        for _ in range(rng.randint(0, 5)):
            factor = rng.choice(base_words)
            member = member * (factor if rng.random() < 0.5 else factor.inverse())
        symbols = rewrite_in_basis(graph, tree, member)
        assert evaluate_basis_word(base_words, symbols, 2) == member


# --- pullback ----------------------------------------------------------------

def test_pullback_diagonal():
    for texts in (H3_GENS, L3_GENS, ("ab", "ba")):
        g = from_generators(2, words(2, *texts))
        assert pullback(g, g) == canonicalize(g)


def test_pullback_example_intersection():
    K = from_generators(2, words(2, *L3_GENS))
    R = from_generators(2, [wk_word(1)])
    inter = pullback(K, R)
    assert subgroup_rank(inter) == 1
    generator = basis(inter)[0]
    square = wk_word(1) ** 2
    assert generator in (square, square.inverse())


def test_pullback_commutative_and_correct():
    rng = random.Random(19)
    for _ in range(25):
        shared = random_reduced_word(rng, 2, 8)
        a = from_generators(2, [shared, random_reduced_word(rng, 2, 8)])
        b = from_generators(2, [shared, random_reduced_word(rng, 2, 8)])
        inter = pullback(a, b)
        assert inter == pullback(b, a)
        assert contains(inter, shared)
        for _ in range(20):
            w = random_reduced_word(rng, 2, 12)
            assert contains(inter, w) == (contains(a, w) and contains(b, w))


def test_pullback_trivial_intersection():
    a = from_generators(2, words(2, "a"))
    b = from_generators(2, words(2, "b"))
    assert pullback(a, b) == trivial_graph(2)


def test_pullback_rank_mismatch():
    with pytest.raises(ValueError):
        pullback(from_generators(2, words(2, "a")), from_generators(3, words(3, "a")))


# --- Schreier graphs and coset actions ---------------------------------------

def test_schreier_graph_of_dihedral_cosets():
    # cosets of the reflection subgroup in D_3, enumerated by hand:
    # point j is the coset of s^j; t sends j to -j mod 3, s sends j to j+1
    t_action = Permutation((0, 2, 1))
    s_action = Permutation((1, 2, 0))
    g = schreier_graph(2, [t_action, s_action], 0)
    assert canonicalize(g) == canonicalize(gamma_graph(3))


def test_schreier_graph_identity_action():
    g = schreier_graph(2, [Permutation.identity(1), Permutation.identity(1)], 0)
    assert g == from_generators(2, words(2, "a", "b"))


def test_schreier_graph_regular_klein_four():
    # regular action of Z/2 x Z/2 on itself; any regular action gives a
    # normal subgroup, here of index 4 and rank 4*(2-1)+1 = 5
    perms = [
        Permutation((1, 0, 3, 2)),
        Permutation((2, 3, 0, 1)),
    ]
    g = schreier_graph(2, perms, 0)
    assert subgroup_index(g) == 4
    assert subgroup_rank(g) == 5


def test_schreier_graph_rejects_intransitive_action():
    with pytest.raises(ValueError):
        schreier_graph(2, [Permutation.identity(2), Permutation.identity(2)], 0)


def test_coset_permutation_examples():
    graph, _ = hm_graph(3)
    assert coset_permutation(graph, parse_word("b", 2)).images == (1, 2, 0)
    assert coset_permutation(graph, wk_word(1)).images == (1, 0, 2)
    assert coset_permutation(graph, identity(2)) == Permutation.identity(3)


def test_coset_permutation_needs_finite_index():
    g = from_generators(2, words(2, *L3_GENS))
    with pytest.raises(InfiniteIndexError):
        coset_permutation(g, parse_word("a", 2))


def test_coset_permutation_is_a_homomorphism():
    rng = random.Random(23)
    graph, _ = hm_graph(5)
    for _ in range(50):
        u = random_reduced_word(rng, 2, 10)
        v = random_reduced_word(rng, 2, 10)
        assert coset_permutation(graph, u * v) == coset_permutation(graph, u).then(
            coset_permutation(graph, v)
        )
        assert contains(graph, u) == (coset_permutation(graph, u)(0) == 0)


def test_permutation_cycles():
    perm = Permutation((1, 0, 2, 4, 3))
    assert perm.cycles() == ((0, 1), (2,), (3, 4))
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))


# --- canonical forms ----------------------------------------------------------

def test_canonicalize_idempotent():
    g = from_generators(2, words(2, *H3_GENS))
    assert canonicalize(canonicalize(g)) == canonicalize(g)


def test_canonicalize_ignores_relabeling():
    rng = random.Random(29)
    g = canonicalize(from_generators(2, words(2, "abab", "bbaB", "abba")))
    for _ in range(10):
        relabel = list(range(1, g.vertex_count))
        rng.shuffle(relabel)
        mapping = {0: 0, **{old: new for new, old in enumerate(relabel, start=1)}}
        shuffled = CoreGraph(
            g.rank,
            g.vertex_count,
            tuple((mapping[u], mapping[v], l) for (u, v, l) in g.edges),
        )
        assert canonicalize(shuffled) == g


# --- JSON ---------------------------------------------------------------------

def test_graph_json_round_trip():
    g = from_generators(2, words(2, *H3_GENS))
    data = graph_to_json(g)
    assert data["base"] == 0
    assert data["vertices"] == 3
    assert graph_from_json(data) == canonicalize(g)


def test_graph_json_rejects_malformed():
    with pytest.raises(ValueError):
        graph_from_json({"rank": 2})
    with pytest.raises(ValueError):
        graph_from_json({"rank": 2, "vertices": 1, "base": 1, "edges": []})


def test_core_graph_validates_invariants():
    with pytest.raises(ValueError):  # not folded
        CoreGraph(2, 2, ((0, 0, 1), (0, 1, 1)))
    with pytest.raises(ValueError):  # not connected
        CoreGraph(2, 2, ((0, 0, 1),))
    with pytest.raises(ValueError):  # dangling non-base vertex
        CoreGraph(2, 2, ((0, 1, 1),))
    with pytest.raises(ValueError):  # label out of range
        CoreGraph(2, 1, ((0, 0, 3),))
