import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nfai.automata import EPSILON, InstanceBundle, Nfa, accepts, adjacency_matrix, epsilon_accepts
from nfai.boolmatrix import BoolMatrix
from nfai.hardness import random_bundle, random_nfa
from nfai.oracle import BundleAcceptor, DetAcceptor, StutterAcceptor, difference_witness
from nfai.products import (
    CONSTRUCTIONS,
    BudgetExceeded,
    ProductSpace,
    accessible_part,
    accessible_stats,
    builder_for,
    catchup_product,
    direct_product,
    echoing_product,
    leapfrog_product,
    m_leq_k,
    materialize,
    nodding_product,
    reach_map,
    reach_relation,
    stats_csv_row,
)


def small_bundles(count, k=2, n=3, l=2):
    for seed in range(count):
        for density in (0.25, 0.6, 1.0):
            yield random_bundle(k, n, l, density, ("prod", k, seed, density))


# --- state encoding -----------------------------------------------------------

@given(st.lists(st.integers(1, 5), min_size=2, max_size=4), st.integers(1, 7), st.integers(0, 10**6))
def test_space_encode_decode_roundtrip(sizes, n_tags, pick):
    space = ProductSpace(sizes, n_tags)
    sid = pick % space.total
    components, tag = space.decode(sid)
    assert space.encode(components, tag) == sid
    assert all(0 <= q < n for q, n in zip(components, sizes))
    assert 0 <= tag < n_tags
    for i in range(len(sizes)):
        assert space.component(sid, i) == components[i]


def test_base_copy_occupies_contiguous_prefix():
    space = ProductSpace((3, 4), 5)
    for sid in range(space.total):
        _, tag = space.decode(sid)
        assert (tag == 0) == (sid < space.base_size)


# --- reachability relations ----------------------------------------------------

def test_reach_relation_empty_word_is_identity():
    a = random_nfa(4, 2, 0.5, "reach")
    assert reach_relation(a, ()).matrix == BoolMatrix.identity(4)


def test_reach_relation_single_letter_is_adjacency():
    a = random_nfa(4, 2, 0.5, "reach1")
    assert reach_relation(a, (1,)).matrix == adjacency_matrix(a, 1)


def test_reach_relation_chain():
    chain = Nfa(3, 2, ((0, 0, 1), (1, 1, 2)), 0, frozenset({2}))
    mat = reach_relation(chain, (0, 1)).matrix
    assert set(mat.pairs()) == {(0, 2)}


@given(st.integers(0, 50), st.integers(1, 3), st.integers(0, 3))
def test_reach_relation_composes(seed, split, extra):
    a = random_nfa(4, 2, 0.5, ("compose", seed))
    u = tuple((seed + i) % 2 for i in range(split))
    v = tuple((seed + i) % 2 for i in range(extra))
    combined = reach_relation(a, u + v).matrix
    assert combined == reach_relation(a, u).matrix.mul(reach_relation(a, v).matrix)


def test_reach_map_consistent_with_reach_relation():
    a = random_nfa(3, 2, 0.7, "reachmap")
    table = reach_map(a, 3)
    for word, matrix in table.items():
        assert matrix == reach_relation(a, word).matrix


def test_m_leq_k_bounded_by_n_squared():
    for bundle in small_bundles(3):
        assert m_leq_k(bundle) <= bundle.max_states ** 2


# --- direct product -----------------------------------------------------------

def test_direct_product_of_self_loops():
    a = Nfa(1, 1, ((0, 0, 0),), 0, frozenset({0}))
    product = direct_product(InstanceBundle((a, a)))
    assert product.n_states == 1
    assert product.transitions == ((0, 0, 0),)
    assert accepts(product, (0, 0, 0))


def test_direct_product_empty_finals():
    a = Nfa(2, 1, ((0, 0, 1),), 0, frozenset({1}))
    b = Nfa(2, 1, ((0, 0, 1),), 0, frozenset())
    assert direct_product(InstanceBundle((a, b))).finals == frozenset()


# --- nodding product ------------------------------------------------------------

def test_nodding_copy_count():
    for k, l in ((2, 3), (3, 2), (3, 3)):
        bundle = random_bundle(k, 2, l, 0.5, ("copies", k, l))
        builder = builder_for("nodding", bundle)
        assert builder.space.n_tags == (k - 1) * l + 1


def test_nodding_size_bounds():
    for bundle in small_bundles(3, k=3):
        k, l, n, m = bundle.k, bundle.n_letters, bundle.max_states, bundle.max_transitions
        product = nodding_product(bundle)
        assert product.n_states <= (k * l - l + 1) * n ** k
        assert product.m <= k * m * n ** (k - 1)


def test_nodding_three_petals_for_three_letters():
    bundle = random_bundle(2, 2, 3, 0.8, "petals")
    builder = builder_for("nodding", bundle)
    assert builder.space.n_tags == 4  # base plus one copy per letter
    product = nodding_product(bundle)
    base = builder.space.base_size
    for (src, label, dst) in product.transitions:
        src_tag, dst_tag = src // base, dst // base
        if label == EPSILON:
            assert src_tag != 0 and dst_tag == 0
        else:
            assert src_tag == 0 and dst_tag == 1 + label * (bundle.k - 1)


def test_nodding_volley_structure():
    bundle = random_bundle(3, 2, 2, 0.7, "volley")
    builder = builder_for("nodding", bundle)
    space = builder.space
    product = nodding_product(bundle)
    for (src, label, dst) in product.transitions:
        src_comps, src_tag = space.decode(src)
        dst_comps, dst_tag = space.decode(dst)
        if label != EPSILON:
            # a letter is consumed from the base copy; only component 0 moves
            assert builder.tag_value(src_tag) == "base"
            letter, volley = builder.tag_value(dst_tag)
            assert (letter, volley) == (label, 1)
            assert src_comps[1:] == dst_comps[1:]
            assert (src_comps[0], label, dst_comps[0]) in bundle.automata[0].transitions
        else:
            letter, volley = builder.tag_value(src_tag)
            assert 1 <= volley <= bundle.k - 1
            moved = volley
            for j in range(bundle.k):
                if j != moved:
                    assert src_comps[j] == dst_comps[j]
            assert (src_comps[moved], letter, dst_comps[moved]) in bundle.automata[moved].transitions
            if volley == bundle.k - 1:
                assert builder.tag_value(dst_tag) == "base"
            else:
                assert builder.tag_value(dst_tag) == (letter, volley + 1)


def test_nodding_language_small():
    for bundle in small_bundles(3):
        product = nodding_product(bundle)
        assert difference_witness(DetAcceptor(product), BundleAcceptor(bundle), bundle.n_letters, 8) is None


def test_nodding_accepts_via_epsilon_subset_simulation():
    bundle = random_bundle(2, 3, 2, 0.6, "nodacc")
    product = nodding_product(bundle)
    for word in itertools.product(range(2), repeat=4):
        assert epsilon_accepts(product, word) == all(accepts(a, word) for a in bundle.automata)


# --- echoing product ------------------------------------------------------------

def test_echoing_accepts_exactly_stutterings():
    for bundle in small_bundles(2):
        product = echoing_product(bundle)
        assert difference_witness(DetAcceptor(product), StutterAcceptor(bundle), bundle.n_letters, 8) is None


def test_echoing_rejects_off_block_words():
    bundle = random_bundle(2, 3, 2, 1.0, "echo")
    product = echoing_product(bundle)
    assert not accepts(product, (0,))  # length not divisible by k
    assert not accepts(product, (0, 1))  # non-constant block
    word = (1, 0, 1)
    assert not accepts(product, word)


# --- catch-up product -----------------------------------------------------------

def test_catchup_size_bounds():
    for k in (2, 3):
        for bundle in small_bundles(2, k=k):
            product = catchup_product(bundle)
            kk, l, n = bundle.k, bundle.n_letters, bundle.max_states
            assert product.n_states <= 2 * kk * l ** kk * n ** kk
            assert product.m <= 2 * kk * l ** kk * m_leq_k(bundle) * n ** (kk - 1)


def test_catchup_two_step_transition_family():
    # component 0 has the path 0 -a-> 1 -b-> 2 and no other a-then-b path
    a0 = Nfa(3, 2, ((0, 0, 1), (1, 1, 2)), 0, frozenset({2}))
    a1 = Nfa(2, 2, ((0, 0, 0), (0, 1, 1)), 0, frozenset({1}))
    bundle = InstanceBundle((a0, a1))
    builder = builder_for("catchup", bundle)
    space = builder.space
    product = catchup_product(bundle)
    petal_ab = builder.tag_index[("petal", (0, 1), 1)]
    expected = set()
    for q in range(a1.n_states):
        src = space.encode((0, q), 0)
        dst = space.encode((2, q), petal_ab)
        expected.add((src, 0, dst))
    petal_transitions = {
        t for t in product.transitions if t[2] // space.base_size == petal_ab
    }
    assert petal_transitions == expected


def test_catchup_language_including_odd_lengths():
    for k in (2, 3):
        for bundle in small_bundles(2, k=k):
            product = catchup_product(bundle)
            assert difference_witness(DetAcceptor(product), BundleAcceptor(bundle), bundle.n_letters, 8) is None


# --- leapfrog product -----------------------------------------------------------

def test_leapfrog_state_bound():
    for k in (2, 3):
        for bundle in small_bundles(2, k=k):
            product = leapfrog_product(bundle)
            kk, l, n = bundle.k, bundle.n_letters, bundle.max_states
            assert product.n_states <= 2 * kk * l ** (kk - 1) * n ** kk


def test_leapfrog_two_step_transition_family():
    a0 = Nfa(3, 2, ((0, 0, 1), (1, 1, 2)), 0, frozenset({2}))
    a1 = Nfa(2, 2, ((0, 0, 0), (0, 1, 1)), 0, frozenset({1}))
    bundle = InstanceBundle((a0, a1))
    builder = builder_for("leapfrog", bundle)
    space = builder.space
    product = leapfrog_product(bundle)
    src_tag = builder.tag_index[("main", 0, (0,))]
    dst_tag = builder.tag_index[("main", 1, (1,))]
    expected = set()
    for q in range(a1.n_states):
        src = space.encode((0, q), src_tag)
        dst = space.encode((2, q), dst_tag)
        expected.add((src, 1, dst))
    observed = {
        t
        for t in product.transitions
        if t[0] // space.base_size == src_tag and t[2] // space.base_size == dst_tag
    }
    assert observed == expected


def test_leapfrog_language():
    for k in (2, 3):
        for bundle in small_bundles(2, k=k):
            product = leapfrog_product(bundle)
            assert difference_witness(DetAcceptor(product), BundleAcceptor(bundle), bundle.n_letters, 8) is None


# --- materialization consistency -------------------------------------------------

def test_materialized_counts_match_builder_totals():
    bundle = random_bundle(2, 3, 2, 0.6, "totals")
    for construction in CONSTRUCTIONS:
        builder = builder_for(construction, bundle)
        product = materialize(construction, bundle)
        assert product.n_states == builder.total_states()
        assert product.m == builder.total_transitions()


def test_materialize_budget():
    bundle = random_bundle(3, 4, 3, 1.0, "budget")
    with pytest.raises(BudgetExceeded):
        materialize("catchup", bundle, budget=100)


# --- accessible part --------------------------------------------------------------

def test_accessible_part_stuck_initial():
    # component 0's initial state has no outgoing transitions
    a0 = Nfa(2, 1, ((1, 0, 1),), 0, frozenset({1}))
    a1 = Nfa(2, 1, ((0, 0, 1),), 0, frozenset({1}))
    sub, stats = accessible_part("nodding", InstanceBundle((a0, a1)))
    assert stats.states_accessible == 1
    assert stats.transitions_accessible == 0


def test_accessible_states_at_most_transitions_plus_one():
    for construction in CONSTRUCTIONS:
        for bundle in small_bundles(2):
            _, stats = accessible_part(construction, bundle)
            assert stats.states_accessible <= stats.transitions_accessible + 1
            assert stats.states_accessible <= stats.states_total
            assert stats.transitions_accessible <= stats.transitions_total


def test_accessible_nodding_language_equals_materialized():
    for bundle in small_bundles(2):
        sub, _ = accessible_part("nodding", bundle)
        full = nodding_product(bundle)
        assert difference_witness(DetAcceptor(sub), DetAcceptor(full), bundle.n_letters, 8) is None


def test_accessible_stats_answer_flag():
    bundle = random_bundle(2, 2, 1, 1.0, "flag")
    stats, nonempty = accessible_stats("nodding", bundle)
    a, b = bundle.automata
    expected = any(
        all(accepts(x, w) for x in (a, b))
        for w in [tuple(word) for length in range(5) for word in itertools.product(range(1), repeat=length)]
    )
    assert nonempty == expected


def test_stats_csv_row_shape():
    bundle = random_bundle(2, 2, 2, 0.5, "csv")
    _, stats = accessible_part("nodding", bundle)
    row = stats_csv_row(stats)
    fields = row.split(",")
    assert fields[0] == "nodding"
    assert len(fields) == 8


def test_unknown_construction_rejected():
    bundle = random_bundle(2, 2, 2, 0.5, "unknown")
    with pytest.raises(ValueError):
        builder_for("zigzag", bundle)


def test_mixed_alphabets_rejected():
    a = Nfa(1, 1, (), 0, frozenset({0}))
    b = Nfa(1, 2, (), 0, frozenset({0}))
    with pytest.raises(ValueError):
        InstanceBundle((a, b))
