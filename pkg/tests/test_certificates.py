import itertools
import random

import pytest

from nfai.automata import InstanceBundle, Nfa, validate_run
from nfai.certificates import (
    ShortPathset,
    StaggeredCut,
    build_in_out,
    extract_short_pathset,
    extract_staggered_cut,
    parse_certificate,
    serialize_certificate,
    verify_short_pathset,
    verify_staggered_cut,
    verify_staggered_cut_naive,
)
from nfai.decision import decide_empty
from nfai.hardness import clique_bundle, random_bundle
from nfai.products import ProductSpace

from helpers import EXAMPLE_CLIQUE_WORD, example_clique_graph


def _self_loop_bundle():
    a = Nfa(1, 1, ((0, 0, 0),), 0, frozenset({0}))
    return InstanceBundle((a, a))


# --- short pathsets -----------------------------------------------------------

def test_pathset_for_empty_word():
    bundle = _self_loop_bundle()
    ps = extract_short_pathset(bundle, decide_empty(bundle))
    assert ps.word == ()
    assert ps.runs == ((), ())
    assert verify_short_pathset(bundle, ps).ok


def test_pathset_for_example_clique_bundle():
    bundle = clique_bundle(example_clique_graph(), 4)
    ps = extract_short_pathset(bundle, decide_empty(bundle))
    assert ps.word == EXAMPLE_CLIQUE_WORD
    for a, run in zip(bundle.automata, ps.runs):
        assert validate_run(a, run) == ps.word
        assert run[-1][2] in a.finals
    assert verify_short_pathset(bundle, ps).ok


def test_pathset_requires_witness():
    a = Nfa(1, 1, (), 0, frozenset())
    bundle = InstanceBundle((a, a))
    with pytest.raises(ValueError):
        extract_short_pathset(bundle, decide_empty(bundle))


@pytest.mark.parametrize("seed", range(10))
def test_extracted_pathsets_always_verify(seed):
    bundle = random_bundle(2 + seed % 2, 3, 2, 0.6, ("ps", seed))
    decision = decide_empty(bundle)
    if decision.empty:
        return
    ps = extract_short_pathset(bundle, decision)
    assert verify_short_pathset(bundle, ps).ok
    assert len(ps.word) <= bundle.max_states ** bundle.k


def _some_nonempty_pathset():
    for seed in itertools.count():
        bundle = random_bundle(2, 3, 2, 0.7, ("mut", seed))
        decision = decide_empty(bundle)
        if not decision.empty and len(extract_short_pathset(bundle, decision).word) >= 2:
            return bundle, extract_short_pathset(bundle, decision)


def test_pathset_rejections_name_conditions():
    bundle, ps = _some_nonempty_pathset()

    # a transition replaced by a non-transition
    run0 = list(ps.runs[0])
    src, label, _ = run0[0]
    reachable = bundle.automata[0].successors(src, label)
    bad_dst = next(
        (q for q in range(bundle.automata[0].n_states) if q not in reachable), None
    )
    if bad_dst is not None:
        run0[0] = (src, label, bad_dst)
        mutated = ShortPathset(ps.word, (tuple(run0),) + ps.runs[1:])
        verdict = verify_short_pathset(bundle, mutated)
        assert verdict.condition == "not-a-transition" and verdict.where == (0, 0)

    # runs labelled by different words
    run0 = list(ps.runs[0])
    src, label, dst = run0[0]
    flipped = (label + 1) % bundle.n_letters
    run0[0] = (src, flipped, dst)
    mutated = ShortPathset(ps.word, (tuple(run0),) + ps.runs[1:])
    verdict = verify_short_pathset(bundle, mutated)
    assert not verdict.ok
    assert verdict.condition in ("label-mismatch", "not-a-transition")

    # truncated run: word lengths differ
    mutated = ShortPathset(ps.word, (ps.runs[0][:-1],) + ps.runs[1:])
    verdict = verify_short_pathset(bundle, mutated)
    assert not verdict.ok
    assert verdict.condition == "label-mismatch"

    # wrong run count
    mutated = ShortPathset(ps.word, ps.runs + (ps.runs[0],))
    assert verify_short_pathset(bundle, mutated).condition == "shape"


def test_pathset_structure_conditions():
    a = Nfa(3, 2, ((0, 0, 1), (1, 1, 2)), 0, frozenset({2}))
    full = Nfa(1, 2, ((0, 0, 0), (0, 1, 0)), 0, frozenset({0}))
    bundle = InstanceBundle((a, full))
    word = (0, 1)
    good_a = ((0, 0, 1), (1, 1, 2))
    good_b = ((0, 0, 0), (0, 1, 0))
    assert verify_short_pathset(bundle, ShortPathset(word, (good_a, good_b))).ok

    wrong_start = (((1, 1, 2), (2, 0, 0))[:1], good_b)
    verdict = verify_short_pathset(bundle, ShortPathset((1,), wrong_start))
    assert verdict.condition == "wrong-start" and verdict.where == (0, 0)

    discont = ((good_a[0], (0, 1, 2)), good_b)
    verdict = verify_short_pathset(bundle, ShortPathset(word, discont))
    assert verdict.condition == "discontinuity" and verdict.where == (0, 1)

    not_accepting = ((good_a[0],), (good_b[0],))
    verdict = verify_short_pathset(bundle, ShortPathset((0,), not_accepting))
    assert verdict.condition == "not-accepting" and verdict.where == (0,)


def test_pathset_length_bound():
    bundle = _self_loop_bundle()  # n = 1, k = 2, so the bound is 1
    run = ((0, 0, 0), (0, 0, 0))
    verdict = verify_short_pathset(bundle, ShortPathset((0, 0), (run, run)))
    assert verdict.condition == "length-bound"


# --- staggered cuts -----------------------------------------------------------

def _disjoint_singletons():
    a = Nfa(2, 2, ((0, 0, 1),), 0, frozenset({1}))  # accepts only "a"
    b = Nfa(2, 2, ((0, 1, 1),), 0, frozenset({1}))  # accepts only "b"
    return InstanceBundle((a, b))


def test_cut_for_disjoint_singletons():
    bundle = _disjoint_singletons()
    cut = extract_staggered_cut(bundle)
    assert verify_staggered_cut(bundle, cut).ok
    assert verify_staggered_cut_naive(bundle, cut).ok


def test_cut_when_first_finals_empty():
    n, l = 2, 2
    complete = tuple((p, s, q) for p in range(n) for s in range(l) for q in range(n))
    a = Nfa(n, l, complete, 0, frozenset())
    b = Nfa(n, l, complete, 0, frozenset({0}))
    bundle = InstanceBundle((a, b))
    cut = extract_staggered_cut(bundle)
    # every base tuple is reachable under the complete relation
    assert cut.set_for(0, 0) == (1 << (n * n)) - 1
    assert verify_staggered_cut(bundle, cut).ok


def test_cut_extraction_rejects_nonempty():
    with pytest.raises(ValueError):
        extract_staggered_cut(_self_loop_bundle())


@pytest.mark.parametrize("seed", range(12))
def test_extracted_cuts_always_verify(seed):
    bundle = random_bundle(2 + seed % 2, 3, 2, 0.3, ("cut", seed))
    if not decide_empty(bundle).empty:
        return
    cut = extract_staggered_cut(bundle)
    assert verify_staggered_cut(bundle, cut).ok
    assert verify_staggered_cut_naive(bundle, cut).ok


def test_cut_condition_checks():
    bundle = _disjoint_singletons()
    cut = extract_staggered_cut(bundle)
    space = ProductSpace(cut.sizes, 1)
    initial = space.encode([a.initial for a in bundle.automata])

    missing_initial = StaggeredCut(
        cut.n_letters,
        cut.sizes,
        tuple(mask & ~(1 << initial) if i < cut.n_letters else mask for i, mask in enumerate(cut.sets)),
    )
    assert verify_staggered_cut(bundle, missing_initial).condition in ("initial-missing", "base-copy-mismatch")

    final_tuple = space.encode([next(iter(a.finals)) for a in bundle.automata])
    with_final = StaggeredCut(
        cut.n_letters,
        cut.sizes,
        tuple(mask | (1 << final_tuple) if i < cut.n_letters else mask for i, mask in enumerate(cut.sets)),
    )
    assert verify_staggered_cut(bundle, with_final).condition == "final-present"

    unequal = StaggeredCut(
        cut.n_letters,
        cut.sizes,
        (cut.sets[0] | 0b1000, cut.sets[1]) + cut.sets[2:],
    )
    verdict = verify_staggered_cut(bundle, unequal)
    assert verdict.condition in ("base-copy-mismatch", "final-present", "closure")

    wrong_shape = StaggeredCut(cut.n_letters, (3, 2), cut.sets)
    assert verify_staggered_cut(bundle, wrong_shape).condition == "shape"
    with pytest.raises(ValueError):
        build_in_out(bundle, wrong_shape)


def test_cleared_bit_mutations_rejected_with_named_condition():
    rng = random.Random("mutcut")
    checked = 0
    for seed in range(30):
        bundle = random_bundle(2, 2, 2, 0.3, ("mutcut", seed))
        if not decide_empty(bundle).empty:
            continue
        cut = extract_staggered_cut(bundle)
        set_bits = [
            (idx, bit)
            for idx, mask in enumerate(cut.sets)
            for bit in range(mask.bit_length())
            if (mask >> bit) & 1
        ]
        if not set_bits:
            continue
        for _ in range(3):
            idx, bit = rng.choice(set_bits)
            sets = list(cut.sets)
            sets[idx] &= ~(1 << bit)
            mutated = StaggeredCut(cut.n_letters, cut.sizes, tuple(sets))
            fast = verify_staggered_cut(bundle, mutated)
            slow = verify_staggered_cut_naive(bundle, mutated)
            assert not fast.ok and fast.condition is not None
            assert slow.ok == fast.ok and slow.condition == fast.condition
            checked += 1
    assert checked >= 20


def test_naive_verifier_empty_and_full_cuts():
    bundle = _disjoint_singletons()
    k, l = bundle.k, bundle.n_letters
    empty = StaggeredCut(l, (2, 2), (0,) * (k * l))
    for verifier in (verify_staggered_cut, verify_staggered_cut_naive):
        verdict = verifier(bundle, empty)
        assert verdict.condition == "initial-missing"
    full = StaggeredCut(l, (2, 2), (0xF,) * (k * l))
    for verifier in (verify_staggered_cut, verify_staggered_cut_naive):
        verdict = verifier(bundle, full)
        assert verdict.condition == "final-present"  # finals product is non-empty


@pytest.mark.parametrize("seed", range(10))
def test_verifiers_agree_on_random_cuts(seed):
    rng = random.Random(("agree", seed).__repr__())
    bundle = random_bundle(2, 2, 2, 0.4, ("agree", seed))
    space_bits = 4
    sets = tuple(rng.getrandbits(space_bits) for _ in range(bundle.k * bundle.n_letters))
    cut = StaggeredCut(bundle.n_letters, (2, 2), sets)
    fast = verify_staggered_cut(bundle, cut)
    slow = verify_staggered_cut_naive(bundle, cut)
    assert fast.ok == slow.ok
    assert fast.condition == slow.condition


# --- In/Out matrices ------------------------------------------------------------

def test_in_out_zero_and_full():
    bundle = _disjoint_singletons()
    k, l = bundle.k, bundle.n_letters
    n_tuples = 4
    empty = StaggeredCut(l, (2, 2), (0,) * (k * l))
    mats = build_in_out(bundle, empty)
    assert all(m.count_ones() == 0 for m in mats.in_mats + mats.out_mats)
    full = StaggeredCut(l, (2, 2), ((1 << n_tuples) - 1,) * (k * l))
    mats = build_in_out(bundle, full)
    assert all(m.count_ones() == m.rows * m.cols for m in mats.in_mats + mats.out_mats)


def test_in_out_cross_indexing():
    rng = random.Random("inout")
    a = Nfa(3, 2, ((0, 0, 1),), 0, frozenset({1}))
    b = Nfa(2, 2, ((0, 1, 1),), 0, frozenset({1}))
    bundle = InstanceBundle((a, b))
    space = ProductSpace((3, 2), 1)
    sets = tuple(rng.getrandbits(6) for _ in range(4))
    cut = StaggeredCut(2, (3, 2), sets)
    mats = build_in_out(bundle, cut)
    for letter in range(2):
        out0 = mats.out_mat(0, letter)  # rows: component-1 states, cols: component-0 states
        in1 = mats.in_mat(1, letter)
        for q0 in range(3):
            for q1 in range(2):
                member = (cut.set_for(0, letter) >> space.encode((q0, q1))) & 1
                assert out0.get(q1, q0) == member
                member1 = (cut.set_for(1, letter) >> space.encode((q0, q1))) & 1
                assert in1.get(q1, q0) == member1


# --- soundness (scaled; the exhaustive sweep lives in the acceptance suite) ------

def test_no_cut_accepted_for_a_nonempty_instance():
    a = Nfa(2, 1, ((0, 0, 1),), 0, frozenset({1}))
    bundle = InstanceBundle((a, a))
    for bits in itertools.product(range(16), repeat=2):
        cut = StaggeredCut(1, (2, 2), bits)
        assert not verify_staggered_cut(bundle, cut).ok


# --- serialization ---------------------------------------------------------------

def test_pathset_serialization_roundtrip():
    bundle = clique_bundle(example_clique_graph(), 4)
    ps = extract_short_pathset(bundle, decide_empty(bundle))
    text = serialize_certificate(ps)
    assert text.startswith("nfa-cert v1\npathset\n")
    assert parse_certificate(text) == ps


def test_cut_serialization_roundtrip_and_hex():
    bundle = _disjoint_singletons()
    cut = extract_staggered_cut(bundle)
    text = serialize_certificate(cut)
    assert text.startswith("nfa-cert v1\ncut\n")
    assert parse_certificate(text) == cut
    for line in text.splitlines():
        if line.startswith("set "):
            hex_part = line.split()[-1]
            assert hex_part == hex_part.lower()
            assert len(hex_part) == 2  # 4 tuple bits fit one byte


def test_certificate_parse_errors():
    from nfai.fileformat import FormatError

    with pytest.raises(FormatError):
        parse_certificate("not a certificate\n")
    with pytest.raises(FormatError):
        parse_certificate("nfa-cert v1\npathset\nword 0\n")  # missing k and runs
