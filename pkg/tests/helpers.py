"""Shared fixtures and brute-force helpers for the test suite."""

from __future__ import annotations

import itertools

from nfai.automata import InstanceBundle, Nfa, accepts
from nfai.hardness import UndirectedGraph, random_bundle
from nfai.relations import MultiTapeAutomaton, multitape_accepts


def all_words(n_letters: int, max_len: int):
    """Every word over the alphabet with length <= max_len, shortest first."""
    for length in range(max_len + 1):
        yield from itertools.product(range(n_letters), repeat=length)


def aa_bb_cc_star() -> Nfa:
    """Four-state NFA for (aa + bb + cc)* over letters a=0, b=1, c=2."""
    return Nfa(
        n_states=4,
        n_letters=3,
        transitions=(
            (0, 0, 1), (1, 0, 0),
            (0, 1, 2), (2, 1, 0),
            (0, 2, 3), (3, 2, 0),
        ),
        initial=0,
        finals=frozenset({0}),
    )


def example_clique_graph() -> UndirectedGraph:
    """Five-vertex graph whose unique 4-clique is {0, 1, 3, 4} (vertex 2
    hangs off the clique by two edges)."""
    return UndirectedGraph(
        5,
        frozenset({(0, 1), (0, 3), (0, 4), (1, 3), (1, 4), (3, 4), (1, 2), (2, 3)}),
    )


#: Word encoding the unique 4-clique of :func:`example_clique_graph`,
#: lexicographically least among its encodings.
EXAMPLE_CLIQUE_WORD = (0, 1, 3, 4)


def acceptance_corpus():
    """The seeded random-bundle corpus shared by the acceptance criteria:
    300 bundles over k in {2,3}, n <= 4, l <= 3, density in {.2, .5, 1}."""
    combos = [
        (k, n, l, d)
        for k in (2, 3)
        for n in (2, 3, 4)
        for l in (1, 2, 3)
        for d in (0.2, 0.5, 1.0)
    ]
    corpus = []
    for seed in range(6):
        for ci, (k, n, l, d) in enumerate(combos):
            if len(corpus) == 300:
                return corpus
            name = f"k{k}-n{n}-l{l}-d{d}-s{seed}"
            corpus.append((name, random_bundle(k, n, l, d, (ci, seed))))
    return corpus


def rs_satisfiable_brute_force(
    bundle: InstanceBundle, c: MultiTapeAutomaton, total_len: int
) -> bool:
    """Enumerate all word tuples with summed length <= total_len and test
    them directly against the components and the relation automaton."""
    k = bundle.k
    letters = range(bundle.n_letters)
    for total in range(total_len + 1):
        for split in itertools.product(range(total + 1), repeat=k - 1):
            lengths = list(split)
            used = sum(lengths)
            if used > total:
                continue
            lengths.append(total - used)
            word_choices = [
                list(itertools.product(letters, repeat=length)) for length in lengths
            ]
            for words in itertools.product(*word_choices):
                if not all(accepts(a, w) for a, w in zip(bundle.automata, words)):
                    continue
                if multitape_accepts(c, list(words)):
                    return True
    return False
