"""Certificates for intersection emptiness and their verifiers.

Non-emptiness is certified by a *short pathset*: one accepting run per
component automaton, all spelling the same word, with the word no longer
than n^k.  Emptiness is certified by a *staggered cut*: per (component,
letter) subsets of the state-tuple space that contain the initial tuple,
avoid all final tuples, and are closed under single-component moves.

The cut verifier never walks the product's transition relation.  It reshapes
each subset into In/Out bit matrices exposing one tuple component and checks
the closure condition as a boolean matrix-product inequality against the
component adjacency matrices, which is what makes verification cheaper than
re-deciding the instance.  A naive verifier that does scan product
transitions is kept as a test oracle.

Verdicts are structured (condition id plus coordinates), never bare
booleans, so tests can assert exactly which condition a mutation violates.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Union

from .automata import EPSILON, InstanceBundle, adjacency_matrix
from .boolmatrix import BoolMatrix
from .decision import Decision
from .products import ProductSpace, builder_for

CERT_MAGIC = "nfa-cert v1"


@dataclass(frozen=True)
class Verdict:
    ok: bool
    condition: Optional[str] = None
    where: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def _reject(condition: str, *where) -> Verdict:
    return Verdict(False, condition, tuple(where))


ACCEPT = Verdict(True)


@dataclass(frozen=True)
class ShortPathset:
    """k accepting runs, one per component, all labelled by ``word``."""

    word: tuple
    runs: tuple

    @property
    def k(self) -> int:
        return len(self.runs)


@dataclass(frozen=True)
class StaggeredCut:
    """Per (component index, letter) subsets of the state-tuple space.

    ``sets[i * n_letters + letter]`` is a bitmask over mixed-radix encoded
    tuples (component 0 least significant).  Index 0 subsets, one per letter,
    must all coincide; they play the role of the base copy.
    """

    n_letters: int
    sizes: tuple
    sets: tuple

    @property
    def k(self) -> int:
        return len(self.sizes)

    def set_for(self, i: int, letter: int) -> int:
        return self.sets[i * self.n_letters + letter]


@dataclass(frozen=True)
class InOutMatrices:
    """Reshapings of a cut: for each (component p, letter), the In matrix
    exposes tuple component p-1 (mod k) and the Out matrix component p, each
    as columns against the remaining components as rows."""

    in_mats: tuple
    out_mats: tuple
    n_letters: int

    def in_mat(self, p: int, letter: int) -> BoolMatrix:
        return self.in_mats[p * self.n_letters + letter]

    def out_mat(self, p: int, letter: int) -> BoolMatrix:
        return self.out_mats[p * self.n_letters + letter]


def extract_short_pathset(bundle: InstanceBundle, decision: Decision) -> ShortPathset:
    """Split a nodding-product witness run into one run per component.

    Each petal of the witness contributes exactly one move per component, all
    on the petal's letter, so regrouping the moves by component yields k runs
    on the common witness word.  Breadth-first search keeps the word shortest
    possible, hence within the n^k pathset bound.
    """
    if decision.witness_run is None:
        raise ValueError("cannot extract a pathset from an empty instance")
    builder = builder_for("nodding", bundle)
    space = builder.space
    k = bundle.k
    word: List[int] = []
    runs: List[List[tuple]] = [[] for _ in range(k)]
    for (src, label, dst) in decision.witness_run:
        src_comps, src_tag = space.decode(src)
        dst_comps, dst_tag = space.decode(dst)
        if label != EPSILON:
            if src_tag != 0:
                raise ValueError("witness run is not a nodding-product run")
            letter, volley = builder.tag_value(dst_tag)
            if volley != 1 or letter != label:
                raise ValueError("witness run is not a nodding-product run")
            word.append(letter)
            comp = 0
        else:
            letter, volley = builder.tag_value(src_tag)
            comp = volley
        runs[comp].append((src_comps[comp], letter, dst_comps[comp]))
    return ShortPathset(tuple(word), tuple(tuple(r) for r in runs))


def verify_short_pathset(bundle: InstanceBundle, ps: ShortPathset) -> Verdict:
    """Check every pathset condition; transition membership is looked up in
    per-letter adjacency matrices.

    Checked in order: run count, word-length bound, per-run structure
    (wrong-start / discontinuity / not-a-transition at (run, step)), label
    agreement with the common word, acceptance of every run.
    """
    k = bundle.k
    if len(ps.runs) != k:
        return _reject("shape", len(ps.runs))
    n = bundle.max_states
    if len(ps.word) > n ** k:
        return _reject("length-bound", len(ps.word))
    matrices = [
        [adjacency_matrix(a, letter) for letter in range(bundle.n_letters)]
        for a in bundle.automata
    ]
    for i, (a, run) in enumerate(zip(bundle.automata, ps.runs)):
        previous_dst = a.initial
        for j, (src, label, dst) in enumerate(run):
            if j == 0 and src != a.initial:
                return _reject("wrong-start", i, 0)
            if j > 0 and src != previous_dst:
                return _reject("discontinuity", i, j)
            if not (0 <= label < bundle.n_letters and 0 <= src < a.n_states and 0 <= dst < a.n_states):
                return _reject("not-a-transition", i, j)
            if not matrices[i][label].get(src, dst):
                return _reject("not-a-transition", i, j)
            previous_dst = dst
        spelled = tuple(label for (_, label, _) in run)
        if spelled != ps.word:
            length = min(len(spelled), len(ps.word))
            position = next(
                (j for j in range(length) if spelled[j] != ps.word[j]), length
            )
            return _reject("label-mismatch", i, position)
        if previous_dst not in a.finals:
            return _reject("not-accepting", i)
    return ACCEPT


def _tuple_space(bundle: InstanceBundle) -> ProductSpace:
    return ProductSpace(tuple(a.n_states for a in bundle.automata), 1)


def extract_staggered_cut(bundle: InstanceBundle) -> StaggeredCut:
    """Collect the reachable copies of the nodding product into a cut.

    The base-copy reachable tuples become every index-0 subset; the tuples
    reachable in the (letter, volley i) copy become subset (i, letter).
    Raises if the instance turns out to be non-empty (no cut exists then).
    """
    builder = builder_for("nodding", bundle)
    space = builder.space
    base_size = space.base_size
    k, l = bundle.k, bundle.n_letters
    masks = [0] * space.n_tags
    seen = {builder.initial}
    queue = deque([builder.initial])
    while queue:
        sid = queue.popleft()
        if builder.is_final(sid):
            raise ValueError("intersection is non-empty; no staggered cut exists")
        tag, rest = divmod(sid, base_size)
        masks[tag] |= 1 << rest
        for (_, dst) in builder.successors(sid):
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
    sets = [masks[0]] * l
    for volley in range(1, k):
        for letter in range(l):
            sets.append(masks[1 + letter * (k - 1) + (volley - 1)])
    return StaggeredCut(l, tuple(a.n_states for a in bundle.automata), tuple(sets))


def _cut_shape_ok(bundle: InstanceBundle, cut: StaggeredCut) -> bool:
    if cut.sizes != tuple(a.n_states for a in bundle.automata):
        return False
    if cut.n_letters != bundle.n_letters:
        return False
    if len(cut.sets) != cut.k * cut.n_letters:
        return False
    space = _tuple_space(bundle)
    top = 1 << space.base_size
    return all(0 <= mask < top for mask in cut.sets)


def _final_tuples(bundle: InstanceBundle, space: ProductSpace) -> int:
    mask = 0
    for combo in itertools.product(*[sorted(a.finals) for a in bundle.automata]):
        mask |= 1 << space.encode(combo)
    return mask


def _check_cut_basics(bundle: InstanceBundle, cut: StaggeredCut) -> Optional[Verdict]:
    """Conditions shared by both verifiers: shape, base-copy agreement,
    initial membership, final exclusion.  None means all hold."""
    if not _cut_shape_ok(bundle, cut):
        return _reject("shape")
    base = cut.set_for(0, 0)
    for letter in range(1, cut.n_letters):
        if cut.set_for(0, letter) != base:
            return _reject("base-copy-mismatch", letter)
    space = _tuple_space(bundle)
    initial = space.encode([a.initial for a in bundle.automata])
    if not (base >> initial) & 1:
        return _reject("initial-missing", initial)
    finals = _final_tuples(bundle, space)
    offending = base & finals
    if offending:
        return _reject("final-present", (offending & -offending).bit_length() - 1)
    return None


def build_in_out(bundle: InstanceBundle, cut: StaggeredCut) -> InOutMatrices:
    """Reshape each cut subset into its In and Out matrices.

    Row indices enumerate the k-1 unexposed components (ascending component
    order, lowest index least significant); columns enumerate the exposed
    component.  Each set bit of the cut is touched twice.
    """
    if not _cut_shape_ok(bundle, cut):
        raise ValueError("cut shape does not match the bundle")
    k, l = cut.k, cut.n_letters
    sizes = cut.sizes
    space = _tuple_space(bundle)

    reduced_strides = []
    for exposed in range(k):
        strides = {}
        acc = 1
        for j in range(k):
            if j == exposed:
                continue
            strides[j] = acc
            acc *= sizes[j]
        reduced_strides.append((strides, acc))

    def reshape(mask: int, exposed: int) -> BoolMatrix:
        strides, n_rows = reduced_strides[exposed]
        rows = [0] * n_rows
        while mask:
            low = mask & -mask
            tid = low.bit_length() - 1
            mask ^= low
            components, _ = space.decode(tid)
            row = sum(components[j] * strides[j] for j in strides)
            rows[row] |= 1 << components[exposed]
        return BoolMatrix(n_rows, sizes[exposed], tuple(rows))

    in_mats = []
    out_mats = []
    for p in range(k):
        for letter in range(l):
            subset = cut.set_for(p, letter)
            in_mats.append(reshape(subset, (p - 1) % k))
            out_mats.append(reshape(subset, p))
    return InOutMatrices(tuple(in_mats), tuple(out_mats), l)


def verify_staggered_cut(bundle: InstanceBundle, cut: StaggeredCut) -> Verdict:
    """Verify a cut using boolean matrix products.

    Closure is checked per (component p, letter) as
    ``Out[p, letter] . adjacency_p(letter) <= In[p+1 mod k, letter]``: moving
    the exposed component of every cut tuple through the component automaton
    must stay inside the next subset.
    """
    basic = _check_cut_basics(bundle, cut)
    if basic is not None:
        return basic
    k, l = cut.k, cut.n_letters
    mats = build_in_out(bundle, cut)
    for p in range(k):
        automaton = bundle.automata[p]
        for letter in range(l):
            moved = mats.out_mat(p, letter).mul(adjacency_matrix(automaton, letter))
            target = mats.in_mat((p + 1) % k, letter)
            violation = moved.violating_entry(target)
            if violation is not None:
                return _reject("closure", p, letter, violation[0], violation[1])
    return ACCEPT


def verify_staggered_cut_naive(bundle: InstanceBundle, cut: StaggeredCut) -> Verdict:
    """Reference verifier: checks closure by enumerating, for every cut
    tuple, every move of the active component.  Slow but independent of the
    matrix reshaping; kept as the oracle the fast verifier is tested against.
    """
    basic = _check_cut_basics(bundle, cut)
    if basic is not None:
        return basic
    k, l = cut.k, cut.n_letters
    space = _tuple_space(bundle)
    for p in range(k):
        automaton = bundle.automata[p]
        stride = space.strides[p]
        for letter in range(l):
            subset = cut.set_for(p, letter)
            target = cut.set_for((p + 1) % k, letter)
            mask = subset
            while mask:
                low = mask & -mask
                tid = low.bit_length() - 1
                mask ^= low
                q = space.component(tid, p)
                for dst in automaton.successors(q, letter):
                    moved = tid + (dst - q) * stride
                    if not (target >> moved) & 1:
                        return _reject("closure", p, letter, tid, dst)
    return ACCEPT


# --- certificate files ------------------------------------------------------

def _mask_hex(mask: int, n_bits: int) -> str:
    n_bytes = (n_bits + 7) // 8
    return mask.to_bytes(n_bytes, "little").hex()


def serialize_certificate(cert: Union[ShortPathset, StaggeredCut]) -> str:
    lines = [CERT_MAGIC]
    if isinstance(cert, ShortPathset):
        lines.append("pathset")
        lines.append(f"k {cert.k}")
        lines.append(("word " + " ".join(map(str, cert.word))).rstrip())
        for i, run in enumerate(cert.runs):
            lines.append(f"run {i}")
            for (src, label, dst) in run:
                lines.append(f"step {src} {label} {dst}")
    elif isinstance(cert, StaggeredCut):
        n_bits = 1
        for n in cert.sizes:
            n_bits *= n
        lines.append("cut")
        lines.append(f"k {cert.k}")
        lines.append(f"alphabet {cert.n_letters}")
        lines.append("states " + " ".join(map(str, cert.sizes)))
        for i in range(cert.k):
            for letter in range(cert.n_letters):
                lines.append(f"set {i} {letter} {_mask_hex(cert.set_for(i, letter), n_bits)}")
    else:
        raise TypeError(f"not a certificate: {type(cert).__name__}")
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> Union[ShortPathset, StaggeredCut]:
    from .fileformat import FormatError

    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((no, stripped))
    if not lines or lines[0][1] != CERT_MAGIC:
        raise FormatError(f"expected magic line {CERT_MAGIC!r}", 1)
    if len(lines) < 2 or lines[1][1] not in ("pathset", "cut"):
        raise FormatError("expected certificate kind 'pathset' or 'cut'", lines[1][0] if len(lines) > 1 else 1)
    kind = lines[1][1]
    body = lines[2:]
    if kind == "pathset":
        k = None
        word = None
        runs: List[List[tuple]] = []
        for no, line in body:
            parts = line.split()
            if parts[0] == "k":
                k = int(parts[1])
            elif parts[0] == "word":
                word = tuple(int(x) for x in parts[1:])
            elif parts[0] == "run":
                if int(parts[1]) != len(runs):
                    raise FormatError("runs must appear in order", no)
                runs.append([])
            elif parts[0] == "step":
                if not runs:
                    raise FormatError("'step' before any 'run'", no)
                if len(parts) != 4:
                    raise FormatError("'step' takes src letter dst", no)
                runs[-1].append((int(parts[1]), int(parts[2]), int(parts[3])))
            else:
                raise FormatError(f"unknown directive {parts[0]!r}", no)
        if k is None or word is None:
            raise FormatError("pathset needs 'k' and 'word' lines", body[-1][0] if body else 1)
        if len(runs) != k:
            raise FormatError(f"declared k={k} but found {len(runs)} runs", body[-1][0])
        return ShortPathset(word, tuple(tuple(r) for r in runs))
    k = None
    alphabet = None
    sizes = None
    sets = {}
    for no, line in body:
        parts = line.split()
        if parts[0] == "k":
            k = int(parts[1])
        elif parts[0] == "alphabet":
            alphabet = int(parts[1])
        elif parts[0] == "states":
            sizes = tuple(int(x) for x in parts[1:])
        elif parts[0] == "set":
            if len(parts) != 4:
                raise FormatError("'set' takes component letter hex", no)
            sets[(int(parts[1]), int(parts[2]))] = int.from_bytes(bytes.fromhex(parts[3]), "little")
        else:
            raise FormatError(f"unknown directive {parts[0]!r}", no)
    if k is None or alphabet is None or sizes is None:
        raise FormatError("cut needs 'k', 'alphabet' and 'states' lines", body[-1][0] if body else 1)
    if len(sizes) != k:
        raise FormatError(f"declared k={k} but 'states' lists {len(sizes)} sizes", body[-1][0])
    ordered = []
    for i in range(k):
        for letter in range(alphabet):
            if (i, letter) not in sets:
                raise FormatError(f"missing 'set {i} {letter}' line", body[-1][0])
            ordered.append(sets[(i, letter)])
    return StaggeredCut(alphabet, sizes, tuple(ordered))
