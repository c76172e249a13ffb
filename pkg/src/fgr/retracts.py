"""Retract predicates, intersection verdicts, and randomized suites.

A retract is presented by a section/retraction pair that is verified
symbolically at construction.  Intersection verdicts are only asserted
where the rank structure makes them decidable: rank <= 1 intersections
via the visibility criterion for cyclic retracts applied inside the
subgroup, and full-rank intersections in subgroups of rank <= 2 via
canonical graph equality (a proper retract always has strictly smaller
rank).  Everything else is reported as undecided by design.

The randomized suites draw every bit of randomness from a single 64-bit
seed through per-trial generators derived by hashing (seed, trial), so
reports are reproducible and embed the seed.

Coverage note: the random retract family samples sections of coordinate
projections composed with kernel conjugations, plus cyclic retracts of
random visible words; whether this family is exhaustive up to
automorphism is unknown.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations as _itertools_permutations
from math import gcd
from typing import Callable, Sequence

from .abelian import (
    abelianize_in_subgroup,
    apply_projection,
    homology_projection,
    is_visible,
    is_visible_in_subgroup,
    transfer,
)
from .constructions import lm_graph, wk_word
from .stallings import (
    CoreGraph,
    Permutation,
    basis,
    canonicalize,
    coset_permutation,
    from_generators,
    graph_to_json,
    pullback,
    schreier_graph,
    spanning_tree,
    subgroup_index,
    subgroup_rank,
)
from .words import Word, exponent_sums, identity, render_word, substitute, with_rank


@dataclass(frozen=True)
class RetractPresentation:
    """A retract given by a section of a retraction onto it.

    ``retraction_images`` lists the images of the ambient generators in
    an abstract free group of rank k; ``section_images`` lists the
    ambient words the abstract generators map back to, i.e. a basis of
    the retract.  The section property (retraction after section is the
    identity) is checked symbolically at construction.
    """

    ambient_rank: int
    section_images: tuple[Word, ...]
    retraction_images: tuple[Word, ...]

    def __post_init__(self) -> None:
        k = len(self.section_images)
        if not 1 <= k:
            raise ValueError("a retract presentation needs at least one section image")
        if len(self.retraction_images) != self.ambient_rank:
            raise ValueError("need one retraction image per ambient generator")
        for image in self.section_images:
            if image.rank != self.ambient_rank:
                raise ValueError("section images must live in the ambient group")
        for image in self.retraction_images:
            if image.rank != k:
                raise ValueError("retraction images must live in the rank-k group")
        for i, image in enumerate(self.section_images, start=1):
            if substitute(image, self.retraction_images, k) != Word(k, (i,)):
                raise ValueError(f"section property fails on generator {i}")

    @property
    def rank(self) -> int:
        return len(self.section_images)

    @cached_property
    def graph(self) -> CoreGraph:
        return from_generators(self.ambient_rank, self.section_images)


@dataclass(frozen=True)
class IntersectionReport:
    """Ranks and verdict for one subgroup/retract intersection."""

    rank_h: int
    rank_r: int
    rank_intersection: int
    smallest_power: int | None
    intersection_visible_in_h: bool | None
    verdict: str

    def to_json(self) -> dict:
        return {
            "rank_h": self.rank_h,
            "rank_r": self.rank_r,
            "rank_intersection": self.rank_intersection,
            "smallest_power": self.smallest_power,
            "intersection_visible_in_h": self.intersection_visible_in_h,
            "verdict": self.verdict,
        }


def cyclic_retract_check(w: Word) -> bool:
    """Whether the cyclic subgroup on ``w`` is a retract: visibility."""
    return is_visible(w)


def turner_power_word(exponents: Sequence[int]) -> bool:
    """Test-element criterion for x_1^k_1 .. x_n^k_n: every exponent
    nonzero and the gcd of their absolute values different from 1."""
    if any(k == 0 for k in exponents):
        return False
    return gcd(*(abs(k) for k in exponents)) != 1


def _extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b)."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    return old_r, old_x, old_y


def cyclic_retract(w: Word) -> RetractPresentation:
    """Present the cyclic subgroup on a visible word as a retract.

    The retraction sends generator i to the c_i-th power of the
    abstract generator, with the c_i a Bezout certificate for the
    exponent vector of ``w``.
    """
    sums = exponent_sums(w)
    running, coefficients = 0, []
    for entry in sums:
        running_next, x, y = _extended_gcd(running, entry)
        coefficients = [c * x for c in coefficients]
        coefficients.append(y)
        running = running_next
    if abs(running) != 1:
        raise ValueError("word is not visible, so its cyclic subgroup is no retract")
    if running == -1:
        coefficients = [-c for c in coefficients]
    retraction = tuple(
        Word(1, (1,) * c if c >= 0 else (-1,) * (-c)) for c in coefficients
    )
    return RetractPresentation(w.rank, (w,), retraction)


def smallest_power_in(graph: CoreGraph, w: Word) -> int | None:
    """Least m >= 1 with w^m in the subgroup, or None if there is none.

    At finite index this is the length of the coset-permutation cycle
    through the base.  Otherwise the intersection with the cyclic
    subgroup on ``w`` is computed by pullback; its single basis word is
    w^(+-m).
    """
    if not w.letters:
        raise ValueError("the trivial word has no smallest power")
    if subgroup_index(graph) is not None:
        perm = coset_permutation(graph, w)
        length = 1
        vertex = perm(0)
        while vertex != 0:
            vertex = perm(vertex)
            length += 1
        return length
    intersection = pullback(graph, from_generators(graph.rank, [w]))
    rank_i = subgroup_rank(intersection)
    if rank_i == 0:
        return None
    assert rank_i == 1, "intersection with a cyclic subgroup must be cyclic"
    generator = basis(intersection)[0]
    power = w
    m = 1
    while len(power) <= len(generator):
        if power == generator or power.inverse() == generator:
            return m
        power = power * w
        m += 1
    raise AssertionError("cyclic intersection generator is not a power of the word")


def intersection_report(
    subgroup: CoreGraph, retract: "RetractPresentation | CoreGraph"
) -> IntersectionReport:
    """Intersect a subgroup with a retract and decide what is decidable.

    Verdicts: trivial intersections and full intersections (equal to the
    subgroup) are always retracts; a cyclic intersection is a retract of
    the subgroup exactly when its generator is visible there; any other
    proper intersection inside a subgroup of rank <= 2 cannot be a
    retract because proper retracts have strictly smaller rank.  The
    remaining cases are undecided.
    """
    r_graph = retract.graph if isinstance(retract, RetractPresentation) else retract
    if subgroup.rank != r_graph.rank:
        raise ValueError(f"rank mismatch: {subgroup.rank} != {r_graph.rank}")
    intersection = pullback(subgroup, r_graph)
    rank_h = subgroup_rank(subgroup)
    rank_r = (
        retract.rank if isinstance(retract, RetractPresentation) else subgroup_rank(r_graph)
    )
    rank_i = subgroup_rank(intersection)

    smallest = None
    if rank_r == 1:
        if isinstance(retract, RetractPresentation):
            generator = retract.section_images[0]
        else:
            generator = basis(r_graph)[0]
        smallest = smallest_power_in(subgroup, generator)

    visible = None
    if rank_i == 1:
        u = basis(intersection)[0]
        visible = is_visible_in_subgroup(subgroup, spanning_tree(subgroup), u)

    if rank_i == 0:
        verdict = "yes"
    elif rank_i == 1:
        verdict = "yes" if visible else "no"
    elif intersection == canonicalize(subgroup):
        verdict = "yes"
    elif rank_h <= 2:
        verdict = "no"
    else:
        verdict = "undecided"
    return IntersectionReport(rank_h, rank_r, rank_i, smallest, visible, verdict)


def bergman_counterexample(n: int, m: int, k: int) -> IntersectionReport:
    """A rank-m subgroup and rank-k retract of the rank-n free group
    whose intersection is not a retract of the subgroup.

    The subgroup is the rank-m family member over the first two
    generators; the retract is the free product of the cyclic retract
    on x[x,y]^floor((m-1)/2) with the coordinate factor on generators
    3..k+1.
    """
    if n < 2:
        raise ValueError(f"ambient rank must be at least 2, got {n}")
    if m < 3:
        raise ValueError(f"the counterexample family needs m >= 3, got {m}")
    if not 1 <= k <= n - 1:
        raise ValueError(f"retract rank must be in 1..{n - 1}, got {k}")
    lm = lm_graph(m)
    subgroup = CoreGraph(n, lm.vertex_count, lm.edges)
    w = with_rank(wk_word((m - 1) // 2), n)
    section = [w] + [Word(n, (i,)) for i in range(3, k + 2)]
    retraction = [Word(k, (1,)), identity(k)]
    retraction += [Word(k, (i - 1,)) for i in range(3, k + 2)]
    retraction += [identity(k)] * (n - k - 1)
    presented = RetractPresentation(n, tuple(section), tuple(retraction))
    return intersection_report(subgroup, presented)


# ---------------------------------------------------------------------------
# Seeded randomness and instance generators


def _trial_rng(seed: int, index: int) -> random.Random:
    """Independent deterministic generator for one trial of a suite."""
    digest = hashlib.sha256(f"{seed}:{index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _random_reduced_word(rng: random.Random, rank: int, max_len: int, min_len: int = 1) -> Word:
    length = rng.randint(min_len, max_len)
    letters: list[int] = []
    for _ in range(length):
        options = [
            l
            for l in range(-rank, rank + 1)
            if l != 0 and (not letters or l != -letters[-1])
        ]
        letters.append(rng.choice(options))
    return Word(rank, tuple(letters))


def _random_visible_word(rng: random.Random, rank: int, max_len: int) -> Word:
    for _ in range(1000):
        w = _random_reduced_word(rng, rank, max_len)
        if is_visible(w):
            return w
    raise RuntimeError("failed to draw a visible word")


def _random_permutation(rng: random.Random, points: int) -> Permutation:
    images = list(range(points))
    rng.shuffle(images)
    return Permutation(tuple(images))


def _random_transitive_graph(rng: random.Random, rank: int, max_index: int) -> CoreGraph:
    points = rng.randint(1, max_index)
    for _ in range(1000):
        perms = [_random_permutation(rng, points) for _ in range(rank)]
        try:
            return schreier_graph(rank, perms, 0)
        except ValueError:
            continue
    raise RuntimeError("failed to draw a transitive action")


def _random_subgroup(rng: random.Random, rank: int, gens: int, max_len: int) -> CoreGraph:
    words = [_random_reduced_word(rng, rank, max_len) for _ in range(gens)]
    return from_generators(rank, words)


def random_retract(n: int, k: int, seed: int, complexity: int = 2) -> RetractPresentation:
    """Draw a rank-k retract of the rank-n free group, reproducibly.

    The retraction projects the first k generators to themselves and
    the rest to random words in them; the section perturbs each
    coordinate generator by a product of conjugated kernel elements, so
    the section property holds by construction (and is re-verified).
    """
    if not 1 <= k <= n - 1:
        raise ValueError(f"retract rank must be in 1..{n - 1}, got {k}")
    if complexity < 0:
        raise ValueError("complexity must be nonnegative")
    rng = _trial_rng(seed, 0)
    for _ in range(20):
        projected = [
            _random_reduced_word(rng, k, complexity, min_len=0)
            for _ in range(k + 1, n + 1)
        ]
        retraction = tuple([Word(k, (i,)) for i in range(1, k + 1)] + projected)
        kernel = [
            Word(n, (j,)) * substitute(projected[j - k - 1], _coordinate_words(n, k), n).inverse()
            for j in range(k + 1, n + 1)
        ]
        section = []
        for i in range(1, k + 1):
            twist = identity(n)
            for _ in range(rng.randint(0, complexity)):
                element = rng.choice(kernel)
                if rng.random() < 0.5:
                    element = element.inverse()
                conjugator = _random_reduced_word(rng, n, complexity, min_len=0)
                twist = twist * conjugator * element * conjugator.inverse()
            section.append(Word(n, (i,)) * twist)
        presented = RetractPresentation(n, tuple(section), retraction)
        if subgroup_rank(presented.graph) == k:
            return presented
    raise ValueError("random retract draw degenerated repeatedly")


def _coordinate_words(n: int, k: int) -> list[Word]:
    """Images of the k abstract generators as the first k ambient ones."""
    return [Word(n, (i,)) for i in range(1, k + 1)]


# ---------------------------------------------------------------------------
# Finite groups for normal-subgroup sampling (regular actions)

def _cyclic_group(q: int):
    elements = list(range(q))
    return elements, 0, lambda a, b: (a + b) % q


def _dihedral_group(q: int):
    elements = [(r, a) for r in (0, 1) for a in range(q)]

    def multiply(x, y):
        r1, a1 = x
        r2, a2 = y
        return (r1 ^ r2, (a2 + a1 * (-1 if r2 else 1)) % q)

    return elements, (0, 0), multiply


def _symmetric_group(q: int):
    elements = [tuple(p) for p in _itertools_permutations(range(q))]

    def multiply(x, y):
        return tuple(y[i] for i in x)

    identity_element = tuple(range(q))
    return elements, identity_element, multiply


_SMALL_GROUPS = (
    [_cyclic_group(q) for q in range(1, 13)]
    + [_dihedral_group(q) for q in range(3, 7)]
    + [_symmetric_group(3)]
)


def _random_normal_graph(rng: random.Random, rank: int) -> CoreGraph:
    """Kernel of a random surjection onto a small group, via the
    regular action; the stabilizer of the identity point is normal."""
    elements, identity_element, multiply = rng.choice(_SMALL_GROUPS)
    position = {g: i for i, g in enumerate(elements)}
    for _ in range(1000):
        images = [rng.choice(elements) for _ in range(rank)]
        perms = [
            Permutation(tuple(position[multiply(g, image)] for g in elements))
            for image in images
        ]
        try:
            return schreier_graph(rank, perms, position[identity_element])
        except ValueError:
            continue
    raise RuntimeError("failed to draw a generating tuple")


# ---------------------------------------------------------------------------
# Property suites


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    trials: int
    passes: int
    failures: tuple[dict, ...]
    seed: int

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "passes": self.passes,
            "failures": list(self.failures),
            "seed": self.seed,
        }


def _trial_transfer_visibility(rng: random.Random, bounds: dict) -> tuple[bool, dict | None]:
    rank = rng.choice(bounds.get("ranks", (2, 3)))
    graph = _random_transitive_graph(rng, rank, bounds.get("max_index", 12))
    tree = spanning_tree(graph)
    w = _random_visible_word(rng, rank, bounds.get("max_word_len", 40))
    image = transfer(graph, tree, w)
    projected = apply_projection(homology_projection(graph, tree), image)
    ok = image.coordinate_gcd() == 1 and projected.entries == exponent_sums(w)
    if ok:
        return True, None
    return False, {"graph": graph_to_json(graph), "word": render_word(w)}


def _trial_single_cycle_power(rng: random.Random, bounds: dict) -> tuple[bool, dict | None]:
    rank = rng.choice(bounds.get("ranks", (2, 3)))
    max_index = bounds.get("max_index", 12)
    max_len = bounds.get("max_word_len", 40)
    for _ in range(200):
        graph = _random_transitive_graph(rng, rank, max_index)
        tree = spanning_tree(graph)
        for _ in range(60):
            w = _random_visible_word(rng, rank, max_len)
            perm = coset_permutation(graph, w)
            if len(perm.cycles()) != 1:
                continue
            power = w ** graph.vertex_count
            ok = (
                transfer(graph, tree, w) == abelianize_in_subgroup(graph, tree, power)
                and is_visible_in_subgroup(graph, tree, power)
            )
            if ok:
                return True, None
            return False, {"graph": graph_to_json(graph), "word": render_word(w)}
    raise RuntimeError("failed to condition on a single-cycle action")


def _trial_normal_power(rng: random.Random, bounds: dict) -> tuple[bool, dict | None]:
    rank = rng.choice(bounds.get("ranks", (2, 3)))
    graph = _random_normal_graph(rng, rank)
    tree = spanning_tree(graph)
    w = _random_visible_word(rng, rank, bounds.get("max_word_len", 40))
    m = smallest_power_in(graph, w)
    ok = m is not None and is_visible_in_subgroup(graph, tree, w ** m)
    if ok:
        return True, None
    return False, {"graph": graph_to_json(graph), "word": render_word(w)}


def _random_rank2_subgroup(rng: random.Random, rank: int, max_len: int) -> CoreGraph:
    for _ in range(200):
        graph = _random_subgroup(rng, rank, 2, max_len)
        if subgroup_rank(graph) == 2:
            return graph
    raise RuntimeError("failed to draw a rank-2 subgroup")


def _trial_rank2_intersection(rng: random.Random, bounds: dict) -> tuple[bool, dict | None]:
    n = rng.randint(2, bounds.get("max_rank", 4))
    subgroup = _random_rank2_subgroup(rng, n, bounds.get("max_word_len", 30))
    if rng.random() < 0.5:
        retract = random_retract(
            n, rng.randint(1, n - 1), rng.getrandbits(63), rng.randint(0, 2)
        )
    else:
        retract = cyclic_retract(_random_visible_word(rng, n, 20))
    report = intersection_report(subgroup, retract)
    if report.verdict == "yes":
        return True, None
    return False, {
        "subgroup": graph_to_json(subgroup),
        "retract_basis": [render_word(w) for w in retract.section_images],
        "report": report.to_json(),
    }


def _trial_rank_bound(rng: random.Random, bounds: dict) -> tuple[bool, dict | None]:
    n = rng.randint(2, bounds.get("max_rank", 4))
    subgroup = _random_subgroup(rng, n, 3, bounds.get("max_word_len", 30))
    retract = random_retract(
        n, rng.randint(1, n - 1), rng.getrandbits(63), rng.randint(0, 2)
    )
    intersection = pullback(subgroup, retract.graph)
    if subgroup_rank(intersection) <= subgroup_rank(subgroup):
        return True, None
    return False, {
        "subgroup": graph_to_json(subgroup),
        "retract_basis": [render_word(w) for w in retract.section_images],
    }


def _trial_hanna_neumann(rng: random.Random, bounds: dict) -> tuple[bool, dict | None]:
    rank = rng.choice(bounds.get("ranks", (2, 3)))
    max_len = bounds.get("max_word_len", 12)
    a = _random_subgroup(rng, rank, rng.randint(1, 3), max_len)
    b = _random_subgroup(rng, rank, rng.randint(1, 3), max_len)
    bound = (subgroup_rank(a) - 1) * (subgroup_rank(b) - 1)
    if max(subgroup_rank(pullback(a, b)) - 1, 0) <= bound:
        return True, None
    return False, {"a": graph_to_json(a), "b": graph_to_json(b)}


def _trial_schreier_formula(rng: random.Random, bounds: dict) -> tuple[bool, dict | None]:
    rank = rng.choice(bounds.get("ranks", (2, 3)))
    graph = _random_transitive_graph(rng, rank, bounds.get("max_index", 12))
    index = subgroup_index(graph)
    if index is not None and subgroup_rank(graph) == index * (rank - 1) + 1:
        return True, None
    return False, {"graph": graph_to_json(graph)}


_SUITES: dict[str, Callable[[random.Random, dict], tuple[bool, dict | None]]] = {
    "transfer-visibility": _trial_transfer_visibility,
    "single-cycle-power": _trial_single_cycle_power,
    "normal-power": _trial_normal_power,
    "rank2-intersection": _trial_rank2_intersection,
    "rank-bound-rk3": _trial_rank_bound,
    "hanna-neumann": _trial_hanna_neumann,
    "schreier-formula": _trial_schreier_formula,
}


def suite_names() -> tuple[str, ...]:
    return tuple(sorted(_SUITES))


def run_suite(name: str, trials: int, seed: int, **bounds) -> SuiteReport:
    """Run a named property suite; deterministic for a given seed.

    The report counts passes and records the first counterexample, if
    any, in serialized form.
    """
    try:
        trial = _SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; known: {', '.join(suite_names())}")
    passes = 0
    failures: list[dict] = []
    for index in range(trials):
        ok, detail = trial(_trial_rng(seed, index), bounds)
        if ok:
            passes += 1
        elif not failures:
            failures.append({"trial": index, **(detail or {})})
    return SuiteReport(name, trials, passes, tuple(failures), seed)
