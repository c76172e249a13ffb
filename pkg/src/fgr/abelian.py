"""Abelianized views of words and subgroups.

Visibility of a word means its exponent vector is primitive (coordinate
gcd 1); visible words are exactly the generators of cyclic retracts.
For a subgroup presented by a core graph with a spanning tree, members
abelianize to exponent vectors over the induced basis.  For a
finite-index subgroup the transfer map sums, over the cycles of the
coset permutation of a word, the classes of the lifted loops; the
chain-level projection matrix sends those classes back to the ambient
lattice and makes the two views commute.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Sequence

from .stallings import (
    CoreGraph,
    Edge,
    InfiniteIndexError,
    NotAMemberError,
    SpanningTree,
    basis,
    coset_permutation,
    rewrite_in_basis,
    subgroup_index,
    tree_path_word,
)
from .words import Word, add_vectors, checked_int64, exponent_sums


@dataclass(frozen=True)
class AbelianVector:
    """An integer exponent vector tagged with its basis.

    ``basis`` is "ambient" for vectors over the ambient generators and
    "subgroup" for vectors over a subgroup basis.
    """

    basis: str
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.basis not in ("ambient", "subgroup"):
            raise ValueError(f"unknown basis tag {self.basis!r}")

    def __add__(self, other: "AbelianVector") -> "AbelianVector":
        if not isinstance(other, AbelianVector):
            return NotImplemented
        if self.basis != other.basis:
            raise ValueError("cannot add vectors over different bases")
        return AbelianVector(self.basis, add_vectors(self.entries, other.entries))

    def coordinate_gcd(self) -> int:
        """gcd of the absolute entries; 0 for the zero vector."""
        return gcd(*(abs(e) for e in self.entries)) if self.entries else 0

    def to_json(self) -> dict:
        return {"basis": self.basis, "entries": list(self.entries)}


def ambient_vector(w: Word) -> AbelianVector:
    return AbelianVector("ambient", exponent_sums(w))


def is_visible(w: Word) -> bool:
    """Whether the exponent vector of ``w`` is primitive.

    The zero vector has gcd 0, so the identity (and anything in the
    commutator subgroup) is never visible.
    """
    return ambient_vector(w).coordinate_gcd() == 1


def abelianize_in_subgroup(graph: CoreGraph, tree: SpanningTree, w: Word) -> AbelianVector:
    """Exponent vector of a member word over the subgroup basis."""
    symbols = rewrite_in_basis(graph, tree, w)
    counts = [0] * len(tree.nontree_edges)
    for symbol in symbols.letters:
        i = abs(symbol) - 1
        counts[i] = checked_int64(counts[i] + (1 if symbol > 0 else -1))
    return AbelianVector("subgroup", tuple(counts))


def is_visible_in_subgroup(graph: CoreGraph, tree: SpanningTree, w: Word) -> bool:
    """Visibility of a member inside the subgroup itself.

    Computed as a coordinate gcd over the free basis; the gcd does not
    depend on which spanning tree induced the basis.
    """
    return abelianize_in_subgroup(graph, tree, w).coordinate_gcd() == 1


def transfer(
    graph: CoreGraph,
    tree: SpanningTree,
    w: Word,
    representative: Callable[[tuple[int, ...]], int] | None = None,
) -> AbelianVector:
    """Transfer of ``w`` into the abelianized finite-index subgroup.

    For each cycle c of the coset permutation of ``w``, pick a vertex v
    on c, form the member word (tree path base -> v) w^len(c) (tree
    path v -> base), abelianize it over the subgroup basis, and sum over
    cycles.  The default representative is the least vertex of the
    cycle; the result does not depend on this choice because conjugation
    dies in the abelianization.
    """
    perm = coset_permutation(graph, w)
    total = AbelianVector("subgroup", (0,) * len(tree.nontree_edges))
    for cycle in perm.cycles():
        vertex = min(cycle) if representative is None else representative(cycle)
        if vertex not in cycle:
            raise ValueError(f"representative {vertex} is not on the cycle {cycle}")
        loop = (
            tree_path_word(graph, tree, 0, vertex)
            * w ** len(cycle)
            * tree_path_word(graph, tree, vertex, 0)
        )
        total = total + abelianize_in_subgroup(graph, tree, loop)
    return total


def cycle_chain(graph: CoreGraph, w: Word) -> dict[Edge, int]:
    """Signed edge-traversal counts of the based loop spelling ``w``.

    This is the cellular 1-chain of the lifted loop; it has boundary
    zero at every vertex.  Raises when ``w`` is not a member.
    """
    counts: dict[Edge, int] = {}
    vertex = 0
    for letter in w.letters:
        if letter > 0:
            target = graph.succ.get((vertex, letter))
            if target is None:
                raise NotAMemberError(f"word leaves the graph at vertex {vertex}")
            edge = (vertex, target, letter)
            counts[edge] = checked_int64(counts.get(edge, 0) + 1)
            vertex = target
        else:
            source = graph.pred.get((vertex, -letter))
            if source is None:
                raise NotAMemberError(f"word leaves the graph at vertex {vertex}")
            edge = (source, vertex, -letter)
            counts[edge] = checked_int64(counts.get(edge, 0) - 1)
            vertex = source
    if vertex != 0:
        raise NotAMemberError("path does not close at the base")
    return counts


def homology_projection(graph: CoreGraph, tree: SpanningTree) -> tuple[tuple[int, ...], ...]:
    """Matrix projecting subgroup homology onto the ambient lattice.

    Row i, column j is the coefficient, in the chain of the j-th basis
    word, of the designated lift of generator i: the unique edge labeled
    i leaving the base.  Requires finite index so that every such lift
    exists.
    """
    if subgroup_index(graph) is None:
        raise InfiniteIndexError("the chain projection needs a finite-index subgroup")
    base_lifts = []
    for label in range(1, graph.rank + 1):
        target = graph.succ.get((0, label))
        if target is None:
            raise InfiniteIndexError(f"base vertex has no outgoing edge labeled {label}")
        base_lifts.append((0, target, label))
    columns = []
    for word in basis(graph, tree):
        chain = cycle_chain(graph, word)
        columns.append([chain.get(edge, 0) for edge in base_lifts])
    return tuple(
        tuple(column[row] for column in columns) for row in range(graph.rank)
    )


def apply_projection(matrix: Sequence[Sequence[int]], vector: AbelianVector) -> AbelianVector:
    """Multiply the projection matrix by a subgroup-basis vector."""
    if vector.basis != "subgroup":
        raise ValueError("projection applies to subgroup-basis vectors")
    entries = []
    for row in matrix:
        if len(row) != len(vector.entries):
            raise ValueError("matrix width does not match the vector")
        total = 0
        for coefficient, entry in zip(row, vector.entries):
            total = checked_int64(total + checked_int64(coefficient * entry))
        entries.append(total)
    return AbelianVector("ambient", tuple(entries))
