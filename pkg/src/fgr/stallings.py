"""Stallings core graphs for finitely generated subgroups of free groups.

A core graph is a folded, based, connected, edge-labeled digraph whose
loops at the base vertex spell exactly the members of a subgroup.
Vertices are ``0..vertex_count-1`` with the base fixed at 0; an edge
``(u, v, l)`` runs from u to v and carries the generator label l.

Construction folds a wedge of generator loops; ``pullback`` computes the
fiber product realizing subgroup intersection; ``schreier_graph`` builds
the coset graph of a permutation action.  ``canonicalize`` renumbers
vertices deterministically so that structural equality of canonical
graphs coincides with equality of subgroups.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .words import MAX_RANK, Word, identity, reduce_word

# An edge is (origin, terminus, label) with label in 1..rank.
Edge = tuple[int, int, int]


class NotAMemberError(ValueError):
    """The word does not belong to the subgroup."""


class InfiniteIndexError(ValueError):
    """The graph is not a finite covering of the rose."""


@dataclass(frozen=True)
class CoreGraph:
    rank: int
    vertex_count: int
    edges: tuple[Edge, ...]

    # The base vertex is 0 by convention; renumbering preserves this.
    base = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))
        succ: dict[tuple[int, int], int] = {}
        pred: dict[tuple[int, int], int] = {}
        if not 1 <= self.rank <= MAX_RANK:
            raise ValueError(f"rank must be in 1..{MAX_RANK}, got {self.rank}")
        if self.vertex_count < 1:
            raise ValueError("graph needs at least the base vertex")
        degree = [0] * self.vertex_count
        neighbors: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for origin, terminus, label in self.edges:
            if not (0 <= origin < self.vertex_count and 0 <= terminus < self.vertex_count):
                raise ValueError(f"edge endpoint out of range: {(origin, terminus, label)}")
            if not 1 <= label <= self.rank:
                raise ValueError(f"edge label out of range: {(origin, terminus, label)}")
            if (origin, label) in succ:
                raise ValueError(f"not folded: two edges labeled {label} leave {origin}")
            if (terminus, label) in pred:
                raise ValueError(f"not folded: two edges labeled {label} enter {terminus}")
            succ[(origin, label)] = terminus
            pred[(terminus, label)] = origin
            degree[origin] += 1
            degree[terminus] += 1
            neighbors[origin].append(terminus)
            neighbors[terminus].append(origin)
        seen = {0}
        queue = deque([0])
        while queue:
            for other in neighbors[queue.popleft()]:
                if other not in seen:
                    seen.add(other)
                    queue.append(other)
        if len(seen) != self.vertex_count:
            raise ValueError("graph is not connected to the base vertex")
        for vertex in range(1, self.vertex_count):
            if degree[vertex] < 2:
                raise ValueError(f"vertex {vertex} dangles (degree < 2)")

    @cached_property
    def succ(self) -> dict[tuple[int, int], int]:
        """(origin, label) -> terminus; unique because the graph is folded."""
        return {(u, l): v for (u, v, l) in self.edges}

    @cached_property
    def pred(self) -> dict[tuple[int, int], int]:
        """(terminus, label) -> origin; unique because the graph is folded."""
        return {(v, l): u for (u, v, l) in self.edges}

    def step(self, vertex: int, letter: int) -> int | None:
        """Endpoint of the signed ``letter`` traversal from ``vertex``."""
        if letter > 0:
            return self.succ.get((vertex, letter))
        return self.pred.get((vertex, -letter))


@dataclass(frozen=True)
class SpanningTree:
    """A spanning tree of a core graph plus its ordered non-tree edges.

    The non-tree edges index the induced free basis of the subgroup;
    their order is fixed at construction (see :func:`spanning_tree`).
    """

    tree_edges: frozenset[Edge]
    nontree_edges: tuple[Edge, ...]


@dataclass(frozen=True)
class BasisWord:
    """A reduced word over a subgroup basis.

    Letters are signed 1-based indices into the non-tree edge list of a
    spanning tree; sign +1 traverses the edge along its orientation.
    """

    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        previous = 0
        for letter in self.letters:
            if letter == 0:
                raise ValueError("basis symbol 0 is not allowed")
            if letter == -previous:
                raise ValueError("basis word is not freely reduced")
            previous = letter

    def __len__(self) -> int:
        return len(self.letters)


@dataclass(frozen=True)
class Permutation:
    """A permutation of ``0..len(images)-1`` given by its image tuple."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.images)
        if sorted(self.images) != list(range(n)):
            raise ValueError("images are not a bijection")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def then(self, other: "Permutation") -> "Permutation":
        """Composite permutation: apply ``self`` first, then ``other``."""
        if len(self.images) != len(other.images):
            raise ValueError("permutation degree mismatch")
        return Permutation(tuple(other.images[i] for i in self.images))

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """All cycles (fixed points included), ordered by least element."""
        seen = [False] * len(self.images)
        out: list[tuple[int, ...]] = []
        for start in range(len(self.images)):
            if seen[start]:
                continue
            cycle = [start]
            seen[start] = True
            point = self.images[start]
            while point != start:
                cycle.append(point)
                seen[point] = True
                point = self.images[point]
            out.append(tuple(cycle))
        return tuple(out)


def trivial_graph(rank: int) -> CoreGraph:
    """The one-vertex, zero-edge graph representing the trivial subgroup."""
    return CoreGraph(rank, 1, ())


def walk(graph: CoreGraph, vertex: int, letters: Iterable[int]) -> int | None:
    """Follow a signed letter sequence; None if the path breaks."""
    current: int | None = vertex
    for letter in letters:
        current = graph.step(current, letter)
        if current is None:
            return None
    return current


def contains(graph: CoreGraph, w: Word) -> bool:
    """Membership: the path of ``w`` from the base exists and closes."""
    if w.rank != graph.rank:
        raise ValueError(f"rank mismatch: {w.rank} != {graph.rank}")
    return walk(graph, 0, w.letters) == 0


def subgroup_rank(graph: CoreGraph) -> int:
    """Rank of the represented subgroup: |edges| - |vertices| + 1."""
    return len(graph.edges) - graph.vertex_count + 1


def subgroup_index(graph: CoreGraph) -> int | None:
    """The subgroup index, or None when it is infinite.

    The index is finite exactly when the graph is a complete covering:
    one outgoing and one incoming edge per label at every vertex.
    """
    for vertex in range(graph.vertex_count):
        for label in range(1, graph.rank + 1):
            if (vertex, label) not in graph.succ or (vertex, label) not in graph.pred:
                return None
    return graph.vertex_count


def _bfs_relabeling(
    rank: int,
    succ: dict[tuple[int, int], int],
    pred: dict[tuple[int, int], int],
    base: int,
) -> dict[int, int]:
    """Canonical vertex order: BFS from the base, exploring outgoing
    labels 1..n and then incoming labels 1..n at each vertex."""
    order = {base: 0}
    queue = deque([base])
    while queue:
        vertex = queue.popleft()
        for label in range(1, rank + 1):
            other = succ.get((vertex, label))
            if other is not None and other not in order:
                order[other] = len(order)
                queue.append(other)
        for label in range(1, rank + 1):
            other = pred.get((vertex, label))
            if other is not None and other not in order:
                order[other] = len(order)
                queue.append(other)
    return order


def canonical_relabeling(graph: CoreGraph) -> dict[int, int]:
    """Map from current vertex ids to canonical BFS ids."""
    return _bfs_relabeling(graph.rank, graph.succ, graph.pred, 0)


def canonicalize(graph: CoreGraph) -> CoreGraph:
    """Renumber vertices canonically; idempotent.

    Two folded core graphs represent the same subgroup exactly when
    their canonical forms are equal.
    """
    order = canonical_relabeling(graph)
    edges = tuple((order[u], order[v], l) for (u, v, l) in graph.edges)
    return CoreGraph(graph.rank, graph.vertex_count, edges)


def _normalize(rank: int, vertex_count: int, edges: Iterable[Edge], base: int) -> CoreGraph:
    """Fold, restrict to the base component, trim hair, renumber."""
    edge_set = {(int(u), int(v), int(l)) for (u, v, l) in edges}
    for u, v, l in edge_set:
        if not (0 <= u < vertex_count and 0 <= v < vertex_count):
            raise ValueError(f"edge endpoint out of range: {(u, v, l)}")
        if not 1 <= l <= rank:
            raise ValueError(f"edge label out of range: {(u, v, l)}")
    if not 0 <= base < vertex_count:
        raise ValueError("base vertex out of range")

    parent = list(range(vertex_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    # Fold: repeatedly merge targets of equal-label edges sharing an
    # endpoint.  Each pass either finds a clean deterministic structure
    # or strictly decreases the number of vertex classes, so this
    # terminates; confluence makes the result order-independent.
    while True:
        changed = False
        succ: dict[tuple[int, int], int] = {}
        pred: dict[tuple[int, int], int] = {}
        for u, v, l in edge_set:
            ru, rv = find(u), find(v)
            known = succ.get((ru, l))
            if known is None:
                succ[(ru, l)] = rv
            else:
                known = find(known)
                if known != find(rv):
                    parent[find(rv)] = known
                    changed = True
            rv = find(rv)
            known = pred.get((rv, l))
            if known is None:
                pred[(rv, l)] = find(ru)
            else:
                known = find(known)
                if known != find(ru):
                    parent[find(ru)] = known
                    changed = True
        edge_set = {(find(u), find(v), l) for (u, v, l) in edge_set}
        if not changed:
            break

    root = find(base)
    neighbors: dict[int, set[int]] = {}
    for u, v, _ in edge_set:
        neighbors.setdefault(u, set()).add(v)
        neighbors.setdefault(v, set()).add(u)
    component = {root}
    queue = deque([root])
    while queue:
        for other in neighbors.get(queue.popleft(), ()):
            if other not in component:
                component.add(other)
                queue.append(other)
    edge_set = {e for e in edge_set if e[0] in component}

    # Core-trim: drop non-base vertices of degree <= 1 until stable.
    while True:
        degree: dict[int, int] = {}
        for u, v, _ in edge_set:
            degree[u] = degree.get(u, 0) + 1
            degree[v] = degree.get(v, 0) + 1
        dangling = {v for v in component if v != root and degree.get(v, 0) <= 1}
        if not dangling:
            break
        component -= dangling
        edge_set = {e for e in edge_set if e[0] not in dangling and e[1] not in dangling}

    succ = {(u, l): v for (u, v, l) in edge_set}
    pred = {(v, l): u for (u, v, l) in edge_set}
    order = _bfs_relabeling(rank, succ, pred, root)
    renumbered = tuple((order[u], order[v], l) for (u, v, l) in edge_set)
    return CoreGraph(rank, len(order), renumbered)


def fold(rank: int, vertex_count: int, edges: Iterable[Edge], base: int = 0) -> CoreGraph:
    """Fold an arbitrary based labeled digraph into a core graph.

    The result is independent of edge order (folding is confluent) and
    is returned in canonical numbering with the base at 0.
    """
    return _normalize(rank, vertex_count, edges, base)


def from_generators(rank: int, generators: Sequence[Word]) -> CoreGraph:
    """Stallings graph of the subgroup generated by the given words.

    Builds a wedge of loop paths at the base and folds.  Identity words
    are discarded; if nothing remains the trivial one-vertex graph is
    returned by convention.
    """
    edges: list[Edge] = []
    next_vertex = 1
    for g in generators:
        if g.rank != rank:
            raise ValueError(f"generator rank {g.rank} != ambient rank {rank}")
        if not g.letters:
            continue
        current = 0
        for i, letter in enumerate(g.letters):
            target = 0 if i == len(g.letters) - 1 else next_vertex
            if target:
                next_vertex += 1
            if letter > 0:
                edges.append((current, target, letter))
            else:
                edges.append((target, current, -letter))
            current = target
    if not edges:
        return trivial_graph(rank)
    return _normalize(rank, next_vertex, edges, 0)


def spanning_tree(graph: CoreGraph, override: Iterable[Edge] | None = None) -> SpanningTree:
    """A spanning tree with a deterministic non-tree edge order.

    The default tree is grown by BFS from the base exploring, at each
    vertex, labels 1..n in (label, direction) order with outgoing before
    incoming.  ``override`` supplies an explicit tree edge set instead;
    it must be a spanning tree of the graph.

    Non-tree edges are ordered by (BFS index of origin, label), where
    BFS indices come from traversing the chosen tree.
    """
    n = graph.vertex_count
    if override is None:
        tree: set[Edge] = set()
        seen = {0}
        queue = deque([0])
        while queue:
            vertex = queue.popleft()
            for label in range(1, graph.rank + 1):
                out = graph.succ.get((vertex, label))
                if out is not None and out not in seen:
                    tree.add((vertex, out, label))
                    seen.add(out)
                    queue.append(out)
                inc = graph.pred.get((vertex, label))
                if inc is not None and inc not in seen:
                    tree.add((inc, vertex, label))
                    seen.add(inc)
                    queue.append(inc)
    else:
        tree = {tuple(e) for e in override}
        graph_edges = set(graph.edges)
        if not tree <= graph_edges:
            raise ValueError("override contains edges not in the graph")
        if len(tree) != n - 1:
            raise ValueError(f"override has {len(tree)} edges, expected {n - 1}")
        reached = {0}
        queue = deque([0])
        adjacency: dict[int, list[int]] = {}
        for u, v, _ in tree:
            adjacency.setdefault(u, []).append(v)
            adjacency.setdefault(v, []).append(u)
        while queue:
            for other in adjacency.get(queue.popleft(), ()):
                if other not in reached:
                    reached.add(other)
                    queue.append(other)
        if len(reached) != n:
            raise ValueError("override does not span the graph")

    index = _tree_bfs_index(graph, tree)
    nontree = [e for e in graph.edges if e not in tree]
    nontree.sort(key=lambda e: (index[e[0]], e[2]))
    return SpanningTree(frozenset(tree), tuple(nontree))


def _tree_bfs_index(graph: CoreGraph, tree: set[Edge] | frozenset[Edge]) -> dict[int, int]:
    """Vertex discovery order of a BFS from the base over tree edges."""
    tree_succ = {(u, l): v for (u, v, l) in tree}
    tree_pred = {(v, l): u for (u, v, l) in tree}
    return _bfs_relabeling(graph.rank, tree_succ, tree_pred, 0)


def _check_tree(graph: CoreGraph, tree: SpanningTree) -> None:
    if tree.tree_edges | set(tree.nontree_edges) != set(graph.edges):
        raise ValueError("spanning tree does not belong to this graph")
    if len(tree.tree_edges) != graph.vertex_count - 1:
        raise ValueError("spanning tree has the wrong number of edges")


def _tree_parents(graph: CoreGraph, tree: SpanningTree) -> list[tuple[int, int] | None]:
    """Per-vertex (parent, signed letter spelling parent->vertex)."""
    tree_succ = {(u, l): v for (u, v, l) in tree.tree_edges}
    tree_pred = {(v, l): u for (u, v, l) in tree.tree_edges}
    parents: list[tuple[int, int] | None] = [None] * graph.vertex_count
    seen = {0}
    queue = deque([0])
    while queue:
        vertex = queue.popleft()
        for label in range(1, graph.rank + 1):
            out = tree_succ.get((vertex, label))
            if out is not None and out not in seen:
                parents[out] = (vertex, label)
                seen.add(out)
                queue.append(out)
            inc = tree_pred.get((vertex, label))
            if inc is not None and inc not in seen:
                parents[inc] = (vertex, -label)
                seen.add(inc)
                queue.append(inc)
    return parents


def _root_path(parents: list[tuple[int, int] | None], vertex: int) -> list[int]:
    """Signed letters spelling the tree path base -> vertex."""
    letters: list[int] = []
    while parents[vertex] is not None:
        parent, letter = parents[vertex]  # type: ignore[misc]
        letters.append(letter)
        vertex = parent
    letters.reverse()
    return letters


def tree_path_word(graph: CoreGraph, tree: SpanningTree, source: int, target: int) -> Word:
    """Reduced word spelled by the tree geodesic from source to target."""
    _check_tree(graph, tree)
    parents = _tree_parents(graph, tree)
    to_source = _root_path(parents, source)
    to_target = _root_path(parents, target)
    inverted = [-l for l in reversed(to_source)]
    return reduce_word(graph.rank, inverted + to_target)


def basis(graph: CoreGraph, tree: SpanningTree | None = None) -> list[Word]:
    """The free basis of the subgroup induced by a spanning tree.

    For each non-tree edge e the basis word is (tree path base ->
    origin(e)) . label(e) . (tree path terminus(e) -> base), reduced.
    """
    if tree is None:
        tree = spanning_tree(graph)
    _check_tree(graph, tree)
    parents = _tree_parents(graph, tree)
    paths = {v: _root_path(parents, v) for v in range(graph.vertex_count)}
    words = []
    for origin, terminus, label in tree.nontree_edges:
        back = [-l for l in reversed(paths[terminus])]
        words.append(reduce_word(graph.rank, paths[origin] + [label] + back))
    return words


def rewrite_in_basis(graph: CoreGraph, tree: SpanningTree, w: Word) -> BasisWord:
    """Express a member word over the basis induced by ``tree``.

    Traces the path of ``w`` from the base and emits a signed basis
    symbol for each non-tree edge crossed, in traversal order.  Raises
    :class:`NotAMemberError` when the path breaks or does not close.
    """
    if w.rank != graph.rank:
        raise ValueError(f"rank mismatch: {w.rank} != {graph.rank}")
    _check_tree(graph, tree)
    symbol = {edge: i + 1 for i, edge in enumerate(tree.nontree_edges)}
    vertex = 0
    out: list[int] = []
    for letter in w.letters:
        if letter > 0:
            target = graph.succ.get((vertex, letter))
            if target is None:
                raise NotAMemberError(f"word leaves the graph at vertex {vertex}")
            sym = symbol.get((vertex, target, letter))
            if sym is not None:
                out.append(sym)
            vertex = target
        else:
            source = graph.pred.get((vertex, -letter))
            if source is None:
                raise NotAMemberError(f"word leaves the graph at vertex {vertex}")
            sym = symbol.get((source, vertex, -letter))
            if sym is not None:
                out.append(-sym)
            vertex = source
    if vertex != 0:
        raise NotAMemberError("path does not close at the base")
    return BasisWord(tuple(out))


def evaluate_basis_word(basis_words: Sequence[Word], symbols: BasisWord, rank: int) -> Word:
    """Substitute actual basis words for the symbols and reduce."""
    out = identity(rank)
    for symbol in symbols.letters:
        if abs(symbol) > len(basis_words):
            raise ValueError(f"basis symbol {symbol} out of range")
        word = basis_words[abs(symbol) - 1]
        out = out * (word if symbol > 0 else word.inverse())
    return out


def pullback(g1: CoreGraph, g2: CoreGraph) -> CoreGraph:
    """Fiber product of two core graphs: the intersection subgroup.

    Explores synchronized transitions lazily from the pair of base
    vertices rather than materializing the full product; the result is
    core-trimmed and canonical.  A trivial intersection yields the
    one-vertex graph.
    """
    if g1.rank != g2.rank:
        raise ValueError(f"rank mismatch: {g1.rank} != {g2.rank}")
    ids: dict[tuple[int, int], int] = {(0, 0): 0}
    queue: deque[tuple[int, int]] = deque([(0, 0)])
    edges: set[Edge] = set()
    while queue:
        p, q = queue.popleft()
        here = ids[(p, q)]
        for label in range(1, g1.rank + 1):
            a = g1.succ.get((p, label))
            b = g2.succ.get((q, label))
            if a is not None and b is not None:
                pair = (a, b)
                there = ids.get(pair)
                if there is None:
                    there = ids[pair] = len(ids)
                    queue.append(pair)
                edges.add((here, there, label))
            a = g1.pred.get((p, label))
            b = g2.pred.get((q, label))
            if a is not None and b is not None:
                pair = (a, b)
                there = ids.get(pair)
                if there is None:
                    there = ids[pair] = len(ids)
                    queue.append(pair)
                edges.add((there, here, label))
    if not edges:
        return trivial_graph(g1.rank)
    return _normalize(g1.rank, len(ids), edges, 0)


def schreier_graph(rank: int, perms: Sequence[Permutation], base: int) -> CoreGraph:
    """Coset graph of a transitive permutation action.

    ``perms[i]`` is the action of generator i+1 on the points; the
    resulting graph is a complete covering with the given base point,
    renumbered canonically.  Raises when the action is not transitive.
    """
    if len(perms) != rank:
        raise ValueError(f"expected {rank} permutations, got {len(perms)}")
    points = perms[0].degree() if perms else 1
    for perm in perms:
        if perm.degree() != points:
            raise ValueError("permutations act on different point counts")
    if not 0 <= base < points:
        raise ValueError("base point out of range")
    edges = {
        (p, perm.images[p], label)
        for label, perm in enumerate(perms, start=1)
        for p in range(points)
    }
    neighbors: dict[int, set[int]] = {p: set() for p in range(points)}
    for u, v, _ in edges:
        neighbors[u].add(v)
        neighbors[v].add(u)
    seen = {base}
    queue = deque([base])
    while queue:
        for other in neighbors[queue.popleft()]:
            if other not in seen:
                seen.add(other)
                queue.append(other)
    if len(seen) != points:
        raise ValueError("action is not transitive: coset graph is not connected")
    return _normalize(rank, points, edges, base)


def coset_permutation(graph: CoreGraph, w: Word) -> Permutation:
    """Permutation induced by ``w`` on the vertices of a finite cover.

    Vertex v maps to the endpoint of the lift of ``w`` starting at v.
    Requires finite index (a complete covering).
    """
    if w.rank != graph.rank:
        raise ValueError(f"rank mismatch: {w.rank} != {graph.rank}")
    if subgroup_index(graph) is None:
        raise InfiniteIndexError("coset permutations need a finite-index subgroup")
    images = []
    for vertex in range(graph.vertex_count):
        target = walk(graph, vertex, w.letters)
        assert target is not None  # complete covering
        images.append(target)
    return Permutation(tuple(images))


def graph_to_json(graph: CoreGraph, canonical: bool = True) -> dict:
    """JSON-serializable form with canonical vertex numbering."""
    g = canonicalize(graph) if canonical else graph
    return {
        "rank": g.rank,
        "vertices": g.vertex_count,
        "base": 0,
        "edges": [{"from": u, "to": v, "label": l} for (u, v, l) in g.edges],
    }


def graph_from_json(data: dict) -> CoreGraph:
    """Parse the JSON form back into a validated core graph."""
    try:
        rank = int(data["rank"])
        vertices = int(data["vertices"])
        base = int(data.get("base", 0))
        edges = tuple(
            (int(e["from"]), int(e["to"]), int(e["label"])) for e in data["edges"]
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph JSON: {exc}") from exc
    if base != 0:
        raise ValueError("graph JSON must use base vertex 0")
    return CoreGraph(rank, vertices, edges)
