"""The explicit graph and word families behind the counterexamples.

For m >= 2, ``gamma_graph(m)`` is the degree-m cover of the rank-2 rose
with vertices v_0..v_{m-1}, an a-edge v_i -> v_{m-i mod m} and a b-edge
v_i -> v_{i+1 mod m}.  Based at v_0 it presents the index-m subgroup
pulled back from the reflection subgroup of the dihedral group D_m
under x -> t, y -> s; the b-path v_0..v_{m-1} is its preferred spanning
tree, giving the basis x, t_1, .., t_{m-1}, y^m with t_i = y^i x
y^-(m-i).

``wk_word(k)`` is x[x,y]^k, a visible word whose square always lies in
the subgroup above while the word itself lies in it only when m | 2k.
``wk_square_rewrite(m)`` (m odd) is the closed form of that square over
the preferred basis, used as an oracle against path rewriting.
"""

from __future__ import annotations

from dataclasses import dataclass

from .stallings import BasisWord, CoreGraph, SpanningTree, from_generators, spanning_tree
from .words import Word, commutator


@dataclass(frozen=True)
class DihedralElement:
    """Element t^reflection s^rotation of D_m = <t, s | t^2, s^m, tst=s^-1>."""

    modulus: int
    reflection: int
    rotation: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError("dihedral modulus must be positive")
        if self.reflection not in (0, 1):
            raise ValueError("reflection bit must be 0 or 1")
        object.__setattr__(self, "rotation", self.rotation % self.modulus)

    @classmethod
    def identity(cls, modulus: int) -> "DihedralElement":
        return cls(modulus, 0, 0)

    def is_identity(self) -> bool:
        return self.reflection == 0 and self.rotation == 0

    def __mul__(self, other: "DihedralElement") -> "DihedralElement":
        if not isinstance(other, DihedralElement):
            return NotImplemented
        if self.modulus != other.modulus:
            raise ValueError("dihedral modulus mismatch")
        # (t^r1 s^a1)(t^r2 s^a2) = t^(r1+r2) s^(a2 + a1*(-1)^r2)
        rotation = other.rotation + self.rotation * (-1 if other.reflection else 1)
        return DihedralElement(self.modulus, self.reflection ^ other.reflection, rotation)

    def inverse(self) -> "DihedralElement":
        if self.reflection:
            return self
        return DihedralElement(self.modulus, 0, -self.rotation)


def dihedral_image(w: Word, m: int) -> DihedralElement:
    """Image of a rank-2 word under x -> t, y -> s in D_m."""
    if w.rank != 2:
        raise ValueError(f"dihedral image needs a rank-2 word, got rank {w.rank}")
    if m < 1:
        raise ValueError("dihedral modulus must be positive")
    t = DihedralElement(m, 1, 0)
    s = DihedralElement(m, 0, 1)
    table = {1: t, -1: t, 2: s, -2: s.inverse()}
    out = DihedralElement.identity(m)
    for letter in w.letters:
        out = out * table[letter]
    return out


def gamma_graph(m: int) -> CoreGraph:
    """The degree-m cover of the rank-2 rose described above."""
    if m < 2:
        raise ValueError(f"gamma graph needs m >= 2, got {m}")
    edges = []
    for i in range(m):
        edges.append((i, (m - i) % m, 1))
        edges.append((i, (i + 1) % m, 2))
    return CoreGraph(2, m, tuple(edges))


def hm_graph(m: int) -> tuple[CoreGraph, SpanningTree]:
    """The index-m dihedral-preimage subgroup with its preferred tree.

    The tree is the b-path v_0 -> .. -> v_{m-1}; its induced basis is
    x, t_1, .., t_{m-1}, y^m in that order.
    """
    graph = gamma_graph(m)
    tree = spanning_tree(graph, override=[(i, i + 1, 2) for i in range(m - 1)])
    return graph, tree


def subgroup_t_word(m: int, i: int) -> Word:
    """The basis word t_i = y^i x y^-(m-i) of the index-m subgroup."""
    if not 0 <= i <= m:
        raise ValueError(f"t index must be in 0..{m}, got {i}")
    return Word(2, (2,) * i + (1,) + (-2,) * (m - i))


def lm_graph(m: int) -> CoreGraph:
    """Rank-m subgroup whose intersection with a cyclic retract shows
    the retract property failing.

    For even m this is the full index-(m-1) subgroup; for odd m it is
    the proper subgroup generated by x, t_1, .., t_{m-1} (dropping y^m).
    """
    if m < 3:
        raise ValueError(f"this family needs m >= 3, got {m}")
    if m % 2 == 0:
        return hm_graph(m - 1)[0]
    generators = [Word(2, (1,))] + [subgroup_t_word(m, i) for i in range(1, m)]
    return from_generators(2, generators)


def wk_word(k: int) -> Word:
    """The visible word x[x,y]^k; reduced length 4k + 1."""
    if k < 1:
        raise ValueError(f"wk needs k >= 1, got {k}")
    a = Word(2, (1,))
    b = Word(2, (2,))
    return a * commutator(a, b) ** k


def wk_square_rewrite(m: int) -> BasisWord:
    """Closed form of wk_word(k)^2 over the preferred basis, m = 2k+1.

    Symbols: 1 is x, j+1 is t_j, m+1 is y^m.  The word is
    x^2 t_{m-1}^-1 t_{m-2} .. t_2^-1 t_1 t_{m-1} t_{m-2}^-1 .. t_2 t_1^-1.
    """
    if m < 3 or m % 2 == 0:
        raise ValueError(f"the closed form needs odd m >= 3, got {m}")
    falling = range(m - 1, 0, -1)
    first = [(j + 1) if j % 2 == 1 else -(j + 1) for j in falling]
    second = [(j + 1) if j % 2 == 0 else -(j + 1) for j in falling]
    return BasisWord((1, 1, *first, *second))
