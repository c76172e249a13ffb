"""Words in a finitely generated free group.

A word is a freely reduced sequence of signed generator indices: letter
``i`` (1-based) is the i-th generator and ``-i`` its formal inverse.
The text form writes generator i as the i-th lowercase ASCII letter and
its inverse as the matching uppercase letter, which caps the rank at 26.

All operations return freely reduced words.  Exponent arithmetic is
checked against the signed 64-bit range so that an overflow fails loudly
instead of silently promoting.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_RANK = 26

_INT64_MIN = -(2**63)
_INT64_MAX = 2**63 - 1


class ParseError(ValueError):
    """Malformed word expression; ``position`` is the 0-based offset."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


def checked_int64(value: int) -> int:
    """Return ``value`` unchanged, raising if it left the int64 range."""
    if value < _INT64_MIN or value > _INT64_MAX:
        raise OverflowError("integer arithmetic left the signed 64-bit range")
    return value


def add_vectors(u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
    """Componentwise checked sum of two equal-length integer vectors."""
    if len(u) != len(v):
        raise ValueError(f"vector length mismatch: {len(u)} != {len(v)}")
    return tuple(checked_int64(a + b) for a, b in zip(u, v))


@dataclass(frozen=True)
class Word:
    """A freely reduced word in the free group of the given rank.

    Instances are immutable values; group operations produce new words.
    The constructor rejects unreduced letter sequences -- use
    :func:`reduce_word` to build a word from raw letters.
    """

    rank: int
    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 1 <= self.rank <= MAX_RANK:
            raise ValueError(f"rank must be in 1..{MAX_RANK}, got {self.rank}")
        previous = 0
        for letter in self.letters:
            if letter == 0 or abs(letter) > self.rank:
                raise ValueError(
                    f"letter {letter} outside alphabet of rank {self.rank}"
                )
            if letter == -previous:
                raise ValueError("letter sequence is not freely reduced")
            previous = letter

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __str__(self) -> str:
        return render_word(self)

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} != {other.rank}")
        head = list(self.letters)
        tail = other.letters
        cut = 0
        while head and cut < len(tail) and head[-1] == -tail[cut]:
            head.pop()
            cut += 1
        return Word(self.rank, tuple(head) + tail[cut:])

    def inverse(self) -> "Word":
        return Word(self.rank, tuple(-l for l in reversed(self.letters)))

    def __pow__(self, exponent: int) -> "Word":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = identity(self.rank)
        square = self
        k = exponent
        while k:
            if k & 1:
                result = result * square
            k >>= 1
            if k:
                square = square * square
        return result


def identity(rank: int) -> Word:
    return Word(rank)


def reduce_word(rank: int, letters: Iterable[int]) -> Word:
    """Freely reduce a raw letter sequence into a :class:`Word`.

    Idempotent and length-nonincreasing; raises on letters outside the
    alphabet (zero or beyond the rank).
    """
    stack: list[int] = []
    for letter in letters:
        if letter == 0 or abs(letter) > rank:
            raise ValueError(f"letter {letter} outside alphabet of rank {rank}")
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return Word(rank, tuple(stack))


def commutator(u: Word, v: Word) -> Word:
    """u v u^-1 v^-1, freely reduced."""
    return u * v * u.inverse() * v.inverse()


def with_rank(w: Word, rank: int) -> Word:
    """The same word viewed in a free group of another rank."""
    return Word(rank, w.letters)


def exponent_sums(w: Word) -> tuple[int, ...]:
    """Exponent-sum vector of ``w`` over the ambient generators.

    Entry i-1 is the signed number of occurrences of generator i; the
    map is a homomorphism onto the rank-n integer lattice.
    """
    counts = [0] * w.rank
    for letter in w.letters:
        i = abs(letter) - 1
        counts[i] = checked_int64(counts[i] + (1 if letter > 0 else -1))
    return tuple(counts)


def substitute(w: Word, images: Sequence[Word], rank: int) -> Word:
    """Apply the homomorphism generator i -> images[i-1] to ``w``.

    All image words must live in the free group of the target ``rank``.
    """
    if len(images) != w.rank:
        raise ValueError(f"expected {w.rank} images, got {len(images)}")
    out = identity(rank)
    for letter in w.letters:
        image = images[abs(letter) - 1]
        if image.rank != rank:
            raise ValueError("image word has the wrong rank")
        out = out * (image if letter > 0 else image.inverse())
    return out


def render_word(w: Word) -> str:
    """Canonical text form: one ASCII letter per reduced letter."""
    return "".join(
        string.ascii_lowercase[l - 1] if l > 0 else string.ascii_uppercase[-l - 1]
        for l in w.letters
    )


def parse_word(text: str, rank: int) -> Word:
    """Parse a word expression into a reduced :class:`Word`.

    Grammar::

        expr   := term { term }
        term   := atom [ '^' int ]
        atom   := letter | '[' expr ',' expr ']' | '(' expr ')'
        letter := 'a'..'z' | 'A'..'Z'
        int    := ['-'] digit { digit }

    Lowercase letter at alphabet position i denotes generator i,
    uppercase its inverse; ``[u,v]`` is the commutator.  Whitespace is
    ignored, and empty input denotes the identity.
    """
    if not 1 <= rank <= MAX_RANK:
        raise ValueError(f"rank must be in 1..{MAX_RANK}, got {rank}")
    return _Parser(text, rank).parse()


class _Parser:
    def __init__(self, text: str, rank: int) -> None:
        self.text = text
        self.rank = rank
        self.pos = 0

    def parse(self) -> Word:
        word = self._expr(required=False)
        self._skip_space()
        if self.pos != len(self.text):
            self._fail(f"unexpected character {self.text[self.pos]!r}")
        return word

    def _fail(self, message: str) -> None:
        raise ParseError(message, self.pos)

    def _skip_space(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str | None:
        self._skip_space()
        if self.pos < len(self.text):
            return self.text[self.pos]
        return None

    def _expect(self, char: str) -> None:
        if self._peek() != char:
            self._fail(f"expected {char!r}")
        self.pos += 1

    def _expr(self, required: bool = True) -> Word:
        word = identity(self.rank)
        count = 0
        while True:
            ch = self._peek()
            if ch is None or ch in ",])":
                break
            word = word * self._term()
            count += 1
        if required and count == 0:
            self._fail("expected a word")
        return word

    def _term(self) -> Word:
        atom = self._atom()
        if self._peek() == "^":
            self.pos += 1
            return atom ** self._integer()
        return atom

    def _atom(self) -> Word:
        ch = self._peek()
        if ch is None:
            self._fail("expected a letter, '[' or '('")
        if ch == "(":
            self.pos += 1
            word = self._expr()
            self._expect(")")
            return word
        if ch == "[":
            self.pos += 1
            left = self._expr()
            self._expect(",")
            right = self._expr()
            self._expect("]")
            return commutator(left, right)
        if ch.isascii() and ch.isalpha():
            index = (ord(ch.lower()) - ord("a")) + 1
            if index > self.rank:
                self._fail(f"letter {ch!r} beyond rank {self.rank}")
            self.pos += 1
            return Word(self.rank, (index if ch.islower() else -index,))
        self._fail(f"unexpected character {ch!r}")
        raise AssertionError("unreachable")

    def _integer(self) -> int:
        self._skip_space()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            self.pos = start
            self._fail("expected an integer exponent")
        return int(self.text[start : self.pos])
