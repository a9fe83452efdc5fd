"""Generator alphabets, words over them, and the marked-group interface.

A marked group is a group together with an ordered finite generating
alphabet.  Elements are immutable values (normal-form tuples); the only
required group operation is right multiplication by a single generator,
which is all that breadth-first exploration of the Cayley graph needs.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any

# A letter is (generator index, sign), sign in {+1, -1}.
Letter = tuple[int, int]


class DeadendError(Exception):
    """Base class for every error raised by this package."""


class UnknownLetter(DeadendError):
    """Letter index or token not covered by the alphabet."""


class OutOfBox(DeadendError):
    """Argument lies outside the validity box of a construction."""


@dataclass(frozen=True)
class GenAlphabet:
    """Ordered generating alphabet. Tokens render inverses with a '-' suffix."""

    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise UnknownLetter("duplicate generator names: %r" % (self.names,))

    @property
    def size(self) -> int:
        return len(self.names)

    def signed_letters(self) -> tuple[Letter, ...]:
        """All letters in canonical order: (0,+1), (0,-1), (1,+1), ..."""
        out = []
        for i in range(len(self.names)):
            out.append((i, 1))
            out.append((i, -1))
        return tuple(out)

    def check(self, letter: Letter) -> Letter:
        i, s = letter
        if not (0 <= i < len(self.names)) or s not in (1, -1):
            raise UnknownLetter("letter %r not in alphabet %r" % (letter, self.names))
        return letter

    @staticmethod
    def inverse(letter: Letter) -> Letter:
        i, s = letter
        return (i, -s)

    def token(self, letter: Letter) -> str:
        i, s = self.check(letter)
        return self.names[i] if s == 1 else self.names[i] + "-"

    def letter(self, token: str) -> Letter:
        sign = 1
        if token.endswith("-"):
            sign = -1
            token = token[:-1]
        try:
            return (self.names.index(token), sign)
        except ValueError:
            raise UnknownLetter("token %r not in alphabet %r" % (token, self.names)) from None


@dataclass(frozen=True)
class Word:
    """Immutable word over an alphabet, stored as a tuple of letters."""

    letters: tuple[Letter, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((i, -s) for (i, s) in reversed(self.letters)))

    def free_reduce(self) -> "Word":
        """Cancel adjacent inverse pairs until none remain."""
        stack: list[Letter] = []
        for lt in self.letters:
            if stack and stack[-1] == (lt[0], -lt[1]):
                stack.pop()
            else:
                stack.append(lt)
        return Word(tuple(stack))

    def render(self, alphabet: GenAlphabet) -> str:
        return " ".join(alphabet.token(lt) for lt in self.letters)

    @classmethod
    def parse(cls, text: str, alphabet: GenAlphabet) -> "Word":
        return cls(tuple(alphabet.letter(tok) for tok in text.split()))

    @classmethod
    def from_runs(cls, *runs: tuple[Letter, int]) -> "Word":
        """Build a word from (letter, count) runs; negative count flips the sign."""
        letters: list[Letter] = []
        for (i, s), count in runs:
            if count < 0:
                s, count = -s, -count
            letters.extend([(i, s)] * count)
        return cls(tuple(letters))


class MarkedGroup(ABC):
    """A group marked with a generating alphabet.

    Elements are hashable immutable values.  `key` returns the canonical
    dictionary key for an element (the normal-form tuple itself unless a
    subclass overrides it).
    """

    alphabet: GenAlphabet

    @property
    @abstractmethod
    def identity(self) -> Any:
        ...

    @abstractmethod
    def apply_letter(self, element: Any, letter: Letter) -> Any:
        """Right-multiply element by the generator (or inverse) named by letter."""

    def key(self, element: Any) -> Any:
        return element

    def letter_weight(self, letter: Letter) -> int:
        return 1

    @property
    def is_weighted(self) -> bool:
        return any(self.letter_weight(lt) != 1 for lt in self.alphabet.signed_letters())

    def render(self, element: Any) -> str:
        return repr(element)

    def evaluate(self, word: Word) -> Any:
        e = self.identity
        for lt in word.letters:
            self.alphabet.check(lt)
            e = self.apply_letter(e, lt)
        return e

    def word_weight(self, word: Word) -> int:
        return sum(self.letter_weight(lt) for lt in word.letters)


def evaluate(group: MarkedGroup, word: Word) -> Any:
    """Image of a word in the marked group."""
    return group.evaluate(word)


def word_inverse(word: Word) -> Word:
    """Formal inverse: reverse the letters and flip every sign."""
    return word.inverse()
