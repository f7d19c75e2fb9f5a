"""Words and exponent tuples over k derivation generators, with their orders.

Two monoids share one element type: the free monoid (words over d1..dk,
composition = concatenation) and the free commutative monoid (exponent
tuples in N^k, composition = componentwise sum).

The canonical partial order puts b below a exactly when a = c.b for some c.
On exponent tuples this is the componentwise order.  On words we read it as
the *suffix* order: the predecessors of a word are its proper suffixes, so
d2 precedes d1 d2 while d1 (a prefix) does not.  All consumers rely on this
reading: initial sets are suffix-closed, and the minimal elements of the
complement of an initial set are words whose proper suffixes all lie in it.

The total order compares by length / total degree first and breaks ties
lexicographically: words letter by letter with d1 < d2 < ...; exponent
tuples so that a higher exponent on an earlier generator comes first
(d1^2 sorts before d1 d2).  The two tie-break conventions agree through
the abelianization word -> exponent tuple, and both are compatible with
the partial order and with translation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional

from .errors import KindMismatchError, NotInitialError

FREE = "free"
COMMUTATIVE = "commutative"


@dataclass(frozen=True)
class MonoidElem:
    """A word over d1..dk (kind 'free') or a tuple in N^k (kind 'commutative')."""

    kind: str
    k: int
    data: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in (FREE, COMMUTATIVE):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.kind == FREE:
            if any(not 1 <= g <= self.k for g in self.data):
                raise ValueError(f"word letters must lie in 1..{self.k}: {self.data}")
        else:
            if len(self.data) != self.k:
                raise ValueError(f"exponent tuple must have length {self.k}: {self.data}")
            if any(e < 0 for e in self.data):
                raise ValueError(f"exponents must be nonnegative: {self.data}")

    # ------------------------------------------------------------------
    # constructors

    @staticmethod
    def identity(kind: str, k: int) -> "MonoidElem":
        if kind == FREE:
            return MonoidElem(FREE, k, ())
        return MonoidElem(COMMUTATIVE, k, (0,) * k)

    @staticmethod
    def generator(kind: str, k: int, i: int) -> "MonoidElem":
        if kind == FREE:
            return MonoidElem(FREE, k, (i,))
        return MonoidElem(COMMUTATIVE, k, tuple(1 if j == i - 1 else 0 for j in range(k)))

    @staticmethod
    def word(k: int, letters: Iterable[int]) -> "MonoidElem":
        return MonoidElem(FREE, k, tuple(letters))

    @staticmethod
    def exponents(exps: Iterable[int]) -> "MonoidElem":
        exps = tuple(exps)
        return MonoidElem(COMMUTATIVE, len(exps), exps)

    # ------------------------------------------------------------------
    # basic structure

    @property
    def degree(self) -> int:
        """Word length, or total degree of the exponent tuple."""
        if self.kind == FREE:
            return len(self.data)
        return sum(self.data)

    @property
    def is_identity(self) -> bool:
        return self.degree == 0

    def _check_compatible(self, other: "MonoidElem") -> None:
        if self.kind != other.kind or self.k != other.k:
            raise KindMismatchError(
                f"incompatible elements: ({self.kind}, k={self.k}) vs ({other.kind}, k={other.k})"
            )

    def compose(self, other: "MonoidElem") -> "MonoidElem":
        """Concatenation for words, componentwise sum for exponent tuples."""
        self._check_compatible(other)
        if self.kind == FREE:
            return MonoidElem(FREE, self.k, self.data + other.data)
        return MonoidElem(COMMUTATIVE, self.k, tuple(a + b for a, b in zip(self.data, other.data)))

    def __mul__(self, other: "MonoidElem") -> "MonoidElem":
        return self.compose(other)

    def preceq(self, other: "MonoidElem") -> bool:
        """Canonical partial order: suffix order on words, componentwise on tuples."""
        self._check_compatible(other)
        if self.kind == FREE:
            n = len(self.data)
            return n <= len(other.data) and other.data[len(other.data) - n:] == self.data
        return all(a <= b for a, b in zip(self.data, other.data))

    def minus(self, other: "MonoidElem") -> "MonoidElem":
        """Componentwise difference self - other; requires other.preceq(self)."""
        self._check_compatible(other)
        if self.kind == FREE:
            raise KindMismatchError("difference is only defined for exponent tuples")
        if not other.preceq(self):
            raise ValueError(f"{other} does not divide {self}")
        return MonoidElem(COMMUTATIVE, self.k, tuple(a - b for a, b in zip(self.data, other.data)))

    def lub(self, other: "MonoidElem") -> "MonoidElem":
        """Componentwise maximum; least upper bounds need not exist on words."""
        self._check_compatible(other)
        if self.kind == FREE:
            raise KindMismatchError("least upper bounds are only defined for exponent tuples")
        return MonoidElem(COMMUTATIVE, self.k, tuple(max(a, b) for a, b in zip(self.data, other.data)))

    # ------------------------------------------------------------------
    # total order: degree first, then the fixed lexicographic tie-break

    @property
    def sort_key(self):
        if self.kind == FREE:
            return (self.kind, self.k, len(self.data), self.data)
        # higher exponent on an earlier generator wins "smaller"
        return (self.kind, self.k, sum(self.data), tuple(-e for e in self.data))

    def __lt__(self, other: "MonoidElem") -> bool:
        self._check_compatible(other)
        return self.sort_key < other.sort_key

    def __le__(self, other: "MonoidElem") -> bool:
        self._check_compatible(other)
        return self.sort_key <= other.sort_key

    def __gt__(self, other: "MonoidElem") -> bool:
        return not self.__le__(other)

    def __ge__(self, other: "MonoidElem") -> bool:
        return not self.__lt__(other)

    # ------------------------------------------------------------------
    # conversions

    def commutative_image(self) -> "MonoidElem":
        """Abelianization: letter counts of a word, identity on tuples."""
        if self.kind == COMMUTATIVE:
            return self
        exps = [0] * self.k
        for g in self.data:
            exps[g - 1] += 1
        return MonoidElem(COMMUTATIVE, self.k, tuple(exps))

    def canonical_word(self) -> "MonoidElem":
        """The word with non-increasing generator indices mapping onto this tuple."""
        if self.kind == FREE:
            return self
        letters = []
        for i in range(self.k, 0, -1):
            letters.extend([i] * self.data[i - 1])
        return MonoidElem(FREE, self.k, tuple(letters))

    def proper_suffixes(self) -> Iterator["MonoidElem"]:
        if self.kind != FREE:
            raise KindMismatchError("suffixes are only defined for words")
        for start in range(1, len(self.data) + 1):
            yield MonoidElem(FREE, self.k, self.data[start:])

    def immediate_predecessors(self) -> Iterator["MonoidElem"]:
        """Covers from below: drop the leftmost letter, or decrement one exponent."""
        if self.kind == FREE:
            if self.data:
                yield MonoidElem(FREE, self.k, self.data[1:])
        else:
            for i, e in enumerate(self.data):
                if e > 0:
                    yield MonoidElem(
                        COMMUTATIVE,
                        self.k,
                        self.data[:i] + (e - 1,) + self.data[i + 1:],
                    )

    # ------------------------------------------------------------------
    # text form: words as `d1 d2 d1`, tuples as `d1^2 d2`, identity as `0`

    def __str__(self) -> str:
        if self.is_identity:
            return "0"
        if self.kind == FREE:
            return " ".join(f"d{g}" for g in self.data)
        parts = []
        for i, e in enumerate(self.data, start=1):
            if e == 1:
                parts.append(f"d{i}")
            elif e > 1:
                parts.append(f"d{i}^{e}")
        return " ".join(parts)


def leq_total(a: MonoidElem, b: MonoidElem) -> int:
    """Three-way comparison in the total order: -1, 0 or 1."""
    if a < b:
        return -1
    if b < a:
        return 1
    return 0


@dataclass(frozen=True)
class InitialSet:
    """A finite downward-closed set of monoid elements (all of one kind and k)."""

    kind: str
    k: int
    elements: frozenset[MonoidElem]

    def __post_init__(self):
        for el in self.elements:
            if el.kind != self.kind or el.k != self.k:
                raise KindMismatchError(f"element {el} does not match ({self.kind}, k={self.k})")
        for el in self.elements:
            for pred in el.immediate_predecessors():
                if pred not in self.elements:
                    raise NotInitialError(f"{el} is present but its predecessor {pred} is not")

    @staticmethod
    def of(elements: Iterable[MonoidElem]) -> "InitialSet":
        elements = frozenset(elements)
        if not elements:
            raise ValueError("cannot infer kind and k from an empty set; use InitialSet directly")
        sample = next(iter(elements))
        return InitialSet(sample.kind, sample.k, elements)

    def __contains__(self, el: MonoidElem) -> bool:
        return el in self.elements

    def __iter__(self) -> Iterator[MonoidElem]:
        return iter(sorted(self.elements, key=lambda e: e.sort_key))

    def __len__(self) -> int:
        return len(self.elements)

    def maximal_elements(self) -> frozenset[MonoidElem]:
        return frozenset(
            el
            for el in self.elements
            if not any(el is not other and el.preceq(other) for other in self.elements)
        )


class MinimalLeaders(NamedTuple):
    elements: frozenset[MonoidElem]
    length_bound: Optional[int]


def antichain_minimal(elements: Iterable[MonoidElem]) -> frozenset[MonoidElem]:
    """Drop every element that strictly dominates another one in the family."""
    pool = list(elements)
    return frozenset(
        el
        for el in pool
        if not any(other != el and other.preceq(el) for other in pool)
    )


def minimal_leaders(initial: InitialSet) -> MinimalLeaders:
    """Minimal elements of the complement of a downward-closed set.

    For exponent tuples the candidates are one-generator bumps of members;
    for words they are single-letter prolongations d_i . v of members, kept
    when every proper suffix lies in the set.  Word candidates never exceed
    (longest member) + 1 letters; the bound used is reported alongside.
    """
    kind, k = initial.kind, initial.k
    identity = MonoidElem.identity(kind, k)
    if identity not in initial.elements:
        # only the empty set lacks the identity; its complement is everything
        bound = 0 if kind == FREE else None
        return MinimalLeaders(frozenset([identity]), bound)

    gens = [MonoidElem.generator(kind, k, i) for i in range(1, k + 1)]
    candidates = {
        g.compose(v)
        for v in initial.elements
        for g in gens
        if g.compose(v) not in initial.elements
    }
    if kind == FREE:
        bound = max(el.degree for el in initial.elements) + 1
        candidates = {
            w
            for w in candidates
            if all(s in initial.elements for s in w.proper_suffixes())
        }
        return MinimalLeaders(antichain_minimal(candidates), bound)
    return MinimalLeaders(antichain_minimal(candidates), None)


def theta_ball(k: int, degree: int) -> list[MonoidElem]:
    """All exponent tuples of total degree <= degree, in increasing total order."""
    out = []
    for total in range(degree + 1):
        for cuts in itertools.combinations(range(total + k - 1), k - 1):
            prev = -1
            exps = []
            for c in cuts:
                exps.append(c - prev - 1)
                prev = c
            exps.append(total + k - 2 - prev)
            out.append(MonoidElem(COMMUTATIVE, k, tuple(exps)))
    return sorted(out, key=lambda e: e.sort_key)


def gamma_ball(k: int, length: int) -> list[MonoidElem]:
    """All words of length <= length, in increasing total order."""
    out = []
    for n in range(length + 1):
        for letters in itertools.product(range(1, k + 1), repeat=n):
            out.append(MonoidElem(FREE, k, letters))
    return sorted(out, key=lambda e: e.sort_key)
