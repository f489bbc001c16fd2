"""
Weyl Group Arithmetic
Exact arithmetic in the Weyl group of a GCM through its integer action on the
root lattice: equality, length, reduced words, inversion sets, order and the
elliptic/hyperbolic dichotomy.

Convention: s_i(alpha_j) = alpha_j - A[i][j] * alpha_i, column vectors in the
basis of simple roots. A word (i_1, ..., i_l) denotes s_{i_1} ... s_{i_l}.
"""

import math
import random
import logging
from collections import deque
from enum import Enum
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy import totient

from cartan import GeneralizedCartanMatrix

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple[int, ...], ...]
Vector = Tuple[int, ...]


class WordError(ValueError):
    """Bad word syntax or generator index out of range."""


class IsometryType(str, Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"


def _freeze(array: np.ndarray) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in array)


def _thaw(matrix: Matrix) -> np.ndarray:
    return np.array(matrix, dtype=object)


@dataclass(frozen=True, eq=False)
class WeylElement:
    """
    Element of W with the word it was built from and its lattice matrix.

    Equality and hashing use the matrix only (the representation is faithful).
    """

    word: Tuple[int, ...]
    matrix: Matrix

    def __eq__(self, other) -> bool:
        return isinstance(other, WeylElement) and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    @cached_property
    def array(self) -> np.ndarray:
        return _thaw(self.matrix)

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @property
    def is_identity(self) -> bool:
        n = self.rank
        return all(self.matrix[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))

    def apply(self, vector: Sequence[int]) -> Vector:
        return tuple(int(x) for x in self.array.dot(np.array(vector, dtype=object)))

    def word_text(self) -> str:
        """1-based textual word, e.g. "1 2 1"."""
        return " ".join(str(i + 1) for i in self.word)


@dataclass(frozen=True)
class InversionSet:
    """N(w) = {alpha > 0 : w(alpha) < 0}, listed in reduced-word order."""

    vectors: Tuple[Vector, ...]

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, vector) -> bool:
        return tuple(vector) in set(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def as_set(self) -> frozenset:
        return frozenset(self.vectors)


@lru_cache(maxsize=None)
def finite_order_bound(n: int) -> int:
    """
    Largest finite order of an n x n integer matrix.

    B(n) = max lcm(m_1..m_r) over sets with sum of totients <= n.
    """
    if n < 1:
        return 1
    # totient(m) >= sqrt(m / 2), so every usable m is at most 2 n^2
    candidates = [m for m in range(2, 2 * n * n + 3) if int(totient(m)) <= n]
    reachable = {0: {1}}
    for m in candidates:
        cost = int(totient(m))
        updates = {}
        for used, orders in reachable.items():
            total = used + cost
            if total > n:
                continue
            updates.setdefault(total, set()).update(math.lcm(k, m) for k in orders)
        for total, orders in updates.items():
            reachable.setdefault(total, set()).update(orders)
    return max(max(orders) for orders in reachable.values())


def parse_word(text: str, rank: int) -> Tuple[int, ...]:
    """
    Parse whitespace-separated 1-based generator indices into a 0-based word.

    Raises:
        WordError: non-integer token or index outside 1..rank
    """
    word = []
    for position, token in enumerate(text.split(), start=1):
        try:
            index = int(token)
        except ValueError:
            raise WordError(f"token {position} ({token!r}) is not an integer")
        if not 1 <= index <= rank:
            raise WordError(f"generator index {index} at position {position} out of range 1..{rank}")
        word.append(index - 1)
    return tuple(word)


class WeylGroup:
    """
    Weyl group W(A) acting on the root lattice of a GCM.

    Args:
        cartan: generalized Cartan matrix
    """

    def __init__(self, cartan: GeneralizedCartanMatrix):
        self.cartan = cartan
        self.rank = cartan.n
        self._generator_arrays = [self._generator_array(i) for i in range(self.rank)]
        self._identity = np.identity(self.rank, dtype=int).astype(object)

    def _generator_array(self, i: int) -> np.ndarray:
        n = self.rank
        array = np.identity(n, dtype=int).astype(object)
        for j in range(n):
            array[i, j] = (1 if i == j else 0) - self.cartan.entries[i][j]
        return array

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.rank:
            raise WordError(f"generator index {i} out of range 0..{self.rank - 1}")

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    def identity(self) -> WeylElement:
        return WeylElement((), _freeze(self._identity))

    def generator(self, i: int) -> WeylElement:
        self._check_index(i)
        return WeylElement((i,), _freeze(self._generator_arrays[i]))

    def element(self, word: Sequence[int]) -> WeylElement:
        word = tuple(word)
        array = self._identity
        for i in word:
            self._check_index(i)
            array = array.dot(self._generator_arrays[i])
        return WeylElement(word, _freeze(array))

    def parse(self, text: str) -> WeylElement:
        return self.element(parse_word(text, self.rank))

    def multiply(self, u: WeylElement, v: WeylElement) -> WeylElement:
        return WeylElement(u.word + v.word, _freeze(u.array.dot(v.array)))

    def invert(self, u: WeylElement) -> WeylElement:
        return self.element(tuple(reversed(u.word)))

    def power(self, u: WeylElement, k: int) -> WeylElement:
        if k < 0:
            return self.power(self.invert(u), -k)
        array = self._identity
        for _ in range(k):
            array = array.dot(u.array)
        return WeylElement(u.word * k, _freeze(array))

    def conjugate(self, u: WeylElement, w: WeylElement) -> WeylElement:
        """u w u^-1."""
        return self.multiply(self.multiply(u, w), self.invert(u))

    def right_multiply_generator(self, u: WeylElement, i: int) -> WeylElement:
        return WeylElement(u.word + (i,), _freeze(u.array.dot(self._generator_arrays[i])))

    # ------------------------------------------------------------------
    # Length and normal forms
    # ------------------------------------------------------------------

    def _smallest_right_descent(self, array: np.ndarray) -> Optional[int]:
        for i in range(self.rank):
            column = array[:, i]
            if all(x <= 0 for x in column):
                return i
        return None

    def reduced_word(self, w: WeylElement) -> Tuple[int, ...]:
        """Canonical reduced word by smallest-right-descent peeling."""
        array = w.array
        peeled = []
        while not np.array_equal(array, self._identity):
            i = self._smallest_right_descent(array)
            if i is None:
                raise RuntimeError(f"no right descent found for a non-identity element {w.word_text()!r}")
            peeled.append(i)
            array = array.dot(self._generator_arrays[i])
        return tuple(reversed(peeled))

    def length(self, w: WeylElement) -> int:
        return len(self.reduced_word(w))

    def normal_form(self, w: WeylElement) -> WeylElement:
        return WeylElement(self.reduced_word(w), w.matrix)

    def inversion_set(self, w: WeylElement) -> InversionSet:
        word = self.reduced_word(w)
        accumulated = self._identity
        vectors = []
        for i in reversed(word):
            vectors.append(tuple(int(x) for x in accumulated[:, i]))
            accumulated = accumulated.dot(self._generator_arrays[i])
        vectors.reverse()
        return InversionSet(tuple(vectors))

    # ------------------------------------------------------------------
    # Order and isometry type
    # ------------------------------------------------------------------

    def order(self, w: WeylElement) -> Optional[int]:
        """
        Order of w, or None when it is infinite.

        Only powers up to finite_order_bound(rank) need checking.
        """
        bound = finite_order_bound(self.rank)
        array = w.array
        for k in range(1, bound + 1):
            if np.array_equal(array, self._identity):
                return k
            array = array.dot(w.array)
        return None

    def classify_isometry(self, w: WeylElement) -> IsometryType:
        if self.order(w) is None:
            return IsometryType.HYPERBOLIC
        return IsometryType.ELLIPTIC

    def is_hyperbolic(self, w: WeylElement) -> bool:
        return self.classify_isometry(w) == IsometryType.HYPERBOLIC

    def coxeter_element(self) -> WeylElement:
        return self.element(tuple(range(self.rank)))

    def has_hyperbolic_element(self) -> bool:
        """Non-spherical types contain hyperbolic elements; the Coxeter element is one."""
        return self.is_hyperbolic(self.coxeter_element())

    # ------------------------------------------------------------------
    # Enumeration
    # ------------------------------------------------------------------

    def iter_cayley_ball(self, radius: int) -> Iterator[WeylElement]:
        """
        Elements of length <= radius in shortlex order of their minimal words.

        Each element is yielded once, with its shortlex-least reduced word.
        """
        seen = {self.identity().matrix}
        level = [self.identity()]
        yield level[0]
        for _ in range(radius):
            next_level = []
            for u in level:
                for i in range(self.rank):
                    v = self.right_multiply_generator(u, i)
                    if v.matrix in seen:
                        continue
                    seen.add(v.matrix)
                    next_level.append(v)
                    yield v
            if not next_level:
                return
            level = next_level

    def cayley_ball(self, radius: int, cap: Optional[int] = None) -> List[WeylElement]:
        ball = []
        for element in self.iter_cayley_ball(radius):
            ball.append(element)
            if cap is not None and len(ball) >= cap:
                logger.debug(f"Cayley ball truncated at {cap} elements")
                break
        return ball

    def enumerate_group(self, cap: int = 100_000) -> Optional[List[WeylElement]]:
        """All of W when it has at most `cap` elements, else None."""
        elements = []
        queue = deque([self.identity()])
        seen = {self.identity().matrix}
        while queue:
            u = queue.popleft()
            elements.append(u)
            if len(elements) > cap:
                return None
            for i in range(self.rank):
                v = self.right_multiply_generator(u, i)
                if v.matrix not in seen:
                    seen.add(v.matrix)
                    queue.append(v)
        return elements

    # ------------------------------------------------------------------
    # Sampling
    # ------------------------------------------------------------------

    def random_word(self, length: int, rng: random.Random) -> Tuple[int, ...]:
        """Random word without consecutive repeated letters."""
        word: List[int] = []
        while len(word) < length:
            i = rng.randrange(self.rank)
            if word and word[-1] == i:
                continue
            word.append(i)
        return tuple(word)

    def random_hyperbolic_word(
        self,
        rng: random.Random,
        max_length: int = 10,
        attempts: int = 500,
    ) -> Optional[Tuple[int, ...]]:
        """Sample words of length 2..max_length until one is hyperbolic."""
        for _ in range(attempts):
            word = self.random_word(rng.randint(2, max_length), rng)
            if self.is_hyperbolic(self.element(word)):
                return word
        logger.warning(f"⚠️  No hyperbolic word found in {attempts} attempts for rank {self.rank}")
        return None


def create_weyl_group(cartan: GeneralizedCartanMatrix) -> WeylGroup:
    """Factory function to create a WeylGroup."""
    return WeylGroup(cartan)
