"""
Real Roots and Walls
Real roots as integer vectors, the half-apartments D(alpha) they bound, and
the wall-relation trichotomy: crossing, nested (one empty quadrant) or
opposite. Chamber convention: wC lies in D(alpha) iff w^-1(alpha) > 0.
"""

import logging
from enum import Enum
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from cartan import GeneralizedCartanMatrix
from weyl import WeylElement, WeylGroup, create_weyl_group

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]
Quadrant = Tuple[int, int]

ALL_QUADRANTS: Tuple[Quadrant, ...] = ((1, 1), (1, -1), (-1, 1), (-1, -1))
MAX_CROSSING_ORDER = 6


class RootError(ValueError):
    """Vector is not a real root, or a root-level precondition fails."""


class InconclusiveError(RuntimeError):
    """A bounded search ran out of budget before a certified answer."""

    def __init__(self, message: str, stage: str, cap: int):
        self.stage = stage
        self.cap = cap
        super().__init__(f"{stage}: {message} (cap={cap})")


def _check_sign_coherent(vector: Vector, what: str) -> None:
    if all(x == 0 for x in vector):
        raise RootError(f"{what} must be non-zero")
    if any(x > 0 for x in vector) and any(x < 0 for x in vector):
        raise RootError(f"{what} {list(vector)} mixes signs")


def quadrant_text(quadrant: Quadrant) -> str:
    return "(" + ",".join("+" if s > 0 else "-" for s in quadrant) + ")"


@dataclass(frozen=True)
class Root:
    """Real root in the basis of simple roots."""

    vector: Vector

    def __post_init__(self):
        vector = tuple(int(x) for x in self.vector)
        object.__setattr__(self, "vector", vector)
        _check_sign_coherent(vector, "root")

    def __neg__(self) -> "Root":
        return Root(tuple(-x for x in self.vector))

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.vector)

    @property
    def is_positive(self) -> bool:
        return all(x >= 0 for x in self.vector)

    @property
    def height(self) -> int:
        return sum(self.vector)

    def positive(self) -> "Root":
        return self if self.is_positive else -self

    def to_list(self) -> List[int]:
        return list(self.vector)


@dataclass(frozen=True)
class Coroot:
    """Real coroot in the basis of simple coroots."""

    vector: Vector

    def __post_init__(self):
        vector = tuple(int(x) for x in self.vector)
        object.__setattr__(self, "vector", vector)
        _check_sign_coherent(vector, "coroot")

    def __neg__(self) -> "Coroot":
        return Coroot(tuple(-x for x in self.vector))


class WallKind(str, Enum):
    EQUAL = "equal"
    OPPOSITE = "opposite"
    CROSSING = "crossing"
    NESTED = "nested"


@dataclass(frozen=True)
class WallRelation:
    kind: WallKind
    empty_quadrant: Optional[Quadrant] = None
    # quadrant -> shortlex word of a chamber witnessing it (0-based)
    witnesses: Dict[Quadrant, Tuple[int, ...]] = field(default_factory=dict, compare=False)
    radius_used: int = 0

    def __post_init__(self):
        if (self.kind == WallKind.NESTED) != (self.empty_quadrant is not None):
            raise ValueError("a Nested relation carries exactly one empty quadrant")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "empty_quadrant": quadrant_text(self.empty_quadrant) if self.empty_quadrant else None,
        }


def parse_root(text: str, rank: int) -> Root:
    """
    Parse a root literal such as "1,1,0".

    Raises:
        RootError: wrong arity, non-integer coordinates or mixed signs
    """
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != rank:
        raise RootError(f"root literal has {len(parts)} coordinates, expected {rank}")
    try:
        vector = tuple(int(p) for p in parts)
    except ValueError:
        raise RootError(f"root literal {text!r} has a non-integer coordinate")
    return Root(vector)


class _CayleyBallCache:
    """Shortlex Cayley ball grown one length level at a time, on demand."""

    def __init__(self, group: WeylGroup):
        self.group = group
        identity = group.identity()
        self.elements: List[WeylElement] = [identity]
        self.level_ends: List[int] = [1]
        self.seen = {identity.matrix}
        self.complete = False

    def _grow(self) -> None:
        start = self.level_ends[-2] if len(self.level_ends) > 1 else 0
        frontier = self.elements[start:self.level_ends[-1]]
        for u in frontier:
            for i in range(self.group.rank):
                v = self.group.right_multiply_generator(u, i)
                if v.matrix not in self.seen:
                    self.seen.add(v.matrix)
                    self.elements.append(v)
        if len(self.elements) == self.level_ends[-1]:
            self.complete = True
        self.level_ends.append(len(self.elements))

    def level(self, length: int) -> List[WeylElement]:
        while len(self.level_ends) <= length and not self.complete:
            self._grow()
        if length >= len(self.level_ends):
            return []
        start = self.level_ends[length - 1] if length > 0 else 0
        return self.elements[start:self.level_ends[length]]

    def iterate(self, radius: int) -> Iterator[WeylElement]:
        for length in range(radius + 1):
            elements = self.level(length)
            if not elements:
                return
            yield from elements


class RootSystem:
    """
    Real roots of a GCM with their reflections, coroots and wall relations.

    Args:
        cartan: generalized Cartan matrix
        group: optional pre-built Weyl group for the same matrix
    """

    def __init__(self, cartan: GeneralizedCartanMatrix, group: Optional[WeylGroup] = None):
        self.cartan = cartan
        self.rank = cartan.n
        self.group = group or create_weyl_group(cartan)
        self.dual_group = create_weyl_group(cartan.transpose())
        self._cartan_array = np.array(cartan.entries, dtype=object)
        self._ball = _CayleyBallCache(self.group)

    # ------------------------------------------------------------------
    # Basic action
    # ------------------------------------------------------------------

    def simple_root(self, i: int) -> Root:
        return Root(tuple(1 if k == i else 0 for k in range(self.rank)))

    def act(self, w: WeylElement, alpha: Root) -> Root:
        return Root(w.apply(alpha.vector))

    def _coroot_pairings(self, vector: Sequence[int]) -> List[int]:
        """<v, alpha_i^vee> for every i, i.e. A v."""
        return [int(x) for x in self._cartan_array.dot(np.array(vector, dtype=object))]

    def locate(self, alpha: Root) -> Tuple[Tuple[int, ...], int]:
        """
        Find (u, j) with alpha^+ = u(alpha_j), by height descent.

        Raises:
            RootError: the vector is not a real root
        """
        beta = list(alpha.positive().vector)
        word: List[int] = []
        while sum(beta) > 1:
            pairings = self._coroot_pairings(beta)
            descent = next((i for i in range(self.rank) if pairings[i] > 0), None)
            if descent is None:
                raise RootError(f"{alpha} is not a real root")
            beta[descent] -= pairings[descent]
            if any(x < 0 for x in beta):
                raise RootError(f"{alpha} is not a real root")
            word.append(descent)
        if sum(beta) != 1:
            raise RootError(f"{alpha} is not a real root")
        return tuple(word), beta.index(1)

    def is_real_root(self, vector: Sequence[int]) -> bool:
        try:
            self.locate(Root(tuple(vector)))
        except RootError:
            return False
        return True

    def root(self, vector: Sequence[int]) -> Root:
        """Validated real root."""
        candidate = Root(tuple(vector))
        self.locate(candidate)
        return candidate

    def reflection_of(self, alpha: Root) -> WeylElement:
        """r_alpha = u s_j u^-1 for alpha = +-u(alpha_j)."""
        word, j = self.locate(alpha)
        return self.group.element(word + (j,) + tuple(reversed(word)))

    def coroot(self, alpha: Root) -> Coroot:
        word, j = self.locate(alpha)
        simple = tuple(1 if k == j else 0 for k in range(self.rank))
        vector = self.dual_group.element(word).apply(simple)
        coroot = Coroot(vector)
        return coroot if alpha.is_positive else -coroot

    def pairing(self, alpha: Root, beta: Root) -> int:
        """<alpha, beta^vee>."""
        coroot = self.coroot(beta).vector
        return sum(c * p for c, p in zip(coroot, self._coroot_pairings(alpha.vector)))

    def side(self, alpha: Root, w: WeylElement) -> int:
        """+1 iff the chamber wC lies in D(alpha)."""
        image = self.group.invert(w).apply(alpha.vector)
        return 1 if all(x >= 0 for x in image) else -1

    # ------------------------------------------------------------------
    # Walls
    # ------------------------------------------------------------------

    def walls_cross(self, alpha: Root, beta: Root) -> bool:
        """
        Distinct walls cross iff r_alpha r_beta has finite order (at most 6).

        Raises:
            RootError: alpha = +-beta
        """
        if alpha == beta or alpha == -beta:
            raise RootError(f"walls_cross needs distinct non-opposite roots, got {alpha} and {beta}")

        p = self.pairing(alpha, beta) * self.pairing(beta, alpha)
        by_pairing = 0 <= p <= 3

        product = self.group.multiply(self.reflection_of(alpha), self.reflection_of(beta))
        identity = self.group.identity().matrix
        by_order = False
        power = product
        for _ in range(MAX_CROSSING_ORDER):
            if power.matrix == identity:
                by_order = True
                break
            power = self.group.multiply(power, product)

        if by_pairing != by_order:
            logger.error(f"❌ Crossing tests disagree for {alpha} / {beta}: p={p}, finite order={by_order}")
            raise RuntimeError(f"crossing criteria disagree for roots {alpha} and {beta}")
        return by_order

    def _scan_quadrants(
        self,
        alpha: Root,
        beta: Root,
        radius_cap: int,
        stop_on_positive: bool = False,
        centers: Sequence[WeylElement] = (),
    ) -> Dict[Quadrant, Tuple[int, ...]]:
        """
        Record sign pairs (side(alpha, x), side(beta, x)) over chambers x.

        Chambers are x = v u^-1 for v the identity or one of `centers` and u
        in the Cayley ball, scanned length level by length level; then
        side(alpha, x) is the sign of u(v^-1 alpha). Stops at three quadrants,
        or at (+,+) when stop_on_positive is set.
        """
        frames = []
        for v in (self.group.identity(), *centers):
            inverse = self.group.invert(v)
            frames.append((v.word, inverse.apply(alpha.vector), inverse.apply(beta.vector)))

        observed: Dict[Quadrant, Tuple[int, ...]] = {}
        for length in range(radius_cap + 1):
            elements = self._ball.level(length)
            if not elements:
                break
            for prefix, a, b in frames:
                for u in elements:
                    ua = u.apply(a)
                    ub = u.apply(b)
                    quadrant = (1 if all(x >= 0 for x in ua) else -1, 1 if all(x >= 0 for x in ub) else -1)
                    if quadrant in observed:
                        continue
                    observed[quadrant] = prefix + tuple(reversed(u.word))
                    if stop_on_positive and quadrant == (1, 1):
                        return observed
                    if len(observed) >= 3:
                        return observed
        return observed

    def wall_relation(
        self,
        alpha: Root,
        beta: Root,
        radius_cap: int = 12,
        centers: Sequence[WeylElement] = (),
    ) -> WallRelation:
        """
        Classify the relative position of two walls.

        Args:
            alpha, beta: real roots
            radius_cap: Cayley-ball radius of the witness search
            centers: extra chambers to search around besides the base chamber

        Raises:
            InconclusiveError: fewer than three quadrants witnessed within the cap
        """
        if alpha == beta:
            return WallRelation(WallKind.EQUAL)
        if alpha == -beta:
            return WallRelation(WallKind.OPPOSITE)
        if self.walls_cross(alpha, beta):
            return WallRelation(WallKind.CROSSING)

        observed = self._scan_quadrants(alpha, beta, radius_cap, centers=centers)
        if len(observed) < 3:
            raise InconclusiveError(
                f"only {len(observed)} quadrants witnessed for {alpha} / {beta}",
                stage="wall_relation",
                cap=radius_cap,
            )
        empty = next(q for q in ALL_QUADRANTS if q not in observed)
        return WallRelation(WallKind.NESTED, empty, observed, radius_cap)

    def disjoint(
        self,
        alpha: Root,
        beta: Root,
        radius_cap: int = 12,
        centers: Sequence[WeylElement] = (),
    ) -> bool:
        """
        True iff D(alpha) and D(beta) share no chamber (Nested with empty (+,+)).

        Raises:
            InconclusiveError: undecided within the cap
        """
        if alpha == beta or alpha == -beta:
            return False
        if self.walls_cross(alpha, beta):
            return False
        observed = self._scan_quadrants(alpha, beta, radius_cap, stop_on_positive=True, centers=centers)
        if (1, 1) in observed:
            return False
        if len(observed) < 3:
            raise InconclusiveError(
                f"only {len(observed)} quadrants witnessed for {alpha} / {beta}",
                stage="disjoint",
                cap=radius_cap,
            )
        return True

    # ------------------------------------------------------------------
    # Enumeration
    # ------------------------------------------------------------------

    def iter_real_roots(self, orbit_cap: int) -> Iterator[Root]:
        """Orbits of the simple roots under words of length <= orbit_cap, first-seen order."""
        seen = set()
        for u in self._ball.iterate(orbit_cap):
            for i in range(self.rank):
                vector = tuple(int(x) for x in u.array[:, i])
                if vector not in seen:
                    seen.add(vector)
                    yield Root(vector)

    def real_roots(self, orbit_cap: int) -> List[Root]:
        return list(self.iter_real_roots(orbit_cap))

    def cayley_ball(self, radius: int) -> List[WeylElement]:
        """Shared shortlex ball (cached across calls)."""
        return list(self._ball.iterate(radius))


def create_root_system(cartan: GeneralizedCartanMatrix, group: Optional[WeylGroup] = None) -> RootSystem:
    """Factory function to create a RootSystem."""
    return RootSystem(cartan, group)
