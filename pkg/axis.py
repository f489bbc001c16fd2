"""
Axis of a Hyperbolic Weyl Element
Walls crossed by the axis of a hyperbolic element and which half-apartments
eventually contain its two ends (+xi forward, -xi backward).
"""

import math
import logging
from enum import Enum
from dataclasses import dataclass
from typing import List, Optional, Tuple

from cartan import CoxeterKind, classify_type, coxeter_matrix
from roots import InconclusiveError, Root, RootSystem
from settings import SearchCaps, get_default_caps
from weyl import WeylElement

logger = logging.getLogger(__name__)

MIN_POWER_CAP = 4


class PreconditionError(ValueError):
    """Elliptic element where a hyperbolic one is required, or unsupported type."""


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class EndVerdict(str, Enum):
    INSIDE = "eventually_inside"
    OUTSIDE = "eventually_outside"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class EndCertificate:
    """Sign sequence behind an end_sign verdict."""

    root: Root
    direction: Direction
    verdict: EndVerdict
    power_cap: int
    window: int
    signs: Tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "root": self.root.to_list(),
            "direction": self.direction.value,
            "verdict": self.verdict.value,
            "power_cap": self.power_cap,
            "window": self.window,
        }


@dataclass(frozen=True)
class AxisData:
    w: WeylElement
    crossed: Tuple[Root, ...]
    periods: int
    forward_end: str = "+xi"
    backward_end: str = "-xi"

    def __post_init__(self):
        if not self.crossed:
            raise ValueError("a hyperbolic axis crosses at least one wall")


class AxisAnalyzer:
    """
    End containment and wall crossing along the axis of a hyperbolic element.

    Args:
        roots: root system of the ambient GCM
        caps: search caps (power cap, periods, BFS radius)
    """

    def __init__(self, roots: RootSystem, caps: Optional[SearchCaps] = None):
        self.roots = roots
        self.group = roots.group
        self.caps = caps or get_default_caps()

    def _require_hyperbolic(self, w: WeylElement) -> None:
        if not self.group.is_hyperbolic(w):
            raise PreconditionError(f"elliptic: word {w.word_text()!r} has finite order")

    def end_certificate(
        self,
        alpha: Root,
        w: WeylElement,
        direction: Direction,
        power_cap: Optional[int] = None,
    ) -> EndCertificate:
        """
        Decide which side of alpha's wall an end of w's axis eventually lies on.

        Backward chambers w^-n C lie in D(alpha) iff w^n(alpha) > 0; forward
        ones use w^-n. The verdict needs a constant sign over the last
        ceil(K/2) of n = 1..K.

        Raises:
            ValueError: K < 4
            PreconditionError: w is elliptic
        """
        K = self.caps.power_cap if power_cap is None else power_cap
        if K < MIN_POWER_CAP:
            raise ValueError(f"power cap {K} is below the minimum of {MIN_POWER_CAP}")
        self._require_hyperbolic(w)

        step = w if direction == Direction.BACKWARD else self.group.invert(w)
        vector = alpha.vector
        signs = []
        for _ in range(K):
            vector = step.apply(vector)
            signs.append(1 if all(x >= 0 for x in vector) else -1)

        window = math.ceil(K / 2)
        tail = set(signs[-window:])
        if tail == {1}:
            verdict = EndVerdict.INSIDE
        elif tail == {-1}:
            verdict = EndVerdict.OUTSIDE
        else:
            verdict = EndVerdict.UNDECIDED
        return EndCertificate(alpha, direction, verdict, K, window, tuple(signs))

    def end_sign(
        self,
        alpha: Root,
        w: WeylElement,
        direction: Direction,
        power_cap: Optional[int] = None,
    ) -> EndVerdict:
        return self.end_certificate(alpha, w, direction, power_cap).verdict

    def crossed_walls(self, w: WeylElement, periods: Optional[int] = None) -> List[Root]:
        """
        Positive roots of the walls in w^k N(w^-1), k = 0..P-1.

        Ordered by k, then lexicographically; each wall listed once.
        """
        P = self.caps.periods if periods is None else periods
        self._require_hyperbolic(w)

        base = self.group.inversion_set(self.group.invert(w))
        seen = set()
        crossed: List[Root] = []
        power = self.group.identity()
        for _ in range(P):
            fresh = []
            for vector in base:
                root = Root(power.apply(vector)).positive()
                if root.vector not in seen:
                    seen.add(root.vector)
                    fresh.append(root)
            crossed.extend(sorted(fresh, key=lambda r: r.vector))
            power = self.group.multiply(power, w)
        return crossed

    def axis_centers(self, w: WeylElement, periods: Optional[int] = None) -> List[WeylElement]:
        """Chambers w^k C for 0 < |k| <= P, nearest first; quadrant searches also start there."""
        P = self.caps.periods if periods is None else periods
        centers = []
        for k in range(1, P + 1):
            centers.append(self.group.power(w, k))
            centers.append(self.group.power(w, -k))
        return centers

    def axis_data(self, w: WeylElement, periods: Optional[int] = None) -> AxisData:
        P = self.caps.periods if periods is None else periods
        return AxisData(w, tuple(self.crossed_walls(w, P)), P)

    def _require_supported_type(self) -> None:
        classification = classify_type(coxeter_matrix(self.roots.cartan))
        if not classification.irreducible:
            raise PreconditionError("reducible: pick the pair per irreducible component")
        if classification.components[0].kind == CoxeterKind.SPHERICAL:
            raise PreconditionError("spherical: no hyperbolic elements")

    def pick_alpha_beta(self, w: WeylElement) -> Tuple[Root, Root]:
        """
        Choose disjoint roots alpha, beta with -xi inside D(alpha) and +xi inside D(beta).

        Returns:
            (alpha, beta), both end containments and disjointness certified

        Raises:
            PreconditionError: elliptic w or unsupported ambient type
            InconclusiveError: no certified candidate within the caps
        """
        self._require_hyperbolic(w)
        self._require_supported_type()

        crossed = self.crossed_walls(w)
        verdicts = []
        for root in crossed:
            backward = self.end_sign(root, w, Direction.BACKWARD)
            forward = self.end_sign(root, w, Direction.FORWARD)
            verdicts.append((root, backward, forward))

        undecided = sum(1 for _, b, f in verdicts if EndVerdict.UNDECIDED in (b, f))
        if undecided:
            logger.debug(f"{undecided} crossed walls have undecided end signs for {w.word_text()!r}")

        alpha = None
        for root, backward, forward in verdicts:
            if backward == EndVerdict.INSIDE and forward == EndVerdict.OUTSIDE:
                alpha = root
            elif backward == EndVerdict.OUTSIDE and forward == EndVerdict.INSIDE:
                alpha = -root
            if alpha is not None:
                break
        if alpha is None:
            raise InconclusiveError(
                f"no crossed wall separates the ends of {w.word_text()!r} ({undecided} undecided)",
                stage="pick_alpha",
                cap=self.caps.power_cap,
            )

        centers = self.axis_centers(w)
        skipped = 0
        for root, backward, forward in verdicts:
            if forward == EndVerdict.INSIDE and backward == EndVerdict.OUTSIDE:
                beta = root
            elif forward == EndVerdict.OUTSIDE and backward == EndVerdict.INSIDE:
                beta = -root
            else:
                continue
            if beta == alpha or beta == -alpha:
                continue
            if self.roots.walls_cross(alpha, beta):
                continue
            try:
                if self.roots.disjoint(alpha, beta, self.caps.bfs_radius, centers):
                    logger.debug(f"Picked alpha={alpha} beta={beta} for {w.word_text()!r}")
                    return alpha, beta
            except InconclusiveError:
                skipped += 1

        raise InconclusiveError(
            f"no wall disjoint from alpha={alpha} certified ({skipped} inconclusive)",
            stage="pick_beta",
            cap=self.caps.bfs_radius,
        )


def create_axis_analyzer(roots: RootSystem, caps: Optional[SearchCaps] = None) -> AxisAnalyzer:
    """Factory function to create an AxisAnalyzer."""
    return AxisAnalyzer(roots, caps)
