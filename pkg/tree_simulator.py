"""
Regular Tree Simulator
Desk-scale model of a totally disconnected locally compact group: truncated
automorphisms of the (q+1)-regular tree, used to check contraction and
parabolic membership, the scale, line folding and a non-closed contraction
group witness at finite depth.

Vertices are letter tuples with no letter equal to its predecessor; the base
vertex is (). The edge from v to v + (a,) carries the label a.
"""

import json
import math
import random
import logging
from enum import Enum
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, StrictInt, StrictStr, ValidationError

from weyl import IsometryType

logger = logging.getLogger(__name__)

Vertex = Tuple[int, ...]
Radius = Union[int, float]

MAX_DEGREE = 10
BASE: Vertex = ()


class InsufficientDepth(ValueError):
    """A truncation radius is too small for the requested operation."""

    def __init__(self, message: str, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(f"{message} (required {required}, available {available})")


class TreeSpecError(ValueError):
    """Malformed portrait or line document, or an invalid vertex coding."""


class InvariantViolation(RuntimeError):
    """Two independent implementations of the same check disagree."""


class MembershipVerdict(str, Enum):
    VERIFIED = "Verified"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"


# ---------------------------------------------------------------------------
# Vertex geometry
# ---------------------------------------------------------------------------

def format_vertex(v: Vertex) -> str:
    return "".join(str(a) for a in v)


def parse_vertex(text: str, degree: int) -> Vertex:
    """Parse a letter string such as "010" (empty string is the base)."""
    text = text.strip()
    if not all(ch.isdigit() for ch in text):
        raise TreeSpecError(f"vertex {text!r} must be a string of digits")
    vertex = tuple(int(ch) for ch in text)
    _check_vertex(vertex, degree)
    return vertex


def _check_vertex(vertex: Vertex, degree: int) -> None:
    for k, a in enumerate(vertex):
        if not 0 <= a < degree:
            raise TreeSpecError(f"letter {a} in {format_vertex(vertex)!r} is not below degree {degree}")
        if k and vertex[k - 1] == a:
            raise TreeSpecError(f"vertex {format_vertex(vertex)!r} repeats letter {a}")


def neighbour(v: Vertex, label: int) -> Vertex:
    if v and v[-1] == label:
        return v[:-1]
    return v + (label,)


def neighbours(v: Vertex, degree: int) -> List[Vertex]:
    return [neighbour(v, a) for a in range(degree)]


def child_labels(v: Vertex, degree: int) -> List[int]:
    return [a for a in range(degree) if not v or a != v[-1]]


def label_towards(u: Vertex, w: Vertex) -> Optional[int]:
    """Label of the edge from u to w, or None when they are not adjacent."""
    if u and w == u[:-1]:
        return u[-1]
    if len(w) == len(u) + 1 and w[:-1] == u:
        return w[-1]
    return None


def distance(u: Vertex, v: Vertex) -> int:
    common = 0
    for a, b in zip(u, v):
        if a != b:
            break
        common += 1
    return len(u) + len(v) - 2 * common


def geodesic(u: Vertex, v: Vertex) -> List[Vertex]:
    common = len(u) + len(v) - distance(u, v)
    common //= 2
    up = [u[:k] for k in range(len(u), common - 1, -1)]
    down = [v[:k] for k in range(common + 1, len(v) + 1)]
    return up + down


def ball(degree: int, radius: int) -> Iterator[Vertex]:
    """Vertices of B(base, radius) by distance, then lexicographically."""
    level = [BASE]
    yield BASE
    for _ in range(radius):
        level = [v + (a,) for v in level for a in child_labels(v, degree)]
        yield from level


def sphere_layers(center: Vertex, degree: int, radius: int) -> Iterator[List[Vertex]]:
    """Successive spheres S(center, 1..radius)."""
    previous = {center}
    layer = [center]
    for _ in range(radius):
        nxt = [w for u in layer for w in neighbours(u, degree) if w not in previous]
        previous = set(layer)
        layer = nxt
        yield layer


# ---------------------------------------------------------------------------
# Ends and lines
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class End:
    """Eventually periodic ray from base: prefix then block repeated forever."""

    prefix: Tuple[int, ...]
    block: Tuple[int, ...]

    def __post_init__(self):
        if not self.block:
            raise TreeSpecError("an end needs a non-empty repeating block")
        word = self.prefix + self.block + self.block[:1]
        for k in range(1, len(word)):
            if word[k] == word[k - 1]:
                raise TreeSpecError(f"end {self.to_dict()} backtracks at position {k}")

    def letter(self, index: int) -> int:
        if index < len(self.prefix):
            return self.prefix[index]
        return self.block[(index - len(self.prefix)) % len(self.block)]

    def walk(self, length: int) -> Vertex:
        return tuple(self.letter(i) for i in range(length))

    def to_dict(self) -> dict:
        return {"prefix": format_vertex(self.prefix), "block": format_vertex(self.block)}


@dataclass(frozen=True)
class Line:
    """Bi-infinite line through base; position t > 0 lies toward the forward end."""

    forward: End
    backward: End

    def __post_init__(self):
        if self.forward.letter(0) == self.backward.letter(0):
            raise TreeSpecError("the two ends of a line must leave base by different edges")

    def position(self, t: int) -> Vertex:
        return self.forward.walk(t) if t >= 0 else self.backward.walk(-t)

    def index_of(self, v: Vertex) -> Optional[int]:
        if v == self.position(len(v)):
            return len(v)
        if v == self.position(-len(v)):
            return -len(v)
        return None

    def letters(self) -> set:
        return set(self.forward.prefix + self.forward.block + self.backward.prefix + self.backward.block)

    def to_dict(self) -> dict:
        return {"forward": self.forward.to_dict(), "backward": self.backward.to_dict()}


def standard_line() -> Line:
    """Ends (01)^inf forward and (10)^inf backward."""
    return Line(End((), (0, 1)), End((), (1, 0)))


# ---------------------------------------------------------------------------
# Truncated automorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TreeAutomorphismApprox:
    """
    Automorphism known on the ball B(base, radius), stored vertex by vertex.

    ``axis`` records the line a translation was built along.
    """

    degree: int
    radius: int
    mapping: Dict[Vertex, Vertex] = field(repr=False)
    axis: Optional[Line] = None

    def __call__(self, v: Vertex) -> Vertex:
        try:
            return self.mapping[v]
        except KeyError:
            raise InsufficientDepth(f"vertex {format_vertex(v)!r} is outside the known ball", len(v), self.radius)

    def __contains__(self, v: Vertex) -> bool:
        return v in self.mapping

    @property
    def base_image(self) -> Vertex:
        return self.mapping[BASE]

    @property
    def displacement(self) -> int:
        return len(self.base_image)

    def first_moved(self) -> Optional[Vertex]:
        for v in ball(self.degree, self.radius):
            if self.mapping[v] != v:
                return v
        return None

    def is_identity(self) -> bool:
        return self.first_moved() is None

    def agreement_radius(self, other: "TreeAutomorphismApprox") -> int:
        """Largest r with agreement on B(base, r); -1 when base images differ."""
        limit = min(self.radius, other.radius)
        for v in ball(self.degree, limit):
            if self.mapping[v] != other.mapping[v]:
                return len(v) - 1
        return limit

    def truncation_distance(self, other: "TreeAutomorphismApprox") -> float:
        return 2.0 ** (-self.agreement_radius(other))


@dataclass(frozen=True)
class TreeIsometry:
    kind: IsometryType
    translation_length: int
    fixed_vertex: Optional[Vertex] = None
    inverted_edge: Optional[Tuple[Vertex, Vertex]] = None
    axis_segment: Tuple[Vertex, ...] = ()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "translation_length": self.translation_length,
            "fixed_vertex": format_vertex(self.fixed_vertex) if self.fixed_vertex is not None else None,
            "inverted_edge": [format_vertex(v) for v in self.inverted_edge] if self.inverted_edge else None,
            "axis_segment": [format_vertex(v) for v in self.axis_segment],
        }


@dataclass(frozen=True)
class FixedBall:
    radius: Radius
    saturated: bool
    moved: Optional[Vertex] = None

    def report_radius(self) -> Optional[int]:
        return None if self.radius == -math.inf else int(self.radius)


class RegularTree:
    """
    The regular tree of a given degree, with automorphism constructors.

    Args:
        degree: vertex degree d = q + 1 (3..10)
        type_preserving: restrict constructors to type-preserving automorphisms
    """

    def __init__(self, degree: int = 3, type_preserving: bool = False):
        if not 3 <= degree <= MAX_DEGREE:
            raise TreeSpecError(f"degree {degree} outside the supported range 3..{MAX_DEGREE}")
        self.degree = degree
        self.type_preserving = type_preserving

    @property
    def q(self) -> int:
        return self.degree - 1

    def check_line(self, line: Line) -> Line:
        if any(a >= self.degree for a in line.letters()):
            raise TreeSpecError(f"line uses letters outside 0..{self.degree - 1}")
        return line

    def _check_type(self, displacement: int, what: str) -> None:
        if self.type_preserving and displacement % 2:
            raise TreeSpecError(f"{what} moves base an odd distance; not type-preserving")

    def _build(
        self,
        depth: int,
        base_image: Vertex,
        seeds: Optional[Dict[Vertex, Vertex]] = None,
        perms: Optional[Dict[Vertex, Sequence[int]]] = None,
    ) -> Dict[Vertex, Vertex]:
        """
        Extend an assignment breadth-first over B(base, depth).

        At each vertex the unassigned children go, in label order, to the
        free neighbours of the image in label order, reordered by
        perms[v] when given (perm[j] is the target position of child j).
        """
        seeds = seeds or {}
        perms = perms or {}
        mapping = {BASE: base_image}
        frontier = [BASE]
        for _ in range(depth):
            next_frontier = []
            for v in frontier:
                image = mapping[v]
                sources = child_labels(v, self.degree)
                taken = label_towards(image, mapping[v[:-1]]) if v else None
                targets = [a for a in range(self.degree) if a != taken]

                assigned: Dict[int, int] = {}
                for c in sources:
                    child = v + (c,)
                    if child in seeds:
                        label = label_towards(image, seeds[child])
                        if label is None or label == taken or label in assigned.values():
                            raise TreeSpecError(f"seed for {format_vertex(child)!r} is not a free neighbour")
                        assigned[c] = label

                free_sources = [c for c in sources if c not in assigned]
                free_targets = [t for t in targets if t not in assigned.values()]
                perm = perms.get(v)
                if perm is not None:
                    if assigned or sorted(perm) != list(range(len(free_sources))):
                        raise TreeSpecError(
                            f"permutation at {format_vertex(v)!r} must rearrange {len(free_sources)} children"
                        )
                    free_targets = [free_targets[p] for p in perm]
                for c, t in zip(free_sources, free_targets):
                    assigned[c] = t

                for c in sources:
                    child = v + (c,)
                    mapping[child] = neighbour(image, assigned[c])
                    next_frontier.append(child)
            frontier = next_frontier
        return mapping

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    def identity(self, depth: int) -> TreeAutomorphismApprox:
        return TreeAutomorphismApprox(self.degree, depth, {v: v for v in ball(self.degree, depth)})

    def translation(self, line: Line, steps: int, depth: int) -> TreeAutomorphismApprox:
        """Shift every vertex of the line `steps` positions toward the forward end."""
        if steps == 0:
            raise TreeSpecError("translation length must be non-zero")
        self._check_type(abs(steps), "translation")
        self.check_line(line)
        seeds = {line.position(t): line.position(t + steps) for t in range(-depth, depth + 1) if t}
        mapping = self._build(depth, line.position(steps), seeds=seeds)
        return TreeAutomorphismApprox(self.degree, depth, mapping, axis=line)

    def elliptic_from_portrait(
        self,
        perms: Dict[Vertex, Sequence[int]],
        depth: int,
        base_image: Vertex = BASE,
    ) -> TreeAutomorphismApprox:
        """Automorphism given by local permutations (d entries at base, d-1 elsewhere)."""
        _check_vertex(base_image, self.degree)
        self._check_type(len(base_image), "portrait")
        for v, perm in perms.items():
            _check_vertex(v, self.degree)
            expected = self.degree if not v else self.degree - 1
            if len(perm) != expected or sorted(perm) != list(range(expected)):
                raise TreeSpecError(
                    f"permutation at {format_vertex(v)!r} must be of {expected} positions, got {list(perm)}"
                )
            if len(v) >= depth:
                raise TreeSpecError(f"permutation at {format_vertex(v)!r} lies outside depth {depth}")
        return TreeAutomorphismApprox(self.degree, depth, self._build(depth, base_image, perms=perms))

    def swap_elliptic(self, vertex: Vertex, a: int, b: int, depth: int) -> TreeAutomorphismApprox:
        """Exchange the branches through children a and b of vertex; fixes B(base, |vertex|)."""
        labels = child_labels(vertex, self.degree)
        perm = list(range(len(labels)))
        i, j = labels.index(a), labels.index(b)
        perm[i], perm[j] = perm[j], perm[i]
        return self.elliptic_from_portrait({vertex: perm}, depth)

    def random_elliptic(self, fix_radius: int, depth: int, seed: int = 0) -> TreeAutomorphismApprox:
        """Random automorphism fixing B(base, fix_radius) pointwise."""
        rng = random.Random(seed)
        perms = {}
        for v in ball(self.degree, depth - 1):
            if len(v) >= fix_radius:
                perm = list(range(len(child_labels(v, self.degree))))
                rng.shuffle(perm)
                perms[v] = perm
        return self.elliptic_from_portrait(perms, depth)

    def branch_elliptic(self, root: Vertex, depth: int, seed: int = 0) -> TreeAutomorphismApprox:
        """Random automorphism supported on the branch below `root`."""
        _check_vertex(root, self.degree)
        rng = random.Random(seed)
        perms = {}
        for v in ball(self.degree, depth - 1):
            if v[:len(root)] == root:
                perm = list(range(len(child_labels(v, self.degree))))
                rng.shuffle(perm)
                perms[v] = perm
        return self.elliptic_from_portrait(perms, depth)

    def random_line(self, seed: int = 0, max_prefix: int = 6) -> Line:
        """Random eventually 2-periodic line through base."""
        rng = random.Random(seed)

        def random_end(first_forbidden: Optional[int]) -> End:
            prefix: List[int] = []
            for _ in range(rng.randint(0, max_prefix)):
                choices = [a for a in range(self.degree) if a != (prefix[-1] if prefix else first_forbidden)]
                prefix.append(rng.choice(choices))
            avoid = prefix[-1] if prefix else first_forbidden
            first = rng.choice([a for a in range(self.degree) if a != avoid])
            second = rng.choice([a for a in range(self.degree) if a != first])
            return End(tuple(prefix), (first, second))

        forward = random_end(None)
        backward = random_end(forward.letter(0))
        return Line(forward, backward)

    def off_axis_child(self, line: Line, t: int) -> Vertex:
        """Smallest neighbour of line position t off the line."""
        p = line.position(t)
        on_line = {line.position(t - 1), line.position(t + 1)}
        label = min(a for a in range(self.degree) if neighbour(p, a) not in on_line)
        return neighbour(p, label)

    def axis_branch_swaps(
        self,
        line: Line,
        depth: int,
        lowest: Optional[int] = None,
        highest: Optional[int] = None,
    ) -> TreeAutomorphismApprox:
        """
        Fix the line pointwise; at each line position t in [lowest, highest]
        swap the two smallest children of the off-line neighbour b(t).
        """
        perms = {}
        for t in range(-(depth - 2), depth - 1):
            if (lowest is not None and t < lowest) or (highest is not None and t > highest):
                continue
            b = self.off_axis_child(line, t)
            if len(b) >= depth:
                continue
            perm = list(range(self.degree - 1))
            perm[0], perm[1] = 1, 0
            perms[b] = perm
        return self.elliptic_from_portrait(perms, depth)

    # ------------------------------------------------------------------
    # Documents
    # ------------------------------------------------------------------

    def portrait_from_document(self, text: str) -> TreeAutomorphismApprox:
        doc = _load_document(PortraitDocument, text)
        if doc.degree != self.degree:
            raise TreeSpecError(f"portrait degree {doc.degree} does not match tree degree {self.degree}")
        perms = {parse_vertex(key, self.degree): perm for key, perm in doc.perms.items()}
        return self.elliptic_from_portrait(perms, doc.depth, parse_vertex(doc.base_image, self.degree))


def create_tree(degree: int = 3, type_preserving: bool = False) -> RegularTree:
    """Factory function to create a RegularTree."""
    return RegularTree(degree, type_preserving)


class PortraitDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    degree: StrictInt
    depth: StrictInt
    base_image: StrictStr = ""
    perms: Dict[str, List[StrictInt]] = {}


class EndDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    prefix: StrictStr = ""
    block: StrictStr


class LineDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    degree: StrictInt
    forward: EndDocument
    backward: EndDocument


def _load_document(model, text: str):
    try:
        return model.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise TreeSpecError(f"malformed document at line {e.lineno} column {e.colno}: {e.msg}") from e
    except ValidationError as e:
        first = e.errors()[0]
        raise TreeSpecError(f"malformed document at {'.'.join(map(str, first['loc']))}: {first['msg']}") from e


def line_from_document(text: str) -> Tuple[int, Line]:
    """Parse a line document; returns (degree, line)."""
    doc = _load_document(LineDocument, text)
    tree = RegularTree(doc.degree)

    def end(part: EndDocument) -> End:
        return End(parse_vertex(part.prefix, doc.degree) if part.prefix else (), parse_vertex(part.block, doc.degree))

    return doc.degree, tree.check_line(Line(end(doc.forward), end(doc.backward)))


# ---------------------------------------------------------------------------
# Group operations
# ---------------------------------------------------------------------------

def compose(f: TreeAutomorphismApprox, g: TreeAutomorphismApprox) -> TreeAutomorphismApprox:
    """f after g, on B(base, min(R_g, R_f - |g(base)|))."""
    radius = min(g.radius, f.radius - g.displacement)
    if radius < 1:
        raise InsufficientDepth("composition", g.displacement + 1, f.radius)
    mapping = {v: f.mapping[g.mapping[v]] for v in ball(g.degree, radius)}
    return TreeAutomorphismApprox(g.degree, radius, mapping)


def invert(f: TreeAutomorphismApprox) -> TreeAutomorphismApprox:
    """f^-1 on B(base, R_f - |f(base)|)."""
    radius = f.radius - f.displacement
    if radius < 1:
        raise InsufficientDepth("inversion", f.displacement + 1, f.radius)
    reverse = {image: v for v, image in f.mapping.items()}
    mapping = {u: reverse[u] for u in ball(f.degree, radius)}
    return TreeAutomorphismApprox(f.degree, radius, mapping, axis=f.axis)


def power(f: TreeAutomorphismApprox, k: int) -> TreeAutomorphismApprox:
    if k < 0:
        return power(invert(f), -k)
    result = TreeAutomorphismApprox(f.degree, f.radius, {v: v for v in f.mapping})
    for _ in range(k):
        result = compose(f, result)
    return TreeAutomorphismApprox(f.degree, result.radius, result.mapping, axis=f.axis)


# ---------------------------------------------------------------------------
# Classification and fixed balls
# ---------------------------------------------------------------------------

def classify_tree_isometry(g: TreeAutomorphismApprox) -> TreeIsometry:
    """
    Elliptic (fixed vertex or inverted edge) or hyperbolic with translation length.

    Minimal displacement is attained within ceil(D/2)+1 of base, D = d(base, g base).
    """
    D = g.displacement
    if g.radius < 2 * D + 2:
        raise InsufficientDepth("classification", 2 * D + 2, g.radius)

    search = math.ceil(D / 2) + 1
    best_length, best_vertex = None, None
    for v in ball(g.degree, search):
        moved = distance(v, g.mapping[v])
        if best_length is None or moved < best_length:
            best_length, best_vertex = moved, v
        if moved == 0:
            return TreeIsometry(IsometryType.ELLIPTIC, 0, fixed_vertex=v)

    for v in ball(g.degree, search):
        w = g.mapping[v]
        if distance(v, w) == 1 and g.mapping[w] == v:
            return TreeIsometry(IsometryType.ELLIPTIC, 0, inverted_edge=(v, w))

    segment = tuple(geodesic(best_vertex, g.mapping[best_vertex]))
    return TreeIsometry(IsometryType.HYPERBOLIC, best_length, axis_segment=segment)


def fixed_ball_radius(g: TreeAutomorphismApprox, center: Vertex, limit: Optional[int] = None) -> FixedBall:
    """
    Largest r with B(center, r) inside the known ball and fixed pointwise.

    -inf when center itself moves; `saturated` when the whole available
    ball (or `limit`) is fixed.
    """
    available = g.radius - len(center)
    if available < 0:
        raise InsufficientDepth(f"center {format_vertex(center)!r}", len(center), g.radius)
    limit = available if limit is None else min(limit, available)
    if g.mapping[center] != center:
        return FixedBall(-math.inf, False, center)
    for r, layer in enumerate(sphere_layers(center, g.degree, limit), start=1):
        for u in layer:
            if g.mapping[u] != u:
                return FixedBall(r - 1, False, u)
    return FixedBall(limit, True)


def scale(g: TreeAutomorphismApprox) -> int:
    """1 for elliptic g, q^l for a hyperbolic g of translation length l."""
    classification = classify_tree_isometry(g)
    if classification.kind == IsometryType.ELLIPTIC:
        return 1
    return (g.degree - 1) ** classification.translation_length


# ---------------------------------------------------------------------------
# Dynamics relative to a hyperbolic h
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Horizon:
    """Samples x_n = h^-n(base), n = 0..N, along the repelling ray of h."""

    translation_length: int
    radius: int
    samples: Tuple[Vertex, ...]

    @property
    def N(self) -> int:
        return len(self.samples) - 1

    def ray(self, s: int) -> Vertex:
        return self.samples[-1][:s]


def _repelling_samples(h: TreeAutomorphismApprox, count: int) -> List[Vertex]:
    h_inverse = invert(h)
    samples = [BASE]
    while len(samples) <= count:
        previous = samples[-1]
        if previous not in h_inverse:
            break
        samples.append(h_inverse.mapping[previous])
    return samples


def horizon(g: TreeAutomorphismApprox, h: TreeAutomorphismApprox) -> Horizon:
    """
    Sampling window for g against a hyperbolic h whose axis passes through base.

    N = max{n : n l <= R - 2 l} with R = min(R_g, R_h), and N >= 2.
    """
    classification = classify_tree_isometry(h)
    ell = classification.translation_length
    if classification.kind != IsometryType.HYPERBOLIC:
        raise TreeSpecError("a horizon needs a hyperbolic h")
    if h.displacement != ell:
        raise TreeSpecError("the axis of h must pass through base")
    radius = min(g.radius, h.radius)
    N = (radius - 2 * ell) // ell
    if N < 2:
        raise InsufficientDepth("repelling ray horizon", 4 * ell, radius)
    samples = _repelling_samples(h, N)
    if len(samples) < N + 1:
        raise InsufficientDepth("repelling ray samples", N * ell, h.radius)
    for n, x in enumerate(samples):
        if samples[-1][:n * ell] != x:
            raise InvariantViolation(f"sample x_{n} is off the repelling ray")
    return Horizon(ell, radius, tuple(samples))


@dataclass(frozen=True)
class ContractionResult:
    verdict: MembershipVerdict
    r_max: Optional[int] = None
    witness: Optional[Vertex] = None
    horizon: int = 0
    ray_radii: Tuple[Optional[int], ...] = ()
    definitional_radii: Tuple[Optional[int], ...] = ()

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "r_max": self.r_max,
            "witness": format_vertex(self.witness) if self.witness is not None else None,
            "horizon": self.horizon,
            "ray_radii": list(self.ray_radii),
            "definitional_radii": list(self.definitional_radii),
        }


def _ray_criterion(g: TreeAutomorphismApprox, window: Horizon) -> Tuple[List[FixedBall], bool]:
    """Fixed balls at the samples, and whether any ray vertex has its visible ball fixed."""
    ell = window.translation_length
    at_samples = []
    saturated_anywhere = False
    for s in range(window.N * ell + 1):
        fixed = fixed_ball_radius(g, window.ray(s), window.radius - s)
        saturated_anywhere = saturated_anywhere or fixed.saturated
        if s % ell == 0:
            at_samples.append(fixed)
    return at_samples, saturated_anywhere


def _definitional_criterion(
    g: TreeAutomorphismApprox,
    h: TreeAutomorphismApprox,
    window: Horizon,
) -> List[FixedBall]:
    """
    Fixed radius of h^n g h^-n at base, n = 0..N.

    h^n g h^-n fixes u iff g fixes h^-n(u); the base ball is carried along
    by the inverse table of h.
    """
    ell = window.translation_length
    h_inverse = invert(h)
    carried = {u: u for u in ball(g.degree, window.radius)}
    results = []
    for n in range(window.N + 1):
        limit = window.radius - n * ell
        if n:
            carried = {u: h_inverse.mapping[x] for u, x in carried.items() if len(u) <= limit}
        first_moved = None
        for u in ball(g.degree, limit):
            x = carried[u]
            if g.mapping[x] != x:
                first_moved = u
                break
        if first_moved is None:
            results.append(FixedBall(limit, True))
        elif not first_moved:
            results.append(FixedBall(-math.inf, False, carried[first_moved]))
        else:
            results.append(FixedBall(len(first_moved) - 1, False, carried[first_moved]))
    return results


def _growth_verdict(balls: List[FixedBall], window: Horizon) -> Tuple[MembershipVerdict, Optional[Vertex]]:
    """
    Verdict from the per-sample fixed balls.

    A saturated sample counts only when the radii grow into it: saturation at
    x_0, or the last unsaturated radius is below the visible limit at the
    first saturated sample, or it exceeds the radius before it.
    """
    ell = window.translation_length
    radii = [b.radius for b in balls]
    first = next((n for n, b in enumerate(balls) if b.saturated), None)
    if first == 0:
        return MembershipVerdict.VERIFIED, None
    if first is not None:
        last = radii[first - 1]
        if last < window.radius - first * ell or (first >= 2 and last > radii[first - 2]):
            return MembershipVerdict.VERIFIED, None
        if first == 1:
            return MembershipVerdict.INCONCLUSIVE, None
        return MembershipVerdict.REFUTED, balls[first - 1].moved
    if radii[-1] <= radii[-2]:
        return MembershipVerdict.REFUTED, balls[-1].moved
    return MembershipVerdict.INCONCLUSIVE, None


def in_contraction(g: TreeAutomorphismApprox, h: TreeAutomorphismApprox) -> ContractionResult:
    """
    Membership of g in the contraction group U_h, decided at finite depth.

    Runs the ray criterion and the definitional criterion; they must agree.

    Raises:
        InvariantViolation: the two criteria disagree
        InsufficientDepth: the repelling-ray horizon is shorter than two samples
    """
    if g.degree != h.degree:
        raise TreeSpecError("g and h act on trees of different degree")

    if classify_tree_isometry(h).kind == IsometryType.ELLIPTIC:
        moved = g.first_moved()
        if moved is None:
            return ContractionResult(MembershipVerdict.VERIFIED, r_max=g.radius)
        return ContractionResult(MembershipVerdict.REFUTED, witness=moved)

    try:
        window = horizon(g, h)
    except InsufficientDepth as e:
        logger.warning(f"⚠️  Contraction check inconclusive: {e}")
        return ContractionResult(MembershipVerdict.INCONCLUSIVE, r_max=fixed_ball_radius(g, BASE).report_radius())
    ray_balls, ray_saturated = _ray_criterion(g, window)
    definitional = _definitional_criterion(g, h, window)

    ray_radii = tuple(b.report_radius() for b in ray_balls)
    definitional_radii = tuple(b.report_radius() for b in definitional)
    definitional_saturated = any(b.saturated for b in definitional)
    if ray_radii != definitional_radii or ray_saturated != definitional_saturated:
        logger.error(f"❌ Contraction criteria disagree: ray={ray_radii} definitional={definitional_radii}")
        raise InvariantViolation("ray criterion and definitional criterion disagree")

    finite = [int(b.radius) for b in definitional if b.radius != -math.inf]
    r_max = max(finite) if finite else None
    verdict, witness = _growth_verdict(ray_balls, window)
    if verdict != _growth_verdict(definitional, window)[0]:
        raise InvariantViolation("ray criterion and definitional criterion reach different verdicts")
    return ContractionResult(verdict, r_max, witness, window.N, ray_radii, definitional_radii)


def bounded_orbit(
    g: TreeAutomorphismApprox,
    h: TreeAutomorphismApprox,
    power_cap: Optional[int] = None,
) -> bool:
    """
    Whether d(base, h^n g h^-n base) = d(x_n, g x_n) stays bounded.

    Bounded when the last sampled value does not exceed the maximum over the
    first half of the samples. A hyperbolic h is sampled over its whole
    horizon unless `power_cap` is smaller; an elliptic h over 8 powers.
    """
    if classify_tree_isometry(h).kind == IsometryType.HYPERBOLIC:
        samples = list(horizon(g, h).samples)
        if power_cap is not None:
            samples = samples[:power_cap + 1]
    else:
        cap = 8 if power_cap is None else power_cap
        samples = [x for x in _repelling_samples(h, cap) if x in g]
    if len(samples) < 3:
        raise InsufficientDepth("bounded-orbit samples", 3, len(samples))
    displacements = [distance(x, g.mapping[x]) for x in samples]
    return displacements[-1] <= max(displacements[: len(displacements) // 2 + 1])


@dataclass(frozen=True)
class ParabolicResult:
    in_parabolic: bool
    bounded_orbit: bool
    shift: Optional[int] = None

    @property
    def agrees(self) -> bool:
        return self.in_parabolic == self.bounded_orbit

    def to_dict(self) -> dict:
        return {
            "in_parabolic": self.in_parabolic,
            "bounded_orbit": self.bounded_orbit,
            "agrees": self.agrees,
            "shift": self.shift,
        }


def _axis_index(h: TreeAutomorphismApprox, window: Horizon) -> Callable[[Vertex], Optional[int]]:
    if h.axis is not None:
        return h.axis.index_of
    known = {window.samples[-1][:s]: -s for s in range(len(window.samples[-1]) + 1)}
    forward = BASE
    while forward in h and len(forward) + window.translation_length <= h.radius:
        forward = h.mapping[forward]
    known.update({forward[:s]: s for s in range(1, len(forward) + 1)})
    return known.get


def in_parabolic(g: TreeAutomorphismApprox, h: TreeAutomorphismApprox) -> ParabolicResult:
    """
    Whether g fixes the repelling end -xi of h.

    Checked as: g maps the ray segment between the last three samples onto
    the axis with one constant shift. Cross-checked against bounded_orbit.
    """
    if classify_tree_isometry(h).kind == IsometryType.ELLIPTIC:
        return ParabolicResult(True, bounded_orbit(g, h))

    window = horizon(g, h)
    ell = window.translation_length
    index = _axis_index(h, window)
    shifts = set()
    on_axis = True
    for s in range((window.N - 2) * ell, window.N * ell + 1):
        t = index(g.mapping[window.ray(s)])
        if t is None:
            on_axis = False
            break
        shifts.add(t + s)
    member = on_axis and len(shifts) == 1
    bounded = bounded_orbit(g, h)
    result = ParabolicResult(member, bounded, next(iter(shifts)) if member else None)
    if not result.agrees:
        logger.warning(f"⚠️  End-stabilizer test ({member}) and bounded-orbit test ({bounded}) disagree")
    return result


# ---------------------------------------------------------------------------
# Folding and the non-closed witness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FoldResult:
    element: TreeAutomorphismApprox
    steps: Tuple[dict, ...]
    partial_products: Tuple[TreeAutomorphismApprox, ...]
    cauchy: bool
    folded: bool

    def to_dict(self) -> dict:
        return {
            "steps": list(self.steps),
            "elliptic_factors": len(self.steps),
            "cauchy": self.cauchy,
            "folded": self.folded,
            "passed": self.cauchy and self.folded,
        }


def fold_line(tree: RegularTree, line: Line, depth: int) -> FoldResult:
    """
    Fold a line onto the standard line on B(base, depth).

    Level k = 1..depth fixes the image of line position +k, then -k, with an
    elliptic swapping two children of the standard vertex at level k-1; that
    elliptic fixes B(base, k-1).
    """
    tree.check_line(line)
    if depth < 1:
        raise InsufficientDepth("folding", 1, depth)
    standard = standard_line()
    current = tree.identity(depth)
    partials = [current]
    steps = []
    for k in range(1, depth + 1):
        for side in (1, -1):
            image = current(line.position(side * k))
            target = standard.position(side * k)
            if image == target:
                continue
            pivot = standard.position(side * (k - 1))
            if image[:-1] != pivot:
                raise InvariantViolation(f"folded line left the standard line below level {k}")
            swap = tree.swap_elliptic(pivot, image[-1], target[-1], depth)
            current = compose(swap, current)
            steps.append({
                "level": k,
                "side": "+" if side > 0 else "-",
                "vertex": format_vertex(pivot),
                "swapped": [format_vertex(image), format_vertex(target)],
            })
        partials.append(current)

    cauchy = True
    for k in range(1, depth):
        step = compose(partials[k + 1], invert(partials[k]))
        fixed = fixed_ball_radius(step, BASE, k - 1)
        cauchy = cauchy and fixed.saturated
    folded = all(current(line.position(t)) == standard.position(t) for t in range(-depth, depth + 1))
    logger.info(f"Folded line with {len(steps)} elliptic factors (cauchy={cauchy}, folded={folded})")
    return FoldResult(current, tuple(steps), tuple(partials), cauchy, folded)


@dataclass(frozen=True)
class WitnessTranscript:
    translation_length: int
    depth: int
    records: Tuple[dict, ...]
    mirrored: Tuple[dict, ...]
    limit: ContractionResult
    mirrored_limit: ContractionResult

    @property
    def passed(self) -> bool:
        sequences = self.records + self.mirrored
        return (
            bool(self.records)
            and all(r["verdict"] == MembershipVerdict.VERIFIED.value and r["agreement_ok"] for r in sequences)
            and self.limit.verdict == MembershipVerdict.REFUTED
            and self.mirrored_limit.verdict == MembershipVerdict.REFUTED
        )

    def to_dict(self) -> dict:
        return {
            "translation_length": self.translation_length,
            "depth": self.depth,
            "sequence": list(self.records),
            "limit": self.limit.to_dict(),
            "mirrored_sequence": list(self.mirrored),
            "mirrored_limit": self.mirrored_limit.to_dict(),
            "passed": self.passed,
        }


def nonclosed_witness(tree: RegularTree, h: TreeAutomorphismApprox) -> WitnessTranscript:
    """
    Finite-depth witness that U_h is not closed.

    g fixes the standard line and swaps two children of the off-line
    neighbour at every line position; g_k does so only at positions > -k.
    Every g_k lies in U_h, g_k -> g, yet g is refuted.
    """
    standard = standard_line()
    ell = h.displacement
    if h.axis != standard or ell == 0 or h.base_image != standard.position(ell):
        raise TreeSpecError("witness needs h translating along the standard line toward its forward end")
    depth = h.radius
    N = (depth - 2 * ell) // ell
    # g_k moves nothing within distance N l - k + 2 of x_N
    count = 2 * N * ell - depth + 2
    if N < 2 or count < 1:
        raise InsufficientDepth("witness sequence", 4 * ell + 2, depth)

    limit_element = tree.axis_branch_swaps(standard, depth)
    h_inverse = tree.translation(standard, -ell, depth)

    def record(k: int, element: TreeAutomorphismApprox, against: TreeAutomorphismApprox) -> dict:
        result = in_contraction(element, against)
        agreement = element.agreement_radius(limit_element)
        return {
            "k": k,
            "verdict": result.verdict.value,
            "r_max": result.r_max,
            "agreement_radius": agreement,
            "agreement_ok": agreement >= k - 2,
        }

    records = tuple(
        record(k, tree.axis_branch_swaps(standard, depth, lowest=-k + 1), h) for k in range(1, count + 1)
    )
    mirrored = tuple(
        record(k, tree.axis_branch_swaps(standard, depth, highest=k - 1), h_inverse) for k in range(1, count + 1)
    )
    transcript = WitnessTranscript(
        ell,
        depth,
        records,
        mirrored,
        in_contraction(limit_element, h),
        in_contraction(limit_element, h_inverse),
    )
    if transcript.passed:
        logger.info(f"✅ Non-closed witness: {count} approximants verified, limit refuted")
    else:
        logger.warning("⚠️  Non-closed witness transcript has failing checks")
    return transcript
