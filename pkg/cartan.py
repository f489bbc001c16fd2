"""
Generalized Cartan Matrices and Coxeter Types

Ingests generalized Cartan matrices (GCMs), derives the Coxeter diagram,
splits it into irreducible components and classifies each component against
the crystallographic spherical and affine tables.
"""

import json
import math
import logging
from enum import Enum
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, StrictInt, StrictStr, ValidationError

logger = logging.getLogger(__name__)

INFINITY = math.inf
CoxeterEntry = Union[int, float]

# p = A[i][j] * A[j][i]  ->  m_ij
_BOND_ORDERS = {0: 2, 1: 3, 2: 4, 3: 6}
_ALLOWED_M = {2, 3, 4, 6, INFINITY}


class CartanMatrixError(ValueError):
    """Malformed GCM document or violated GCM invariant."""

    def __init__(self, message: str, location=None):
        self.location = location
        if location is not None:
            message = f"{message} at {location}"
        super().__init__(message)


class CoxeterKind(str, Enum):
    SPHERICAL = "spherical"
    AFFINE = "affine"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class GeneralizedCartanMatrix:
    """
    Integral matrix with 2 on the diagonal, non-positive entries off it and a
    symmetric zero pattern. ``q`` is the residue field size (default 2).
    """

    entries: Tuple[Tuple[int, ...], ...]
    name: Optional[str] = None
    q: int = 2

    def __post_init__(self):
        entries = tuple(tuple(int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", entries)
        _validate_entries(entries)
        if self.q < 2:
            raise CartanMatrixError(f"residue field size q={self.q} must be at least 2", "q")

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i][j]

    def transpose(self) -> "GeneralizedCartanMatrix":
        return GeneralizedCartanMatrix(
            tuple(zip(*self.entries)),
            name=f"{self.name}^T" if self.name else None,
            q=self.q,
        )

    def to_dict(self) -> dict:
        return {"name": self.name, "cartan": [list(row) for row in self.entries], "q": self.q}


def _validate_entries(entries: Tuple[Tuple[int, ...], ...]) -> None:
    n = len(entries)
    if n == 0:
        raise CartanMatrixError("matrix must have positive rank", "cartan")
    for i, row in enumerate(entries):
        if len(row) != n:
            raise CartanMatrixError(f"row {i + 1} has {len(row)} entries, expected {n}", f"cartan[{i + 1}]")
    for i in range(n):
        if entries[i][i] != 2:
            raise CartanMatrixError(f"diagonal entry is {entries[i][i]}, expected 2", (i + 1, i + 1))
        for j in range(n):
            if i == j:
                continue
            if entries[i][j] > 0:
                raise CartanMatrixError(f"positive off-diagonal entry {entries[i][j]}", (i + 1, j + 1))
            if (entries[i][j] == 0) != (entries[j][i] == 0):
                raise CartanMatrixError(
                    "zero-asymmetry: exactly one of the mirrored entries is zero",
                    f"({i + 1},{j + 1})/({j + 1},{i + 1})",
                )


@dataclass(frozen=True)
class CoxeterDiagram:
    """Coxeter matrix derived from a GCM; ``math.inf`` stands for m = ∞."""

    m: Tuple[Tuple[CoxeterEntry, ...], ...]

    def __post_init__(self):
        n = len(self.m)
        for i in range(n):
            if self.m[i][i] != 1:
                raise ValueError(f"diagonal entry m[{i}][{i}] must be 1")
            for j in range(n):
                if i != j and self.m[i][j] not in _ALLOWED_M:
                    raise ValueError(f"m[{i}][{j}]={self.m[i][j]} is not crystallographic")
                if self.m[i][j] != self.m[j][i]:
                    raise ValueError(f"Coxeter matrix is not symmetric at ({i}, {j})")

    @property
    def n(self) -> int:
        return len(self.m)

    def graph(self, nodes: Optional[Sequence[int]] = None) -> nx.Graph:
        """Labelled graph with an edge wherever m >= 3."""
        nodes = list(range(self.n)) if nodes is None else list(nodes)
        graph = nx.Graph()
        graph.add_nodes_from(nodes)
        for a, i in enumerate(nodes):
            for j in nodes[a + 1:]:
                if self.m[i][j] >= 3:
                    graph.add_edge(i, j, m=self.m[i][j])
        return graph

    def to_report(self) -> List[List[Union[int, str]]]:
        return [["inf" if x == INFINITY else int(x) for x in row] for row in self.m]


@dataclass(frozen=True)
class ComponentType:
    indices: Tuple[int, ...]
    kind: CoxeterKind
    label: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "generators": [i + 1 for i in self.indices],
            "kind": self.kind.value,
            "label": self.label,
        }


@dataclass(frozen=True)
class TypeClassification:
    components: Tuple[ComponentType, ...]

    @property
    def irreducible(self) -> bool:
        return len(self.components) == 1

    @property
    def is_spherical(self) -> bool:
        return all(c.kind == CoxeterKind.SPHERICAL for c in self.components)

    def to_dict(self) -> dict:
        return {
            "irreducible": self.irreducible,
            "components": [c.to_dict() for c in self.components],
        }


class CartanDocument(BaseModel):
    """Schema of the JSON input document."""

    model_config = ConfigDict(extra="forbid")

    name: Optional[StrictStr] = None
    cartan: List[List[StrictInt]]
    q: StrictInt = Field(default=2, ge=2)


def parse_gcm(document: str) -> GeneralizedCartanMatrix:
    """
    Parse and validate a GCM document.

    Args:
        document: UTF-8 JSON text {"name": ..., "cartan": [[...]], "q": ...}

    Returns:
        Validated GeneralizedCartanMatrix

    Raises:
        CartanMatrixError: malformed JSON, schema mismatch or invariant violation
    """
    try:
        payload = json.loads(document)
    except json.JSONDecodeError as e:
        # json.loads already rejects trailing data ("Extra data")
        raise CartanMatrixError(f"malformed document: {e.msg}", f"line {e.lineno} column {e.colno}") from e

    if not isinstance(payload, dict):
        raise CartanMatrixError("document must be a JSON object", "$")

    try:
        doc = CartanDocument.model_validate(payload)
    except ValidationError as e:
        first = e.errors()[0]
        location = "$." + ".".join(str(part) for part in first["loc"])
        raise CartanMatrixError(f"malformed document: {first['msg']}", location) from e

    matrix = GeneralizedCartanMatrix(tuple(tuple(row) for row in doc.cartan), name=doc.name, q=doc.q)
    logger.debug(f"Parsed GCM {matrix.name or '<unnamed>'} of rank {matrix.n}")
    return matrix


def load_gcm(path: str) -> GeneralizedCartanMatrix:
    """Read a GCM document from disk."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_gcm(handle.read())


def submatrix(A: GeneralizedCartanMatrix, indices: Sequence[int]) -> GeneralizedCartanMatrix:
    """Restriction of A to the given generators (kept in the given order)."""
    label = ",".join(str(i + 1) for i in indices)
    return GeneralizedCartanMatrix(
        tuple(tuple(A.entries[i][j] for j in indices) for i in indices),
        name=f"{A.name or 'gcm'}[{label}]",
        q=A.q,
    )


def coxeter_matrix(A: GeneralizedCartanMatrix) -> CoxeterDiagram:
    """Coxeter matrix of the Weyl group of A (p = a_ij a_ji: 0→2, 1→3, 2→4, 3→6, ≥4→∞)."""
    n = A.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(1)
                continue
            p = A.entries[i][j] * A.entries[j][i]
            row.append(_BOND_ORDERS.get(p, INFINITY))
        rows.append(tuple(row))
    return CoxeterDiagram(tuple(rows))


def components(D: CoxeterDiagram) -> List[FrozenSet[int]]:
    """Connected components of the diagram (edges m >= 3), sorted by least index."""
    parts = [frozenset(c) for c in nx.connected_components(D.graph())]
    return sorted(parts, key=min)


# ---------------------------------------------------------------------------
# Classification tables
# ---------------------------------------------------------------------------

def _path(labels: Sequence[CoxeterEntry]) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(len(labels) + 1))
    for k, m in enumerate(labels):
        graph.add_edge(k, k + 1, m=m)
    return graph


def _star(arms: Sequence[int]) -> nx.Graph:
    """Simply-laced tree: a centre node with arms of the given lengths."""
    graph = nx.Graph()
    graph.add_node(0)
    nxt = 1
    for length in arms:
        prev = 0
        for _ in range(length):
            graph.add_edge(prev, nxt, m=3)
            prev = nxt
            nxt += 1
    return graph


def _cycle(size: int) -> nx.Graph:
    graph = nx.cycle_graph(size)
    nx.set_edge_attributes(graph, 3, "m")
    return graph


def _forked(k: int, last: CoxeterEntry, fork_both: bool) -> nx.Graph:
    """Rank k+1: nodes 0,1 hang on node 2; chain 2..; tail either a fork or a `last` bond."""
    graph = nx.Graph()
    graph.add_edge(0, 2, m=3)
    graph.add_edge(1, 2, m=3)
    if fork_both:
        for v in range(2, k - 2):
            graph.add_edge(v, v + 1, m=3)
        graph.add_edge(k - 1, k - 2, m=3)
        graph.add_edge(k, k - 2, m=3)
    else:
        for v in range(2, k - 1):
            graph.add_edge(v, v + 1, m=3)
        graph.add_edge(k - 1, k, m=last)
    return graph


def _spherical_candidates(rank: int) -> Iterator[Tuple[str, nx.Graph]]:
    if rank == 1:
        single = nx.Graph()
        single.add_node(0)
        yield "A1", single
        return
    yield f"A{rank}", _path([3] * (rank - 1))
    yield f"B{rank}", _path([3] * (rank - 2) + [4])
    if rank >= 4:
        yield f"D{rank}", _star([1, 1, rank - 3])
    if rank in (6, 7, 8):
        yield f"E{rank}", _star([1, 2, rank - 4])
    if rank == 4:
        yield "F4", _path([3, 4, 3])
    if rank == 2:
        yield "G2", _path([6])


def _affine_candidates(rank: int) -> Iterator[Tuple[str, nx.Graph]]:
    k = rank - 1
    if k == 1:
        yield "A1~", _path([INFINITY])
        return
    if k >= 2:
        yield f"A{k}~", _cycle(rank)
        yield f"C{k}~", _path([4] + [3] * (k - 2) + [4])
    if k >= 3:
        yield f"B{k}~", _forked(k, 4, fork_both=False)
    if k >= 4:
        yield f"D{k}~", _star([1, 1, 1, 1]) if k == 4 else _forked(k, 3, fork_both=True)
    if k == 6:
        yield "E6~", _star([2, 2, 2])
    if k == 7:
        yield "E7~", _star([1, 3, 3])
    if k == 8:
        yield "E8~", _star([1, 2, 5])
    if k == 4:
        yield "F4~", _path([3, 3, 4, 3])
    if k == 2:
        yield "G2~", _path([3, 6])


def _same_bond(a: Dict, b: Dict) -> bool:
    return a["m"] == b["m"]


def _classify_component(D: CoxeterDiagram, indices: Tuple[int, ...]) -> ComponentType:
    graph = D.graph(indices)
    rank = len(indices)
    tables = (
        (CoxeterKind.SPHERICAL, _spherical_candidates(rank)),
        (CoxeterKind.AFFINE, _affine_candidates(rank)),
    )
    for kind, candidates in tables:
        for label, table in candidates:
            if table.number_of_edges() != graph.number_of_edges():
                continue
            if nx.is_isomorphic(graph, table, edge_match=_same_bond):
                return ComponentType(indices, kind, label)
    return ComponentType(indices, CoxeterKind.INDEFINITE, None)


def classify_type(D: CoxeterDiagram) -> TypeClassification:
    """
    Classify every irreducible component of D.

    Each component is matched by labelled-graph isomorphism against the
    crystallographic spherical tables (A, B/C, D, E6-8, F4, G2) and affine
    tables (A~ including the ∞-bond A1~, B~, C~, D~, E6-8~, F4~, G2~);
    anything unmatched is indefinite.
    """
    result = []
    for part in components(D):
        indices = tuple(sorted(part))
        component = _classify_component(D, indices)
        logger.debug(f"Component {[i + 1 for i in indices]} classified {component.kind.value} {component.label or ''}")
        result.append(component)
    return TypeClassification(tuple(result))


def main_theorem_applicable(A: GeneralizedCartanMatrix) -> Tuple[bool, str]:
    """
    Check the type hypothesis of the non-closedness theorem.

    Returns:
        Tuple of (applicable, reason); reason names the failing condition
        ("reducible", "spherical", "affine") or "irreducible indefinite".
    """
    classification = classify_type(coxeter_matrix(A))
    if not classification.irreducible:
        return False, "reducible"
    kind = classification.components[0].kind
    if kind == CoxeterKind.SPHERICAL:
        return False, "spherical"
    if kind == CoxeterKind.AFFINE:
        return False, "affine"
    return True, "irreducible indefinite"
