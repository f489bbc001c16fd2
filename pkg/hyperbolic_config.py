"""
Fundamental Hyperbolic Configurations and Contraction Certificates
Finds gamma, assembles the triple (alpha, beta, gamma) for a hyperbolic Weyl
element, re-verifies it independently and emits the non-closedness
certificate. Reducible inputs are dispatched component by component.
"""

import logging
from enum import Enum
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

from axis import AxisAnalyzer, Direction, EndCertificate, EndVerdict, PreconditionError
from cartan import (
    CoxeterKind,
    GeneralizedCartanMatrix,
    TypeClassification,
    classify_type,
    coxeter_matrix,
    main_theorem_applicable,
    submatrix,
)
from roots import InconclusiveError, Root, RootSystem, create_root_system
from settings import SearchCaps, get_default_caps
from weyl import IsometryType, WeylElement

logger = logging.getLogger(__name__)

MAX_COMPONENT_WORKERS = 4


class SearchExhausted(InconclusiveError):
    """find_gamma ran through every root within its orbit cap."""

    def __init__(self, message: str, cap: int):
        super().__init__(message, stage="find_gamma", cap=cap)


class NotApplicableError(ValueError):
    """The type hypothesis of the non-closedness theorem fails."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"not applicable: {reason}")


class VerificationError(RuntimeError):
    """An emitted configuration failed independent re-verification."""


class Conclusion(str, Enum):
    TRIVIAL_CONTRACTION = "TrivialContraction"
    NOT_CLOSED = "NotClosed"
    PRODUCT_SPLIT = "ProductSplit"
    NOT_APPLICABLE = "NotApplicable"
    INCONCLUSIVE = "Inconclusive"


RELATION_NAMES = (
    "disjoint(alpha,beta)",
    "disjoint(alpha,gamma)",
    "disjoint(beta,gamma)",
    "alpha != -beta",
    "alpha != -gamma",
    "beta != -gamma",
)

ASSUMPTIONS = {
    "contractive_root_groups": "asserted-by-theory",
    "note": "split and almost split Kac-Moody groups have contractive root groups; not verified computationally",
}


@dataclass(frozen=True)
class HyperbolicConfiguration:
    w: WeylElement
    alpha: Root
    beta: Root
    gamma: Root
    relations: Dict[str, bool]
    end_certificates: Tuple[EndCertificate, EndCertificate]
    caps_used: SearchCaps

    def to_dict(self) -> dict:
        return {
            "word": self.w.word_text(),
            "alpha": self.alpha.to_list(),
            "beta": self.beta.to_list(),
            "gamma": self.gamma.to_list(),
            "relations": {name: self.relations[name] for name in RELATION_NAMES},
            "end_certificates": [c.to_dict() for c in self.end_certificates],
            "caps_used": self.caps_used.as_report(),
        }


@dataclass(frozen=True)
class ContractionCertificate:
    cartan: GeneralizedCartanMatrix
    word: Tuple[int, ...]
    classification: TypeClassification
    conclusion: Conclusion
    isometry: Optional[IsometryType] = None
    configuration: Optional[HyperbolicConfiguration] = None
    parts: Tuple[Tuple[Tuple[int, ...], "ContractionCertificate"], ...] = ()
    reason: Optional[str] = None
    statements: Tuple[str, ...] = ()
    verification: Optional[dict] = None
    assumptions: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.conclusion == Conclusion.NOT_CLOSED:
            if self.configuration is None or self.isometry != IsometryType.HYPERBOLIC:
                raise ValueError("NotClosed needs a hyperbolic word and a configuration")
        if self.conclusion == Conclusion.TRIVIAL_CONTRACTION and self.isometry != IsometryType.ELLIPTIC:
            raise ValueError("TrivialContraction needs an elliptic word")

    def to_dict(self) -> dict:
        return {
            "gcm": self.cartan.to_dict(),
            "word": " ".join(str(i + 1) for i in self.word),
            "classification": self.classification.to_dict(),
            "isometry": self.isometry.value if self.isometry else None,
            "conclusion": self.conclusion.value,
            "reason": self.reason,
            "configuration": self.configuration.to_dict() if self.configuration else None,
            "components": [
                {"generators": [i + 1 for i in indices], "certificate": part.to_dict()}
                for indices, part in self.parts
            ],
            "statements": list(self.statements),
            "verification": self.verification,
            "assumptions": dict(self.assumptions),
        }

    def walk(self):
        """This certificate and every nested component certificate."""
        yield self
        for _, part in self.parts:
            yield from part.walk()


def find_gamma(
    roots: RootSystem,
    alpha: Root,
    beta: Root,
    orbit_cap: int,
    radius_cap: int,
    centers: Sequence[WeylElement] = (),
) -> Root:
    """
    First real root disjoint from both alpha and beta and opposite to neither.

    Args:
        roots: ambient root system
        alpha, beta: a disjoint, non-opposite pair
        orbit_cap: word length bound for the real-root enumeration
        radius_cap: BFS radius for each disjointness test
        centers: extra chambers for the quadrant witness search

    Raises:
        SearchExhausted: no such root among the enumerated ones
    """
    if alpha == -beta or alpha == beta:
        raise ValueError("find_gamma needs distinct, non-opposite alpha and beta")

    excluded = {alpha, beta, -alpha, -beta}
    inconclusive = 0
    examined = 0
    for gamma in roots.iter_real_roots(orbit_cap):
        if gamma in excluded:
            continue
        examined += 1
        # crossing walls are never disjoint
        if any(0 <= roots.pairing(gamma, r) * roots.pairing(r, gamma) <= 3 for r in (alpha, beta)):
            continue
        try:
            if roots.disjoint(gamma, alpha, radius_cap, centers) and roots.disjoint(gamma, beta, radius_cap, centers):
                logger.debug(f"gamma={gamma} found after {examined} candidates")
                return gamma
        except InconclusiveError:
            inconclusive += 1

    raise SearchExhausted(
        f"no root disjoint from alpha={alpha} and beta={beta} among {examined} candidates "
        f"({inconclusive} inconclusive)",
        cap=orbit_cap,
    )


def verify_configuration(
    configuration: HyperbolicConfiguration,
    cartan: GeneralizedCartanMatrix,
    caps: Optional[SearchCaps] = None,
) -> Tuple[bool, List[str]]:
    """
    Re-check the six relations and both end certificates from scratch.

    Uses a fresh root system and, unless caps are given, doubled caps.

    Returns:
        Tuple of (passed, failed check names)
    """
    caps = caps or configuration.caps_used.doubled()
    roots = create_root_system(cartan)
    analyzer = AxisAnalyzer(roots, caps)
    w = roots.group.element(configuration.w.word)
    centers = analyzer.axis_centers(w)
    alpha, beta, gamma = configuration.alpha, configuration.beta, configuration.gamma
    failures = []

    checks = {
        "alpha != -beta": lambda: alpha != -beta,
        "alpha != -gamma": lambda: alpha != -gamma,
        "beta != -gamma": lambda: beta != -gamma,
        "disjoint(alpha,beta)": lambda: roots.disjoint(alpha, beta, caps.bfs_radius, centers),
        "disjoint(alpha,gamma)": lambda: roots.disjoint(alpha, gamma, caps.bfs_radius, centers),
        "disjoint(beta,gamma)": lambda: roots.disjoint(beta, gamma, caps.bfs_radius, centers),
        "backward end inside alpha": lambda: analyzer.end_sign(alpha, w, Direction.BACKWARD) == EndVerdict.INSIDE,
        "forward end inside beta": lambda: analyzer.end_sign(beta, w, Direction.FORWARD) == EndVerdict.INSIDE,
    }
    for name, check in checks.items():
        try:
            if not check():
                failures.append(name)
        except InconclusiveError as e:
            failures.append(f"{name} (inconclusive: {e})")

    if failures:
        logger.error(f"❌ Configuration for {configuration.w.word_text()!r} failed re-verification: {failures}")
    return not failures, failures


def fundamental_configuration(
    cartan: GeneralizedCartanMatrix,
    word: Sequence[int],
    caps: Optional[SearchCaps] = None,
    roots: Optional[RootSystem] = None,
) -> HyperbolicConfiguration:
    """
    Assemble a certified fundamental hyperbolic configuration for a word.

    Raises:
        NotApplicableError: reducible, spherical or affine input
        PreconditionError: the word is elliptic
        InconclusiveError: a search stage ran out of budget (stage attached)
        VerificationError: the assembled triple fails its own re-check
    """
    caps = caps or get_default_caps()
    applicable, reason = main_theorem_applicable(cartan)
    if not applicable:
        raise NotApplicableError(reason)

    roots = roots or create_root_system(cartan)
    w = roots.group.element(word)
    if not roots.group.is_hyperbolic(w):
        raise PreconditionError(f"elliptic: word {w.word_text()!r} has finite order")

    analyzer = AxisAnalyzer(roots, caps)
    alpha, beta = analyzer.pick_alpha_beta(w)
    gamma = find_gamma(roots, alpha, beta, caps.orbit_cap, caps.bfs_radius, analyzer.axis_centers(w))

    relations = {
        "disjoint(alpha,beta)": True,
        "disjoint(alpha,gamma)": True,
        "disjoint(beta,gamma)": True,
        "alpha != -beta": alpha != -beta,
        "alpha != -gamma": alpha != -gamma,
        "beta != -gamma": beta != -gamma,
    }
    configuration = HyperbolicConfiguration(
        w=w,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        relations=relations,
        end_certificates=(
            analyzer.end_certificate(alpha, w, Direction.BACKWARD),
            analyzer.end_certificate(beta, w, Direction.FORWARD),
        ),
        caps_used=caps,
    )

    passed, failures = verify_configuration(configuration, cartan, caps)
    if not passed:
        raise VerificationError(f"configuration failed its own checks: {failures}")
    logger.info(f"✅ Configuration alpha={alpha} beta={beta} gamma={gamma} for {w.word_text()!r}")
    return configuration


def project_word(word: Sequence[int], indices: Sequence[int]) -> Tuple[int, ...]:
    """Letters of the word lying in a component, renumbered within it."""
    position = {g: k for k, g in enumerate(indices)}
    return tuple(position[i] for i in word if i in position)


def _not_closed_statements(gamma: Root) -> Tuple[str, ...]:
    minus_gamma = f"({-gamma})"
    return (
        f"RootGroup({minus_gamma}) ⊆ U_w ∩ U_w^-1",
        f"g^-1 RootGroup({minus_gamma}) g ⊆ U_h ∩ U_h^-1 for every lift h of w, g folding the axis of h into the standard apartment",
        "U_w is not closed",
    )


def analyze(
    cartan: GeneralizedCartanMatrix,
    word: Sequence[int],
    caps: Optional[SearchCaps] = None,
) -> ContractionCertificate:
    """
    Decide the contraction-group verdict for a Weyl word.

    Args:
        cartan: the GCM
        word: 0-based generator word
        caps: search caps (environment defaults when omitted)

    Returns:
        ContractionCertificate; stage failures give an Inconclusive conclusion

    Raises:
        VerificationError: an emitted configuration failed re-verification
    """
    caps = caps or get_default_caps()
    word = tuple(word)
    classification = classify_type(coxeter_matrix(cartan))
    assumptions = {**ASSUMPTIONS, "q": cartan.q}

    if not classification.irreducible:
        return _analyze_product(cartan, word, caps, classification, assumptions)

    roots = create_root_system(cartan)
    w = roots.group.element(word)
    isometry = roots.group.classify_isometry(w)
    base = dict(cartan=cartan, word=word, classification=classification, isometry=isometry, assumptions=assumptions)

    if isometry == IsometryType.ELLIPTIC:
        return ContractionCertificate(
            conclusion=Conclusion.TRIVIAL_CONTRACTION,
            statements=("U_w is trivial, hence closed",),
            **base,
        )

    kind = classification.components[0].kind
    if kind == CoxeterKind.AFFINE:
        return ContractionCertificate(
            conclusion=Conclusion.NOT_APPLICABLE,
            reason="affine: outside Main Theorem scope",
            **base,
        )

    try:
        configuration = fundamental_configuration(cartan, word, caps, roots)
    except InconclusiveError as e:
        logger.warning(f"⚠️  Inconclusive at stage {e.stage} (cap {e.cap}) for {w.word_text()!r}")
        return ContractionCertificate(
            conclusion=Conclusion.INCONCLUSIVE,
            reason=str(e),
            **base,
        )

    doubled = caps.doubled()
    passed, failures = verify_configuration(configuration, cartan, doubled)
    if not passed:
        raise VerificationError(f"re-verification at doubled caps failed: {failures}")

    return ContractionCertificate(
        conclusion=Conclusion.NOT_CLOSED,
        configuration=configuration,
        statements=_not_closed_statements(configuration.gamma),
        verification={"caps": doubled.as_report(), "passed": True},
        **base,
    )


def _analyze_product(
    cartan: GeneralizedCartanMatrix,
    word: Tuple[int, ...],
    caps: SearchCaps,
    classification: TypeClassification,
    assumptions: dict,
) -> ContractionCertificate:
    """Analyze each component on its own and combine by the product rule."""
    jobs = []
    for component in classification.components:
        indices = component.indices
        jobs.append((indices, submatrix(cartan, indices), project_word(word, indices)))

    logger.info(f"Reducible diagram: analyzing {len(jobs)} components")
    with ThreadPoolExecutor(max_workers=min(len(jobs), MAX_COMPONENT_WORKERS)) as executor:
        futures = [executor.submit(analyze, sub, local_word, caps) for _, sub, local_word in jobs]
        results = [future.result() for future in futures]

    parts = tuple((indices, result) for (indices, _, _), result in zip(jobs, results))
    statements = ["U_w = U_w1 × ... × U_wk over the diagram components"]
    if any(part.conclusion == Conclusion.NOT_CLOSED for _, part in parts):
        statements.append("U_w is not closed")
    elif all(part.conclusion == Conclusion.TRIVIAL_CONTRACTION for _, part in parts):
        statements.append("U_w is trivial, hence closed")

    return ContractionCertificate(
        cartan=cartan,
        word=word,
        classification=classification,
        conclusion=Conclusion.PRODUCT_SPLIT,
        parts=parts,
        statements=tuple(statements),
        assumptions=assumptions,
    )
