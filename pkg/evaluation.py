"""
Corpus Evaluation for the Contraction Certificate Engine
Shipped GCM corpus with ground-truth classifications, and evaluators that
score the engine against it.
"""

import random
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from cartan import CoxeterKind, GeneralizedCartanMatrix, classify_type, coxeter_matrix, load_gcm, main_theorem_applicable
from hyperbolic_config import Conclusion, analyze
from settings import SearchCaps, get_default_caps
from weyl import WeylGroup, create_weyl_group

logger = logging.getLogger(__name__)

CORPUS_DIR = Path(__file__).resolve().parent / "corpus"

Evaluator = Callable[[Dict[str, Any], GeneralizedCartanMatrix], Optional[Dict[str, Any]]]


class CorpusEvaluationDataset:
    """
    Corpus GCMs with their expected classification and applicability.
    """

    TEST_CASES = [
        # Spherical
        {
            "input": "a2.json",
            "output": {"kinds": ["spherical"], "labels": ["A2"], "applicable": False},
            "category": "spherical",
            "tags": ["rank2", "simply_laced"],
        },
        {
            "input": "m_minus1.json",
            "output": {"kinds": ["spherical"], "labels": ["A2"], "applicable": False},
            "category": "spherical",
            "tags": ["rank2", "family"],
        },
        {
            "input": "m_minus2.json",
            "output": {"kinds": ["spherical"], "labels": ["B2"], "applicable": False},
            "category": "spherical",
            "tags": ["rank2", "family"],
        },
        {
            "input": "m_minus3.json",
            "output": {"kinds": ["spherical"], "labels": ["G2"], "applicable": False},
            "category": "spherical",
            "tags": ["rank2", "family"],
        },
        # Affine
        {
            "input": "a1_affine.json",
            "output": {"kinds": ["affine"], "labels": ["A1~"], "applicable": False},
            "category": "affine",
            "tags": ["rank2"],
        },
        {
            "input": "m_minus5.json",
            "output": {"kinds": ["affine"], "labels": ["A1~"], "applicable": False},
            "category": "affine",
            "tags": ["rank2", "family"],
        },
        {
            "input": "m_minus6.json",
            "output": {"kinds": ["affine"], "labels": ["A1~"], "applicable": False},
            "category": "affine",
            "tags": ["rank2", "family"],
        },
        {
            "input": "m_minus10.json",
            "output": {"kinds": ["affine"], "labels": ["A1~"], "applicable": False},
            "category": "affine",
            "tags": ["rank2", "family"],
        },
        {
            "input": "affine_a2t.json",
            "output": {"kinds": ["affine"], "labels": ["A2~"], "applicable": False},
            "category": "affine",
            "tags": ["rank3", "simply_laced"],
        },
        # Indefinite
        {
            "input": "tri334.json",
            "output": {"kinds": ["indefinite"], "labels": [None], "applicable": True},
            "category": "indefinite",
            "tags": ["rank3", "triangle"],
        },
        {
            "input": "right_angled.json",
            "output": {"kinds": ["indefinite"], "labels": [None], "applicable": True},
            "category": "indefinite",
            "tags": ["rank3", "free_product"],
        },
        # Reducible
        {
            "input": "block_a2_tri334.json",
            "output": {"kinds": ["spherical", "indefinite"], "labels": ["A2", None], "applicable": False},
            "category": "reducible",
            "tags": ["rank5", "block_diagonal"],
        },
    ]

    @classmethod
    def get_dataset(cls) -> List[Dict[str, Any]]:
        """Get all test cases."""
        return cls.TEST_CASES.copy()

    @classmethod
    def get_by_category(cls, category: str) -> List[Dict[str, Any]]:
        """Get test cases by category."""
        return [case for case in cls.TEST_CASES if case["category"] == category]

    @staticmethod
    def load(case: Dict[str, Any]) -> GeneralizedCartanMatrix:
        return load_gcm(str(CORPUS_DIR / case["input"]))


class CorpusEvaluators:
    """
    Evaluators scoring the engine on one corpus case.

    Each returns {"key", "score", "comment"}, or None when the case is out of
    its scope.
    """

    WORD_PROBLEM_RADIUS = 5
    SAMPLED_WORDS = 3
    SEED = 0

    @staticmethod
    def classification_evaluator(case: Dict[str, Any], cartan: GeneralizedCartanMatrix) -> Dict[str, Any]:
        """Exact match of component kinds and table labels."""
        classification = classify_type(coxeter_matrix(cartan))
        kinds = [c.kind.value for c in classification.components]
        labels = [c.label for c in classification.components]
        expected = case["output"]
        if kinds == expected["kinds"] and labels == expected["labels"]:
            return {"key": "classification", "score": 1, "comment": f"{kinds} {labels}"}
        return {
            "key": "classification",
            "score": 0,
            "comment": f"expected {expected['kinds']} {expected['labels']}, got {kinds} {labels}",
        }

    @staticmethod
    def applicability_evaluator(case: Dict[str, Any], cartan: GeneralizedCartanMatrix) -> Dict[str, Any]:
        applicable, reason = main_theorem_applicable(cartan)
        score = 1 if applicable == case["output"]["applicable"] else 0
        return {"key": "applicability", "score": score, "comment": reason}

    @staticmethod
    def word_problem_evaluator(case: Dict[str, Any], cartan: GeneralizedCartanMatrix) -> Optional[Dict[str, Any]]:
        """Matrix length against breadth-first level on the Cayley ball."""
        if cartan.n > 3:
            return None
        group = create_weyl_group(cartan)
        ball = group.cayley_ball(CorpusEvaluators.WORD_PROBLEM_RADIUS)
        mismatches = [w.word_text() for w in ball if group.length(w) != len(w.word)]
        score = 1 - len(mismatches) / len(ball)
        comment = f"{len(ball)} elements" if not mismatches else f"length mismatch for {mismatches[:3]}"
        return {"key": "word_problem", "score": score, "comment": comment}

    @staticmethod
    def _hyperbolic_words(group: WeylGroup, count: int) -> List[tuple]:
        rng = random.Random(CorpusEvaluators.SEED)
        words = []
        for _ in range(count):
            word = group.random_hyperbolic_word(rng)
            if word is not None:
                words.append(word)
        return words

    @staticmethod
    def affine_exclusion_evaluator(case: Dict[str, Any], cartan: GeneralizedCartanMatrix,
                                   caps: Optional[SearchCaps] = None) -> Optional[Dict[str, Any]]:
        """Hyperbolic words of an affine type are reported NotApplicable."""
        if case["category"] != CoxeterKind.AFFINE.value:
            return None
        group = create_weyl_group(cartan)
        words = CorpusEvaluators._hyperbolic_words(group, CorpusEvaluators.SAMPLED_WORDS)
        if not words:
            return {"key": "affine_exclusion", "score": 0, "comment": "no hyperbolic word sampled"}
        verdicts = [analyze(cartan, word, caps or get_default_caps()).conclusion for word in words]
        excluded = sum(1 for v in verdicts if v == Conclusion.NOT_APPLICABLE)
        return {"key": "affine_exclusion", "score": excluded / len(words), "comment": f"{excluded}/{len(words)} excluded"}

    @staticmethod
    def indefinite_success_evaluator(case: Dict[str, Any], cartan: GeneralizedCartanMatrix,
                                     caps: Optional[SearchCaps] = None) -> Optional[Dict[str, Any]]:
        """Hyperbolic words of an irreducible indefinite type get a verified NotClosed certificate."""
        if case["category"] != CoxeterKind.INDEFINITE.value:
            return None
        group = create_weyl_group(cartan)
        words = CorpusEvaluators._hyperbolic_words(group, CorpusEvaluators.SAMPLED_WORDS)
        if not words:
            return {"key": "indefinite_success", "score": 0, "comment": "no hyperbolic word sampled"}
        certified = 0
        for word in words:
            certificate = analyze(cartan, word, caps or get_default_caps())
            if certificate.conclusion == Conclusion.NOT_CLOSED and certificate.verification["passed"]:
                certified += 1
            else:
                logger.warning(f"⚠️  {certificate.conclusion.value} for word {certificate.to_dict()['word']!r}")
        return {"key": "indefinite_success", "score": certified / len(words), "comment": f"{certified}/{len(words)} certified"}


def create_evaluators() -> List[Evaluator]:
    """Create list of all evaluators for the corpus."""
    return [
        CorpusEvaluators.classification_evaluator,
        CorpusEvaluators.applicability_evaluator,
        CorpusEvaluators.word_problem_evaluator,
        CorpusEvaluators.affine_exclusion_evaluator,
        CorpusEvaluators.indefinite_success_evaluator,
    ]
