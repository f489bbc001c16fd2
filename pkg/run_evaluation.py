"""
Corpus Evaluation Runner
Run every evaluator over the shipped GCM corpus and print a summary.
"""

import sys
import inspect
import logging
import argparse
from typing import List, Optional

from evaluation import CorpusEvaluationDataset, create_evaluators
from settings import get_default_caps

# Setup logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def run_evaluation(category: Optional[str] = None) -> List[dict]:
    """
    Run all evaluators on the corpus.

    Args:
        category: restrict to one category (spherical, affine, indefinite, reducible)

    Returns:
        One result per case: {"case", "evaluations"}
    """
    logger.info("🚀 Starting corpus evaluation")
    logger.info("=" * 60)

    cases = CorpusEvaluationDataset.get_by_category(category) if category else CorpusEvaluationDataset.get_dataset()
    evaluators = create_evaluators()
    logger.info(f"📋 Loaded {len(evaluators)} evaluators, {len(cases)} cases")
    caps = get_default_caps()

    results = []
    for i, case in enumerate(cases, 1):
        logger.info(f"Case {i}/{len(cases)}: {case['input']} ({case['category']})")
        try:
            cartan = CorpusEvaluationDataset.load(case)
        except Exception as e:
            logger.error(f"❌ Could not load {case['input']}: {e}", exc_info=True)
            results.append({"case": case, "evaluations": {"load": {"key": "load", "score": 0, "comment": str(e)}}})
            continue

        evaluations = {}
        for evaluator in evaluators:
            kwargs = {"caps": caps} if "caps" in inspect.signature(evaluator).parameters else {}
            result = evaluator(case, cartan, **kwargs)
            if result is not None:
                evaluations[result["key"]] = result
        results.append({"case": case, "evaluations": evaluations})

        avg_score = sum(e["score"] for e in evaluations.values()) / len(evaluations)
        logger.info(f"Average Score: {avg_score:.2f}")

    logger.info("✅ Corpus evaluation complete")
    return results


def print_evaluation_summary(results: list):
    """Print summary of evaluation results."""
    print("\n" + "=" * 60)
    print("📊 EVALUATION SUMMARY")
    print("=" * 60)

    evaluator_scores = {}
    for result in results:
        for eval_name, eval_result in result["evaluations"].items():
            evaluator_scores.setdefault(eval_name, []).append(eval_result["score"])

    print("\n📋 Average Scores by Evaluator:")
    for eval_name, scores in evaluator_scores.items():
        print(f"  {eval_name}: {sum(scores) / len(scores):.3f}")

    all_scores = [score for scores in evaluator_scores.values() for score in scores]
    overall_avg = sum(all_scores) / len(all_scores) if all_scores else 0.0
    print(f"\n🎯 Overall Average: {overall_avg:.3f}")

    category_scores = {}
    for result in results:
        evaluations = result["evaluations"].values()
        avg_score = sum(e["score"] for e in evaluations) / len(evaluations)
        category_scores.setdefault(result["case"]["category"], []).append(avg_score)

    print("\n📂 Scores by Category:")
    for category, scores in sorted(category_scores.items()):
        print(f"  {category}: {sum(scores) / len(scores):.3f} ({len(scores)} cases)")

    failures = [
        (result["case"]["input"], e["key"], e["comment"])
        for result in results
        for e in result["evaluations"].values()
        if e["score"] < 1
    ]
    if failures:
        print("\n❌ Below full score:")
        for name, key, comment in failures:
            print(f"  {name} [{key}]: {comment}")
    print("=" * 60)


def all_passed(results: list) -> bool:
    return all(e["score"] >= 1 for result in results for e in result["evaluations"].values())


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run the corpus evaluation")
    parser.add_argument(
        "--category",
        choices=["spherical", "affine", "indefinite", "reducible"],
        help="Evaluate one category only"
    )
    args = parser.parse_args()

    results = run_evaluation(category=args.category)
    print_evaluation_summary(results)
    sys.exit(0 if all_passed(results) else 1)
