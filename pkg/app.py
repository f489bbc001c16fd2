"""
Contraction Certificate Engine - Command Line Interface
Classify generalized Cartan matrices, certify non-closed contraction groups
for Weyl words, and run the regular-tree checks. Reports are JSON on standard
output; diagnostics go to standard error.
"""

import os
import sys
import json
import time
import hashlib
import logging
import argparse
from datetime import datetime
from typing import List, Optional, Tuple

from cartan import CartanMatrixError, classify_type, components, coxeter_matrix, main_theorem_applicable, parse_gcm
from guardrails import InputGuardrails, create_guardrails
from hyperbolic_config import Conclusion, VerificationError, analyze
from roots import InconclusiveError, RootError, create_root_system
from settings import TOOL_VERSION, SearchCaps, get_default_caps, get_tree_settings
from tree_simulator import (
    InsufficientDepth,
    InvariantViolation,
    MembershipVerdict,
    RegularTree,
    TreeAutomorphismApprox,
    TreeSpecError,
    classify_tree_isometry,
    create_tree,
    fold_line,
    in_contraction,
    in_parabolic,
    line_from_document,
    nonclosed_witness,
    scale,
    standard_line,
)
from weyl import WordError, create_weyl_group

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT_ERROR = 3

TREE_COMMANDS = ("classify", "contract", "parabolic", "scale", "fold", "witness")


class InputError(Exception):
    """Unreadable file or guardrail rejection."""


def setup_logging(verbose: bool = False) -> None:
    """
    Configure the root logger: standard error always, plus a dated file in
    CONTRACTION_LOG_DIR when that is set.
    """
    level_name = "INFO" if verbose else os.getenv("CONTRACTION_LOG_LEVEL", "WARNING")
    level = getattr(logging, level_name.upper(), logging.WARNING)

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    log_dir = os.getenv("CONTRACTION_LOG_DIR")
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        filename = f'contraction_engine_{datetime.now().strftime("%Y%m%d")}.log'
        handlers.append(logging.FileHandler(os.path.join(log_dir, filename)))

    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e


def _digest(*parts: str) -> str:
    sha = hashlib.sha256()
    for part in parts:
        sha.update(part.encode("utf-8"))
        sha.update(b"\0")
    return sha.hexdigest()


def _accept(check: Tuple[bool, object, Optional[str]]):
    is_valid, value, error_message = check
    if not is_valid:
        raise InputError(error_message)
    return value


class ContractionEngine:
    """
    Front end over the engine modules; every method returns (payload, exit code).

    Args:
        guardrails: input guardrails (created when omitted)
    """

    def __init__(self, guardrails: Optional[InputGuardrails] = None):
        self.guardrails = guardrails or create_guardrails()

    # ------------------------------------------------------------------
    # Coxeter side
    # ------------------------------------------------------------------

    def classify(self, document: str) -> Tuple[dict, int]:
        A = parse_gcm(document)
        _accept(self.guardrails.validate_rank(A.n))
        D = coxeter_matrix(A)
        classification = classify_type(D)
        applicable, reason = main_theorem_applicable(A)
        group = create_weyl_group(A)
        payload = {
            "gcm": A.to_dict(),
            "coxeter_matrix": D.to_report(),
            "components": [[i + 1 for i in sorted(part)] for part in components(D)],
            "classification": classification.to_dict(),
            "applicable": {"value": applicable, "reason": reason},
            "coxeter_element": group.classify_isometry(group.coxeter_element()).value,
        }
        logger.info(f"✅ Classified {A.name or 'GCM'}: {[c.kind.value for c in classification.components]}")
        return payload, EXIT_OK

    def analyze(self, document: str, word_text: str, caps: SearchCaps) -> Tuple[dict, int]:
        A = parse_gcm(document)
        _accept(self.guardrails.validate_rank(A.n))
        word = _accept(self.guardrails.validate_word(word_text, A.n))
        _accept(self.guardrails.validate_caps(caps))

        certificate = analyze(A, word, caps)
        inconclusive = any(c.conclusion == Conclusion.INCONCLUSIVE for c in certificate.walk())
        if inconclusive:
            logger.warning(f"⚠️  Analysis of {word_text!r} is inconclusive within the caps")
        else:
            logger.info(f"✅ {certificate.conclusion.value} for word {word_text!r}")
        return certificate.to_dict(), EXIT_INCONCLUSIVE if inconclusive else EXIT_OK

    def walls(self, document: str, alpha_text: str, beta_text: str, caps: SearchCaps) -> Tuple[dict, int]:
        """Relative position of the walls of two real roots given as literals."""
        A = parse_gcm(document)
        _accept(self.guardrails.validate_rank(A.n))
        _accept(self.guardrails.validate_caps(caps))
        roots = create_root_system(A)
        alpha = roots.root(_accept(self.guardrails.validate_root_literal(alpha_text, A.n)))
        beta = roots.root(_accept(self.guardrails.validate_root_literal(beta_text, A.n)))

        payload = {
            "alpha": alpha.to_list(),
            "beta": beta.to_list(),
            "pairings": [roots.pairing(alpha, beta), roots.pairing(beta, alpha)],
        }
        try:
            relation = roots.wall_relation(alpha, beta, radius_cap=caps.bfs_radius)
            disjoint = roots.disjoint(alpha, beta, radius_cap=caps.bfs_radius)
        except InconclusiveError as e:
            logger.warning(f"⚠️  Wall relation undecided: {e}")
            payload.update({"relation": None, "disjoint": None, "reason": str(e)})
            return payload, EXIT_INCONCLUSIVE
        payload.update({"relation": relation.to_dict(), "disjoint": disjoint})
        logger.info(f"✅ Walls of {alpha} and {beta}: {relation.kind.value}")
        return payload, EXIT_OK

    # ------------------------------------------------------------------
    # Tree side
    # ------------------------------------------------------------------

    def _tree_element(self, tree: RegularTree, portrait: Optional[str], args) -> TreeAutomorphismApprox:
        if portrait is not None:
            return tree.portrait_from_document(portrait)
        return tree.random_elliptic(args.fix_radius, args.depth, args.seed)

    def _translation(self, tree: RegularTree, line_text: Optional[str], args) -> TreeAutomorphismApprox:
        line = standard_line()
        if line_text is not None:
            degree, line = line_from_document(line_text)
            if degree != tree.degree:
                raise TreeSpecError(f"line degree {degree} does not match tree degree {tree.degree}")
        return tree.translation(line, args.translation_length, args.depth)

    def _portrait_degree(self, portrait: str, default: int) -> int:
        """Degree of a portrait document, after checking its size against the guardrails."""
        try:
            peek = json.loads(portrait)
        except json.JSONDecodeError:
            return default
        if isinstance(peek, dict) and isinstance(peek.get("degree"), int) and isinstance(peek.get("depth"), int):
            _accept(self.guardrails.validate_tree_limits(peek["degree"], peek["depth"]))
            return peek["degree"]
        return default

    def tree(self, command: str, args, portrait: Optional[str], line_text: Optional[str]) -> Tuple[dict, int]:
        _accept(self.guardrails.validate_tree_limits(args.degree, args.depth))
        degree = self._portrait_degree(portrait, args.degree) if portrait is not None else args.degree
        tree = create_tree(degree, args.type_preserving)

        if command in ("classify", "scale"):
            element = (
                tree.portrait_from_document(portrait)
                if portrait is not None
                else self._translation(tree, line_text, args)
            )
            if command == "classify":
                return {"isometry": classify_tree_isometry(element).to_dict()}, EXIT_OK
            return {"scale": scale(element), "q": tree.q}, EXIT_OK

        if command == "contract":
            g = self._tree_element(tree, portrait, args)
            h = self._translation(tree, line_text, args)
            result = in_contraction(g, h)
            code = EXIT_INCONCLUSIVE if result.verdict == MembershipVerdict.INCONCLUSIVE else EXIT_OK
            return {"contraction": result.to_dict()}, code

        if command == "parabolic":
            g = self._tree_element(tree, portrait, args)
            h = self._translation(tree, line_text, args)
            result = in_parabolic(g, h)
            return {"parabolic": result.to_dict()}, EXIT_OK if result.agrees else EXIT_VERIFICATION_FAILED

        if command == "fold":
            if line_text is not None:
                degree, line = line_from_document(line_text)
                tree = create_tree(degree, args.type_preserving)
            else:
                line = tree.random_line(args.seed)
            result = fold_line(tree, line, args.depth)
            payload = {"line": line.to_dict(), "fold": result.to_dict()}
            return payload, EXIT_OK if result.cauchy and result.folded else EXIT_VERIFICATION_FAILED

        h = tree.translation(standard_line(), args.translation_length, args.depth)
        transcript = nonclosed_witness(tree, h)
        return {"witness": transcript.to_dict()}, EXIT_OK if transcript.passed else EXIT_VERIFICATION_FAILED


def build_report(command: List[str], digest: str, payload: dict, caps: Optional[dict] = None,
                 timing: Optional[float] = None) -> dict:
    """Report with a stable key order."""
    report = {
        "tool_version": TOOL_VERSION,
        "command": command,
        "input_digest": digest,
        **payload,
    }
    if caps is not None:
        report["caps"] = caps
    if timing is not None:
        report["timing"] = {"seconds": round(timing, 3)}
    return report


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Contraction Certificate Engine")
    parser.add_argument("--verbose", action="store_true", help="Log progress at INFO level")
    parser.add_argument("--timing", action="store_true", help="Add elapsed time to the report")
    sub = parser.add_subparsers(dest="command", required=True)

    classify = sub.add_parser("classify", help="Classify a GCM document")
    classify.add_argument("file", help="GCM JSON document")

    analyze_cmd = sub.add_parser("analyze", help="Contraction-group verdict for a Weyl word")
    analyze_cmd.add_argument("file", help="GCM JSON document")
    analyze_cmd.add_argument("--word", required=True, help='1-based generator word, e.g. "1 2 1 3"')
    analyze_cmd.add_argument("--orbit-cap", type=int, default=None)
    analyze_cmd.add_argument("--bfs-radius", type=int, default=None)
    analyze_cmd.add_argument("--power-cap", "--max-power", dest="power_cap", type=int, default=None)
    analyze_cmd.add_argument("--periods", type=int, default=None)

    walls = sub.add_parser("walls", help="Relative position of the walls of two real roots")
    walls.add_argument("file", help="GCM JSON document")
    walls.add_argument("--alpha", required=True, help='Root literal, e.g. "1,0,0"')
    walls.add_argument("--beta", required=True, help='Root literal, e.g. "1,1,0"')
    walls.add_argument("--bfs-radius", type=int, default=None)

    tree = sub.add_parser("tree", help="Regular-tree model checks")
    tree.add_argument("tree_command", choices=TREE_COMMANDS)
    tree.add_argument("--degree", type=int, default=None)
    tree.add_argument("--depth", type=int, default=None)
    tree.add_argument("--seed", type=int, default=None)
    tree.add_argument("--type-preserving", action="store_true")
    tree.add_argument("--translation-length", type=int, default=2)
    tree.add_argument("--fix-radius", type=int, default=2, help="Fixed radius of the random elliptic g")
    tree.add_argument("--portrait", default=None, help="Portrait JSON document for g")
    tree.add_argument("--line", default=None, help="Line JSON document (axis of h, or the line to fold)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT_ERROR

    setup_logging(args.verbose)
    engine = ContractionEngine()
    started = time.perf_counter()
    caps_report = None

    try:
        if args.command == "classify":
            document = _read(args.file)
            digest = _digest(document)
            payload, code = engine.classify(document)
        elif args.command == "analyze":
            document = _read(args.file)
            digest = _digest(document, args.word)
            caps = get_default_caps(
                orbit_cap=args.orbit_cap,
                bfs_radius=args.bfs_radius,
                power_cap=args.power_cap,
                periods=args.periods,
            )
            caps_report = caps.as_report()
            payload, code = engine.analyze(document, args.word, caps)
            payload = {"certificate": payload}
        elif args.command == "walls":
            document = _read(args.file)
            digest = _digest(document, args.alpha, args.beta)
            caps = get_default_caps(bfs_radius=args.bfs_radius)
            caps_report = {"bfs_radius": caps.bfs_radius}
            payload, code = engine.walls(document, args.alpha, args.beta, caps)
        else:
            settings = get_tree_settings(degree=args.degree, depth=args.depth, seed=args.seed)
            args.degree, args.depth, args.seed = settings.degree, settings.depth, settings.seed
            portrait = _read(args.portrait) if args.portrait else None
            line_text = _read(args.line) if args.line else None
            digest = _digest(args.tree_command, portrait or "", line_text or "")
            payload, code = engine.tree(args.tree_command, args, portrait, line_text)
            caps_report = {"degree": args.degree, "depth": args.depth, "seed": args.seed}
    except (InputError, CartanMatrixError, WordError, RootError, TreeSpecError, InsufficientDepth) as e:
        logger.error(f"❌ Input error: {e}")
        print(json.dumps({"tool_version": TOOL_VERSION, "command": argv, "error": str(e)}, ensure_ascii=False))
        return EXIT_INPUT_ERROR
    except (VerificationError, InvariantViolation) as e:
        logger.error(f"❌ Verification failed: {e}", exc_info=True)
        print(json.dumps({"tool_version": TOOL_VERSION, "command": argv, "error": str(e)}, ensure_ascii=False))
        return EXIT_VERIFICATION_FAILED
    except RuntimeError as e:
        # crossing criteria disagreeing inside walls_cross
        logger.error(f"❌ Cross-check failed: {e}", exc_info=True)
        print(json.dumps({"tool_version": TOOL_VERSION, "command": argv, "error": str(e)}, ensure_ascii=False))
        return EXIT_VERIFICATION_FAILED
    except ValueError as e:
        # pydantic rejects out-of-range settings with a ValueError subclass
        logger.error(f"❌ Input error: {e}")
        print(json.dumps({"tool_version": TOOL_VERSION, "command": argv, "error": str(e)}, ensure_ascii=False))
        return EXIT_INPUT_ERROR

    elapsed = time.perf_counter() - started
    logger.info(f"Finished {args.command} in {elapsed:.3f}s with exit code {code}")
    report = build_report(argv, digest, payload, caps_report, elapsed if args.timing else None)
    print(json.dumps(report, indent=2, ensure_ascii=False))
    return code


if __name__ == "__main__":
    sys.exit(main())
