"""
Input Guardrails for the Contraction Certificate Engine
Validates textual input (words, root literals) and size limits before
anything reaches the engine.
"""

import re
import logging
from typing import Optional, Tuple

from roots import RootError, parse_root
from settings import SearchCaps
from tree_simulator import MAX_DEGREE
from weyl import WordError, parse_word

logger = logging.getLogger(__name__)


class InputGuardrails:
    """
    Guardrails for command-line and file input.

    Features:
    - Word syntax and generator range checks
    - Root literal arity and sign checks
    - Size limits on ranks, words, trees and search caps
    """

    MAX_RANK = 12
    MAX_WORD_LENGTH = 256
    MIN_TREE_DEGREE = 3
    MAX_TREE_DEGREE = MAX_DEGREE
    MAX_TREE_DEPTH = 18
    MAX_SEARCH_CAP = 64
    MAX_POWER_CAP = 256

    def __init__(self):
        self.rejections = 0

    def _sanitize_input(self, text: str) -> str:
        """Drop control characters and collapse whitespace."""
        sanitized = re.sub(r'[\x00-\x08\x0B-\x1F\x7F]', '', text)
        return " ".join(sanitized.split())

    def _reject(self, message: str) -> Tuple[bool, None, str]:
        self.rejections += 1
        logger.warning(f"Input rejected: {message}")
        return False, None, message

    def validate_rank(self, rank: int) -> Tuple[bool, Optional[int], Optional[str]]:
        if rank > self.MAX_RANK:
            return self._reject(f"⚠️ Rank {rank} exceeds the supported maximum of {self.MAX_RANK}.")
        return True, rank, None

    def validate_word(self, text: str, rank: int) -> Tuple[bool, Optional[Tuple[int, ...]], Optional[str]]:
        """
        Validate a textual word of 1-based generator indices.

        Args:
            text: e.g. "1 2 1 3"
            rank: number of generators

        Returns:
            Tuple of (is_valid, 0-based word, error_message)
        """
        sanitized = self._sanitize_input(text or "")
        if not sanitized:
            return self._reject("⚠️ Please give a word, e.g. \"1 2 1\".")
        tokens = sanitized.split()
        if len(tokens) > self.MAX_WORD_LENGTH:
            return self._reject(
                f"⚠️ Word is too long. Please limit to {self.MAX_WORD_LENGTH} letters (current: {len(tokens)})."
            )
        try:
            word = parse_word(sanitized, rank)
        except WordError as e:
            return self._reject(f"⚠️ {e}")
        return True, word, None

    def validate_root_literal(self, text: str, rank: int) -> Tuple[bool, Optional[Tuple[int, ...]], Optional[str]]:
        """Validate a comma-separated root literal such as "1,1,0"."""
        sanitized = self._sanitize_input(text or "").replace(" ", "")
        if not sanitized:
            return self._reject("⚠️ Please give a root, e.g. \"1,1,0\".")
        try:
            root = parse_root(sanitized, rank)
        except RootError as e:
            return self._reject(f"⚠️ {e}")
        return True, root.vector, None

    def validate_tree_limits(self, degree: int, depth: int) -> Tuple[bool, Optional[Tuple[int, int]], Optional[str]]:
        if not self.MIN_TREE_DEGREE <= degree <= self.MAX_TREE_DEGREE:
            return self._reject(
                f"⚠️ Tree degree must be between {self.MIN_TREE_DEGREE} and {self.MAX_TREE_DEGREE} (got {degree})."
            )
        if not 1 <= depth <= self.MAX_TREE_DEPTH:
            return self._reject(f"⚠️ Tree depth must be between 1 and {self.MAX_TREE_DEPTH} (got {depth}).")
        return True, (degree, depth), None

    def validate_caps(self, caps: SearchCaps) -> Tuple[bool, Optional[SearchCaps], Optional[str]]:
        for name in ("orbit_cap", "bfs_radius"):
            value = getattr(caps, name)
            if value > self.MAX_SEARCH_CAP:
                return self._reject(f"⚠️ {name} {value} exceeds the limit of {self.MAX_SEARCH_CAP}.")
        if caps.power_cap > self.MAX_POWER_CAP:
            return self._reject(f"⚠️ power_cap {caps.power_cap} exceeds the limit of {self.MAX_POWER_CAP}.")
        return True, caps, None


def create_guardrails() -> InputGuardrails:
    """Factory function to create guardrails instance."""
    return InputGuardrails()
