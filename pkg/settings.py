"""
Settings for the Contraction Certificate Engine
Search caps and tree-model defaults, read from the environment (.env supported).
"""

import os
import logging
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, model_validator

logger = logging.getLogger(__name__)

# Load environment variables once for every entry point
load_dotenv()

TOOL_VERSION = "0.3.0"


class SearchCaps(BaseModel):
    """
    Budgets for every bounded search in the Coxeter pipeline.

    Exhausting any of these is reported explicitly, never answered silently.
    """

    model_config = ConfigDict(frozen=True)

    orbit_cap: int = Field(default=12, ge=0, description="word length for real-root enumeration")
    bfs_radius: int = Field(default=12, ge=1, description="Cayley-ball radius for quadrant witnesses")
    power_cap: int = Field(default=32, ge=4, description="largest power n in end-sign sequences")
    periods: int = Field(default=4, ge=1, description="periods of w scanned for crossed walls")

    def doubled(self) -> "SearchCaps":
        """Caps used by the independent re-verification pass."""
        return self.model_copy(update={
            "orbit_cap": self.orbit_cap * 2,
            "bfs_radius": self.bfs_radius * 2,
            "power_cap": self.power_cap * 2,
        })

    def as_report(self) -> dict:
        return {
            "orbit_cap": self.orbit_cap,
            "bfs_radius": self.bfs_radius,
            "power_cap": self.power_cap,
            "periods": self.periods,
        }


class TreeSettings(BaseModel):
    """Defaults for the regular-tree simulator."""

    model_config = ConfigDict(frozen=True)

    degree: int = Field(default=3, ge=3)
    depth: int = Field(default=12, ge=1)
    seed: int = 0
    type_preserving: bool = False

    @model_validator(mode="after")
    def _check_digits(self) -> "TreeSettings":
        # vertices are written as digit strings
        if self.degree > 10:
            raise ValueError(f"degree {self.degree} exceeds the supported maximum of 10")
        return self


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"⚠️  Ignoring non-integer {name}={raw!r}, using {default}")
        return default


def get_default_caps(**overrides) -> SearchCaps:
    """
    Build search caps from the environment, then apply explicit overrides.

    Args:
        **overrides: field values that win over the environment (None is ignored)

    Returns:
        SearchCaps instance
    """
    values = {
        "orbit_cap": _env_int("CONTRACTION_ORBIT_CAP", 12),
        "bfs_radius": _env_int("CONTRACTION_BFS_RADIUS", 12),
        "power_cap": _env_int("CONTRACTION_POWER_CAP", 32),
        "periods": _env_int("CONTRACTION_PERIODS", 4),
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    return SearchCaps(**values)


def get_tree_settings(**overrides) -> TreeSettings:
    """Build tree-model settings from the environment, then apply overrides."""
    values = {
        "degree": _env_int("CONTRACTION_TREE_DEGREE", 3),
        "depth": _env_int("CONTRACTION_TREE_DEPTH", 12),
        "seed": _env_int("CONTRACTION_SEED", 0),
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    return TreeSettings(**values)
