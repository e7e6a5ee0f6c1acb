"""
Module for retrieving environment-specific configuration.

This module reads the ``FOLIA_*`` environment variables that tune the exact
engines (Groebner budgets, random coefficient bounds) and exposes them as
validated pydantic models.

Raises:
    ValueError: If an environment variable is set to a non-integer or non-positive value.

Functions:
    get_environment() -> Environments:
        Retrieves the runtime environment from the environment variable.

    budget_from_env(**overrides) -> GroebnerBudget:
        Builds a Groebner budget from flags, environment and defaults (in that order).

    coefficient_bound_from_env(override) -> int:
        Resolves the random coefficient bound the same way.
"""

import logging
import os
from enum import Enum
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

_LOG = logging.getLogger(__name__)

BUDGET_MS_ENV_KEY = "FOLIA_BUDGET_MS"
PAIR_BUDGET_ENV_KEY = "FOLIA_GB_PAIR_BUDGET"
DEGREE_CAP_ENV_KEY = "FOLIA_GB_DEGREE_CAP"
COEF_BOUND_ENV_KEY = "FOLIA_COEF_BOUND"
RUNTIME_ENVIRONMENT_ENV_KEY = "FOLIA_RUNTIME_ENVIRONMENT"

DEFAULT_MAX_PAIRS = 50_000
DEFAULT_MAX_DEGREE = 60
DEFAULT_COEFFICIENT_BOUND = 5
MAX_CERTIFICATION_RETRIES = 16


class Environments(Enum):
    TEST = "TEST"
    PRODUCTION = "PRODUCTION"


class GroebnerBudget(BaseModel):
    """Resource caps for one Buchberger run."""

    model_config = ConfigDict(frozen=True)

    max_pairs: int = Field(default=DEFAULT_MAX_PAIRS, gt=0)
    max_degree: int = Field(default=DEFAULT_MAX_DEGREE, gt=0)
    wall_clock_ms: Optional[int] = Field(default=None, gt=0)


def load_environment():
    """Loads a local ``.env`` file, never overriding variables already set."""
    loaded = load_dotenv(override=False)
    _LOG.debug(f"dotenv file loaded: {loaded}")


def get_environment() -> Environments:
    """
    Retrieves the runtime environment from an environment variable.

    Returns:
        Environments: The runtime environment; PRODUCTION when the variable is unset.

    Raises:
        KeyError: If the variable does not match an existing enum member.
    """
    er = os.getenv(RUNTIME_ENVIRONMENT_ENV_KEY)
    if er is None:
        return Environments.PRODUCTION
    return Environments[er]


def _int_from_env(key: str) -> Optional[int]:
    raw = os.getenv(key)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"Expecting {key} to be an integer, got {raw!r}.")
    if value <= 0:
        raise ValueError(f"Expecting {key} to be positive, got {value}.")
    return value


def _first(*values):
    for v in values:
        if v is not None:
            return v
    return None


def budget_from_env(
    max_pairs: Optional[int] = None,
    max_degree: Optional[int] = None,
    wall_clock_ms: Optional[int] = None,
) -> GroebnerBudget:
    """
    Resolves a ``GroebnerBudget``. Explicit arguments win over ``FOLIA_*``
    variables, which win over the model defaults.
    """
    fields = {
        "max_pairs": _first(max_pairs, _int_from_env(PAIR_BUDGET_ENV_KEY)),
        "max_degree": _first(max_degree, _int_from_env(DEGREE_CAP_ENV_KEY)),
        "wall_clock_ms": _first(wall_clock_ms, _int_from_env(BUDGET_MS_ENV_KEY)),
    }
    budget = GroebnerBudget(**{k: v for k, v in fields.items() if v is not None})
    _LOG.debug(f"Resolved Groebner budget {budget}")
    return budget


def coefficient_bound_from_env(override: Optional[int] = None) -> int:
    return _first(override, _int_from_env(COEF_BOUND_ENV_KEY), DEFAULT_COEFFICIENT_BOUND)
