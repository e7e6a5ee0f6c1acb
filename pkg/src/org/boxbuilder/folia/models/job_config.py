from pathlib import Path
from typing import Any, Dict, List, Literal

from pydantic import BaseModel, Field

from org.boxbuilder.folia.config import DEFAULT_COEFFICIENT_BOUND, GroebnerBudget


class JobConfig(BaseModel):
    """Everything a single CLI invocation depends on; equal configs give equal reports."""

    command: str
    inputs: List[Path] = Field(default_factory=list)
    seed: int = Field(default=0, ge=0)
    coefficient_bound: int = Field(default=DEFAULT_COEFFICIENT_BOUND, gt=0)
    budget: GroebnerBudget = Field(default_factory=GroebnerBudget)
    output_format: Literal["json", "csv"] = "json"
    verbosity: int = Field(default=0, ge=0)
    include_timings: bool = False
    # command-specific options (n, m, weights, delta, k, family, ...)
    params: Dict[str, Any] = Field(default_factory=dict)
