from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = 1

CertificateStatus = Literal["pass", "fail", "budget_exhausted", "skipped"]


class KupkaReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    codim_sing: int
    codim_sing_plus_domega: int
    generically_kupka: bool
    # the codimension rise only speaks for top-dimensional components of Sing
    top_dimensional_only: bool = True


class Certificate(BaseModel):
    """A single hypothesis check: the measured value against what the statement requires."""

    model_config = ConfigDict(frozen=True)

    status: CertificateStatus
    value: Optional[int] = None
    required: Optional[str] = None
    detail: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"


class Report(BaseModel):
    schema_version: int = SCHEMA_VERSION
    command: str
    seed: Optional[int] = None
    rng: Optional[str] = None
    inputs_digest: str = ""
    certificates: Dict[str, Certificate] = Field(default_factory=dict)
    dims: Dict[str, int] = Field(default_factory=dict)
    verdicts: Dict[str, bool] = Field(default_factory=dict)
    assumptions: List[str] = Field(default_factory=list)
    data: Dict[str, Any] = Field(default_factory=dict)
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    timings_ms: Optional[Dict[str, float]] = None

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())
