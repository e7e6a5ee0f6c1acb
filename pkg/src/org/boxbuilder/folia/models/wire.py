from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class TermModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    coef: str
    exps: List[int]

    @field_validator("coef")
    @classmethod
    def coef_is_rational(cls, value: str) -> str:
        numerator, sep, denominator = value.partition("/")
        if not numerator.lstrip("-").isdigit() or (sep and not denominator.isdigit()):
            raise ValueError(f"Coefficient {value!r} is not a rational string 'p/q'.")
        return value


class PolyModel(BaseModel):
    weights: List[int]
    terms: List[TermModel] = Field(default_factory=list)


class FormModel(BaseModel):
    """Index tuples are comma-joined strings, "" for 0-forms."""

    p: int = Field(ge=0)
    weights: List[int]
    components: Dict[str, PolyModel] = Field(default_factory=dict)
    delta: Optional[int] = None
    metadata: Dict[str, int] = Field(default_factory=dict)


class MapModel(BaseModel):
    k: int = Field(ge=1)
    target_weights: List[int]
    polys: List[PolyModel]
