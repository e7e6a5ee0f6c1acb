from typing import Literal, Optional

from pydantic import BaseModel

CensusStatus = Literal["ok", "degree_mismatch", "degree_not_admissible", "not_constructed"]


class CensusRow(BaseModel):
    family: str
    n: int
    n_min: int
    k: int
    degree: int
    constructed_degree: Optional[int] = None
    status: CensusStatus
    generic_element: str
    note: str = ""
