"""
Canonical serialization of command reports.

JSON output is ``json.dumps`` with sorted keys and compact separators, so the
same report always produces the same bytes. Tables (census rows, good degrees)
are emitted as CSV through pandas.
"""

import hashlib
import io
import json
import logging
import time
from typing import Any, Dict, Literal, Optional

import pandas as pd

from org.boxbuilder.folia.errors import InputFormatError
from org.boxbuilder.folia.models.report import Report

_LOG = logging.getLogger(__name__)

OutputFormat = Literal["json", "csv"]


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def inputs_digest(inputs: Dict[str, Any]) -> str:
    """
    sha256 of the canonical JSON of ``inputs``; stable under key reordering.

    Example:
    >>> inputs_digest({"a": 1, "b": 2}) == inputs_digest({"b": 2, "a": 1})
    True
    """
    return hashlib.sha256(canonical_json(inputs).encode("utf-8")).hexdigest()


def emit(report: Report, output_format: OutputFormat = "json", include_timings: bool = False) -> bytes:
    """
    Serializes a report. JSON covers the full report; CSV covers ``report.rows``
    (one line per row, header included).

    Timings are dropped unless ``include_timings`` is set, keeping the default
    bytes identical across reruns.
    """
    if output_format == "csv":
        frame = pd.DataFrame(report.rows)
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, lineterminator="\n")
        return buffer.getvalue().encode("utf-8")
    if output_format != "json":
        raise ValueError(f"Unknown output format {output_format!r}.")
    payload = report.model_dump(mode="json", exclude_none=True)
    if not include_timings:
        payload.pop("timings_ms", None)
    return (canonical_json(payload) + "\n").encode("utf-8")


def parse(data: bytes) -> Report:
    """Inverse of ``emit`` for JSON output."""
    try:
        return Report.model_validate_json(data)
    except ValueError as e:
        raise InputFormatError(f"Not a report: {e}")


def parse_table(data: bytes) -> pd.DataFrame:
    return pd.read_csv(io.BytesIO(data))


class Timer:
    """
    Context manager recording wall-clock milliseconds under ``name`` in a
    shared timings dictionary.
    """

    def __init__(self, timings: Dict[str, float], name: str):
        self.timings = timings
        self.name = name
        self._started: Optional[float] = None

    def __enter__(self) -> "Timer":
        self._started = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = round((time.perf_counter() - self._started) * 1000, 3)
        self.timings[self.name] = self.timings.get(self.name, 0.0) + elapsed
        _LOG.debug(f"{self.name} took {elapsed} ms")
        return False
