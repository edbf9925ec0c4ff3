"""Run reports: one versioned JSON document per CLI run."""
import json
from typing import Any, Dict

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from scenegen.errors import StorageError
from scenegen.storage.files import PathLike, atomic_write_text, read_bytes

SCHEMA_VERSION = 1
# keys whose values depend on wall-clock time
TIMING_KEYS = frozenset({"seconds", "timings", "total_time", "share", "wall_time"})


class RunReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: int = SCHEMA_VERSION
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    timings: Dict[str, float] = Field(default_factory=dict)
    cache: Dict[str, Dict[str, int]] = Field(default_factory=dict)
    block_timings: Dict[str, Dict[str, Any]] = Field(default_factory=dict)
    quantization: Dict[str, Dict[str, float]] = Field(default_factory=dict)
    metrics: Dict[str, Any] = Field(default_factory=dict)
    sections: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("timings")
    @classmethod
    def _non_negative(cls, value):
        negative = [k for k, v in value.items() if v < 0]
        if negative:
            raise ValueError(f"negative timings: {negative}")
        return value

    def record_timing(self, stage: str, seconds: float) -> None:
        self.timings[stage] = max(float(seconds), 0.0)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"

    def without_timings(self) -> Dict[str, Any]:
        """Report content with every wall-clock dependent field removed."""
        return _strip(self.model_dump(mode="json"))


def _strip(node):
    if isinstance(node, dict):
        return {k: _strip(v) for k, v in node.items() if k not in TIMING_KEYS}
    if isinstance(node, list):
        return [_strip(v) for v in node]
    return node


def emit_report(report: RunReport, path: PathLike) -> None:
    atomic_write_text(path, report.to_json())


def parse_report(path: PathLike) -> RunReport:
    raw = read_bytes(path)
    try:
        return RunReport.model_validate_json(raw)
    except ValidationError as exc:
        raise StorageError(f"invalid run report: {exc.error_count()} validation errors", path=path) from exc
