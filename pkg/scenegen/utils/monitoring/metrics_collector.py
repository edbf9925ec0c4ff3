"""Prometheus metrics for one run, written as a textfile next to the run report."""
import logging
from pathlib import Path
from typing import Dict, Mapping, Optional

from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, write_to_textfile

from scenegen.errors import StorageError
from scenegen.storage.files import PathLike

logger = logging.getLogger(__name__)

METRICS_FILENAME = "metrics.prom"


class MetricsCollector:
    """Holds a private registry so concurrent runs in one process never share series."""

    def __init__(self, registry: Optional[CollectorRegistry] = None):
        self.registry = registry or CollectorRegistry()
        self.cache_steps = Counter(
            "scenegen_cache_steps",
            "Denoising evaluations per branch and decision",
            ["branch", "decision"],
            registry=self.registry,
        )
        self.stage_seconds = Histogram(
            "scenegen_stage_seconds",
            "Wall time of a pipeline stage",
            ["stage"],
            buckets=(0.1, 0.5, 1.0, 5.0, 15.0, 60.0, 300.0, float("inf")),
            registry=self.registry,
        )
        self.attention_seconds = Gauge(
            "scenegen_attention_seconds",
            "Accumulated block time per attention kind",
            ["kind"],
            registry=self.registry,
        )
        self.image_quality = Gauge(
            "scenegen_image_quality",
            "Mean held-out frame quality",
            ["metric"],
            registry=self.registry,
        )

    def record_cache(self, counters: Mapping[str, Mapping[str, int]]) -> None:
        for branch, counts in counters.items():
            self.cache_steps.labels(branch=branch, decision="compute").inc(counts.get("computed_steps", 0))
            self.cache_steps.labels(branch=branch, decision="reuse").inc(counts.get("reused_steps", 0))

    def observe_stage(self, stage: str, seconds: float) -> None:
        self.stage_seconds.labels(stage=stage).observe(max(seconds, 0.0))

    def record_block_timings(self, timings: Mapping[str, Mapping[str, float]]) -> None:
        for kind, entry in timings.items():
            self.attention_seconds.labels(kind=kind).set(entry.get("seconds", 0.0))

    def record_quality(self, values: Dict[str, float]) -> None:
        for metric, value in values.items():
            self.image_quality.labels(metric=metric).set(value)

    def write(self, directory: PathLike) -> Path:
        path = Path(directory) / METRICS_FILENAME
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            write_to_textfile(str(path), self.registry)
        except OSError as exc:
            raise StorageError(f"cannot write metrics: {exc}", path=path) from exc
        logger.debug("metrics written to %s", path)
        return path
