import logging
from dataclasses import replace
from typing import Dict, List, Optional

from scenegen.attention.types import BlockKind, RangeStats
from scenegen.errors import ConfigurationError

from .codecs import FloatFormat
from .sage import QuantScheme

logger = logging.getLogger(__name__)


def v_ranges(stats: List[RangeStats]) -> Dict[BlockKind, float]:
    """Largest V range observed per block kind."""
    ranges: Dict[BlockKind, float] = {}
    for record in stats:
        ranges[record.kind] = max(ranges.get(record.kind, 0.0), record.v.range)
    return ranges


def recommend_scheme(
    stats: List[RangeStats],
    base: Optional[QuantScheme] = None,
    low_resolution_v: FloatFormat = FloatFormat.FP8_E5M2,
    downgrade_ratio: float = 0.5,
) -> Dict[BlockKind, QuantScheme]:
    """Assign a lower-resolution V format to the narrowest-range block kind.

    Rule: every kind gets `base`. The kind(s) with the smallest V range get
    `low_resolution_v` instead, provided that range is at most
    `downgrade_ratio` times the largest V range. With a single kind, or no
    kind separated by that margin, nothing is downgraded.
    """
    if not stats:
        raise ConfigurationError("range statistics are empty", key="stats")
    base = base or QuantScheme()
    ranges = v_ranges(stats)
    schemes = {kind: base for kind in ranges}

    smallest = min(ranges.values())
    largest = max(ranges.values())
    if len(ranges) > 1 and largest > 0 and smallest <= downgrade_ratio * largest:
        for kind, value in ranges.items():
            if value == smallest:
                schemes[kind] = replace(base, v_format=low_resolution_v)
                logger.info("V range of %s is %.3g vs max %.3g: using %s for V",
                            kind.value, value, largest, low_resolution_v.value)
    return schemes
