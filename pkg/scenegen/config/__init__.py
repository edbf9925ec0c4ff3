from .settings import (
    CONFIG_SCHEMA_VERSION,
    CacheSection,
    PipelineConfig,
    QuantSchemeConfig,
    QuantSection,
    build_config,
    load_config,
)

__all__ = [
    "CONFIG_SCHEMA_VERSION",
    "CacheSection",
    "PipelineConfig",
    "QuantSchemeConfig",
    "QuantSection",
    "build_config",
    "load_config",
]
