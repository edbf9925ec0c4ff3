from .error_reporting import init_error_reporting, report_exception
from .logging_setup import LOG_FORMAT, configure_logging
from .metrics_collector import METRICS_FILENAME, MetricsCollector

__all__ = [
    "LOG_FORMAT",
    "METRICS_FILENAME",
    "MetricsCollector",
    "configure_logging",
    "init_error_reporting",
    "report_exception",
]
