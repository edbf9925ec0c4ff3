"""Optional sentry reporting, active only when SENTRY_DSN is set."""
import logging
import os
from typing import Optional

import sentry_sdk

logger = logging.getLogger(__name__)

_enabled = False


def init_error_reporting(dsn: Optional[str] = None, environment: str = "local") -> bool:
    global _enabled
    dsn = dsn or os.getenv("SENTRY_DSN")
    if not dsn:
        return False
    sentry_sdk.init(dsn=dsn, environment=environment, traces_sample_rate=0.0)
    _enabled = True
    logger.info("error reporting enabled")
    return True


def report_exception(exc: BaseException, **tags) -> None:
    if not _enabled:
        return
    for key, value in tags.items():
        sentry_sdk.set_tag(key, value)
    sentry_sdk.capture_exception(exc)
