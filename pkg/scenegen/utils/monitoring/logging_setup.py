import logging
import sys
from typing import Union

LOG_FORMAT = "ts=%(asctime)s level=%(levelname)s logger=%(name)s msg=%(message)s"


def configure_logging(level: Union[str, int] = "INFO") -> logging.Logger:
    """Route the scenegen logger tree to stderr; repeated calls replace the handler."""
    root = logging.getLogger("scenegen")
    for handler in list(root.handlers):
        if getattr(handler, "_scenegen", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._scenegen = True
    root.addHandler(handler)
    root.setLevel(level)
    root.propagate = False
    return root
