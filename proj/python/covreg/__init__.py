"""Python interface to the coverable register toolkit."""

import os
import sys

try:
    from ._covreg import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:  # in-tree build: the test harness points at the module dir
    _dir = os.environ.get("COVREG_MODULE_DIR")
    if not _dir:
        raise
    if _dir not in sys.path:
        sys.path.insert(0, _dir)
    from _covreg import *  # noqa: F401,F403
