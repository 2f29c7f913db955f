"""Select the numerical core at import time.

``ROUGHMERTON_BACKEND`` may be ``auto`` (default: compiled if importable),
``compiled`` (fail if the extension is missing) or ``python``.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pycore


def _load_compiled() -> ModuleType | None:
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        return None
    return _core


def load(choice: str | None = None) -> ModuleType:
    choice = (choice or os.environ.get("ROUGHMERTON_BACKEND", "auto")).strip().lower()
    if choice == "python":
        return _pycore
    compiled = _load_compiled()
    if choice == "compiled":
        if compiled is None:
            raise ImportError("compiled core requested but roughmerton._core is not built")
        return compiled
    if choice != "auto":
        raise ValueError(f"unknown backend {choice!r}")
    return compiled if compiled is not None else _pycore


core = load()
BACKEND = core.NAME
compiled_available = _load_compiled() is not None
