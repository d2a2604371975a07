"""Deterministic JSON output: fixed float precision, atomic file writes."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

FLOAT_SIGNIFICANT_DIGITS = 9


def round_floats(value):
    """Round every float to 9 significant digits, recursively.

    Keeps golden-file comparisons stable across platforms without hiding
    meaningful digits.
    """
    if isinstance(value, bool) or isinstance(value, int):
        return value
    if isinstance(value, float):
        return float(f"{value:.{FLOAT_SIGNIFICANT_DIGITS}g}")
    if isinstance(value, dict):
        return {k: round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v) for v in value]
    return value


def write_json_atomic(data, path) -> None:
    """Serialize to a temp file and rename into place.

    A failed command never leaves a partial output file behind.
    """
    path = Path(path)
    text = json.dumps(round_floats(data), indent=2) + "\n"
    fd, tmp_name = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        umask = os.umask(0)
        os.umask(umask)
        os.fchmod(fd, 0o666 & ~umask)
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
