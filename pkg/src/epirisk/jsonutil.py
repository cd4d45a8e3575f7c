"""Canonical JSON serialization.

One serializer is shared by the library, the HTTP service and the CLI so that
"bit-for-bit" equivalence contracts hold across all three surfaces: sorted
keys, compact separators, UTF-8, NaN/Infinity rejected.
"""

from __future__ import annotations

import json
from typing import Any


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def canonical_bytes(obj: Any) -> bytes:
    return canonical_dumps(obj).encode("utf-8")
