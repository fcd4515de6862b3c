"""Small shared utilities: stable seeding and canonical JSON bytes."""

from __future__ import annotations

import hashlib
import json


def stable_seed(*parts) -> int:
    """Deterministic 63-bit seed derived from the given parts."""
    digest = hashlib.blake2b(
        "\x1f".join(str(p) for p in parts).encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big") >> 1


def canonical_dumps(obj) -> str:
    """Compact JSON with stable key order; used wherever bytes must match."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"), sort_keys=True)
