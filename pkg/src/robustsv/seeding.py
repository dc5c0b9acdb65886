"""Deterministic seed derivation so per-item randomness is independent of
iteration order and reproducible from the global seed alone."""

from __future__ import annotations

import hashlib


def derive_seed(root: int, *parts: str) -> int:
    """Stable 63-bit seed from a root seed and string qualifiers."""
    text = ":".join([str(int(root)), *parts])
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1
