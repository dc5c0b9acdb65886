"""Versioned on-disk container for trained model arrays.

A container is a plain (uncompressed) .npz holding the payload arrays plus
two bookkeeping entries: __meta__, a JSON blob with the container kind,
format version, and any scalar metadata; and the arrays themselves stored
bit-exactly, so save/load round-trips are byte-stable.
"""

from __future__ import annotations

import io
import json
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


class ContainerError(Exception):
    """Raised for unreadable, mismatched, or wrong-kind containers."""


def save_container(path, kind: str, arrays: dict[str, np.ndarray],
                   meta: dict | None = None) -> None:
    """Write arrays and metadata as one container file."""
    payload = dict(arrays)
    if "__meta__" in payload:
        raise ValueError("'__meta__' is reserved")
    header = {"kind": kind, "format_version": FORMAT_VERSION,
              "meta": meta or {}}
    blob = json.dumps(header, sort_keys=True).encode()
    payload["__meta__"] = np.frombuffer(blob, dtype=np.uint8)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.BytesIO()
    np.savez(buf, **payload)
    path.write_bytes(buf.getvalue())


def load_container(path, kind: str) -> tuple[dict[str, np.ndarray], dict]:
    """Read a container, checking its kind; returns (arrays, meta)."""
    path = Path(path)
    if not path.exists():
        raise ContainerError(f"no such container: {path}")
    try:
        with np.load(path) as data:
            payload = {k: data[k] for k in data.files}
    except Exception as exc:
        raise ContainerError(f"unreadable container {path}: {exc}") from exc
    if "__meta__" not in payload:
        raise ContainerError(f"{path} has no container header")
    header = json.loads(payload.pop("__meta__").tobytes().decode())
    if header.get("kind") != kind:
        raise ContainerError(
            f"{path} holds a {header.get('kind')!r} model, expected {kind!r}")
    if header.get("format_version") != FORMAT_VERSION:
        raise ContainerError(
            f"{path} has format version {header.get('format_version')}, "
            f"this build reads {FORMAT_VERSION}")
    return payload, header.get("meta", {})
