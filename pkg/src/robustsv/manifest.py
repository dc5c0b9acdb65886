"""Hash-chained stage manifests.

Every pipeline stage owns a directory under <work>/stages/<name> and writes
a manifest.json recording its seed, the config values it consumed, hashes
of any external inputs, hashes of its parents' manifest files, and hashes
of every output file. Nothing carries a timestamp, so identical runs are
byte-identical. A child is valid only while its recorded parent hashes
match the parent manifest files on disk; a mismatch means the parent was
re-run and the child is stale.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path


class ManifestError(Exception):
    """Missing or malformed manifest."""


class StaleManifestError(Exception):
    """An upstream stage changed after a downstream stage consumed it."""


def hash_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def hash_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class StageManifest:
    stage: str
    seed: int
    config: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    parents: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    def canonical_bytes(self) -> bytes:
        return json.dumps(asdict(self), sort_keys=True,
                          separators=(",", ":")).encode()


def stage_dir(work_dir, stage: str) -> Path:
    return Path(work_dir) / "stages" / stage


def manifest_path(work_dir, stage: str) -> Path:
    return stage_dir(work_dir, stage) / "manifest.json"


def write_manifest(work_dir, manifest: StageManifest) -> str:
    """Write the stage manifest; returns the manifest file hash."""
    path = manifest_path(work_dir, manifest.stage)
    path.parent.mkdir(parents=True, exist_ok=True)
    blob = manifest.canonical_bytes()
    path.write_bytes(blob)
    return hash_bytes(blob)


def load_manifest(work_dir, stage: str) -> StageManifest:
    path = manifest_path(work_dir, stage)
    if not path.exists():
        raise ManifestError(f"stage {stage!r} has no manifest at {path}")
    try:
        data = json.loads(path.read_bytes())
        return StageManifest(**data)
    except (json.JSONDecodeError, TypeError) as exc:
        raise ManifestError(f"malformed manifest for stage {stage!r}") from exc


def manifest_file_hash(work_dir, stage: str) -> str:
    path = manifest_path(work_dir, stage)
    if not path.exists():
        raise ManifestError(f"stage {stage!r} has no manifest at {path}")
    return hash_bytes(path.read_bytes())


def hash_stage_outputs(work_dir, stage: str, relpaths: list[str]) -> dict:
    base = stage_dir(work_dir, stage)
    return {rel: hash_file(base / rel) for rel in sorted(relpaths)}


def collect_output_files(work_dir, stage: str) -> list[str]:
    """All files under the stage dir except the manifest itself."""
    base = stage_dir(work_dir, stage)
    out = []
    for path in sorted(base.rglob("*")):
        if path.is_file() and path.name != "manifest.json":
            out.append(str(path.relative_to(base)))
    return out


def stage_is_fresh(work_dir, expected: StageManifest) -> bool:
    """True when the stage already ran with identical seed/config/inputs/
    parents and all of its recorded outputs are intact on disk."""
    try:
        existing = load_manifest(work_dir, expected.stage)
    except ManifestError:
        return False
    if (existing.seed, existing.config, existing.inputs, existing.parents) != \
            (expected.seed, expected.config, expected.inputs, expected.parents):
        return False
    base = stage_dir(work_dir, expected.stage)
    for rel, digest in existing.outputs.items():
        path = base / rel
        if not path.exists() or hash_file(path) != digest:
            return False
    return True


def verify_chain(work_dir, stage: str, _seen: set | None = None) -> list[str]:
    """Walk the manifest chain from a stage back to its roots.

    Checks that every output file still matches its recorded hash and that
    every recorded parent-manifest hash matches the parent manifest now on
    disk. Returns the verified artifact paths; raises StaleManifestError
    on any mismatch and ManifestError on missing links.
    """
    seen = _seen if _seen is not None else set()
    if stage in seen:
        return []
    seen.add(stage)
    manifest = load_manifest(work_dir, stage)
    base = stage_dir(work_dir, stage)
    visited = [str(manifest_path(work_dir, stage))]
    for rel, digest in manifest.outputs.items():
        path = base / rel
        if not path.exists():
            raise StaleManifestError(f"{stage}: output {rel} is missing")
        if hash_file(path) != digest:
            raise StaleManifestError(f"{stage}: output {rel} was modified")
        visited.append(str(path))
    for parent, digest in manifest.parents.items():
        if manifest_file_hash(work_dir, parent) != digest:
            raise StaleManifestError(
                f"{stage} was built against a different run of {parent}; "
                "re-run the downstream stages")
        visited.extend(verify_chain(work_dir, parent, seen))
    return visited
