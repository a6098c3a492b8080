"""Run manifests: provenance sidecars for every file the CLI writes.

A manifest records the subcommand, its full flag set, the digests of every
input file, the seed, and the tool version. Outputs are deterministic
functions of exactly these fields, so two runs whose manifests share a
fingerprint produce byte-identical files. The creation timestamp is
informational and excluded from the fingerprint.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Optional, Sequence


TOOL_VERSION = "0.1.0"


def file_digest(path) -> str:
    hasher = hashlib.sha256()
    with open(path, "rb") as fp:
        for chunk in iter(lambda: fp.read(65536), b""):
            hasher.update(chunk)
    return hasher.hexdigest()


def build_manifest(
    command: str,
    flags: Mapping[str, object],
    inputs: Sequence[str],
    seed: Optional[int] = None,
) -> dict:
    manifest = {
        "command": command,
        "flags": {key: flags[key] for key in sorted(flags)},
        "inputs": {str(path): file_digest(path) for path in sorted(str(p) for p in inputs)},
        "seed": seed,
        "tool_version": TOOL_VERSION,
    }
    fingerprint_source = json.dumps(manifest, sort_keys=True, separators=(",", ":"))
    manifest["fingerprint"] = hashlib.sha256(fingerprint_source.encode("utf-8")).hexdigest()
    manifest["created_at"] = datetime.now(timezone.utc).isoformat()
    return manifest


def write_manifest(output_path, manifest: Mapping[str, object]) -> Path:
    sidecar = Path(str(output_path) + ".manifest.json")
    sidecar.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return sidecar
