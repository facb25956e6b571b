"""
Run manifests: everything needed to repeat a computation.

Behavior:
- Input files are identified by their SHA-256 content hash, read in 8 KiB
  chunks; built-in presentations are hashed over their canonical JSON dump.
- The manifest records the tool version, input digests, all parameters,
  the wall-clock duration and the matrix sizes per degree.

Notes:
- Serialization sorts keys, so two runs with the same inputs differ only in
  the timing fields.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

from .config import SCHEMA_VERSION
from .errors import InputError

TOOL_NAME = "enhomology"
TOOL_VERSION = "0.1.0"


def calculate_file_hash(file_path: Path, chunk_size: int = 8192) -> str:
    """SHA-256 of a file's bytes."""
    sha256_hash = hashlib.sha256()
    try:
        with open(file_path, 'rb') as f:
            for chunk in iter(lambda: f.read(chunk_size), b""):
                sha256_hash.update(chunk)
    except OSError as e:
        raise InputError(f"could not read {file_path}: {e}") from None
    return sha256_hash.hexdigest()


def canonical_json(document: Any) -> str:
    return json.dumps(document, sort_keys=True, separators=(',', ':'))


def document_hash(document: Any) -> str:
    """SHA-256 of the canonical JSON form of a document."""
    return hashlib.sha256(canonical_json(document).encode('utf-8')).hexdigest()


@dataclass
class InputDigest:
    source: str
    sha256: str

    def to_dict(self) -> Dict[str, str]:
        return {'source': self.source, 'sha256': self.sha256}


@dataclass
class RunManifest:
    command: str
    parameters: Dict[str, Any]
    inputs: Dict[str, InputDigest] = field(default_factory=dict)
    matrix_sizes: Dict[str, Dict[int, Tuple[int, int]]] = field(default_factory=dict)
    started_at: str = ""
    wall_clock_seconds: float = 0.0
    tool_version: str = TOOL_VERSION

    def record_sizes(self, label: str, sizes: Mapping[int, Tuple[int, int]]) -> None:
        self.matrix_sizes[label] = dict(sizes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'tool': TOOL_NAME,
            'tool_version': self.tool_version,
            'command': self.command,
            'parameters': dict(self.parameters),
            'inputs': {name: digest.to_dict() for name, digest in self.inputs.items()},
            'matrix_sizes': {
                label: {str(d): list(shape) for d, shape in sorted(sizes.items())}
                for label, sizes in self.matrix_sizes.items()
            },
            'started_at': self.started_at,
            'wall_clock_seconds': round(self.wall_clock_seconds, 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


class ManifestClock:
    """Stamps started_at on entry and the duration on exit."""

    def __init__(self, manifest: RunManifest):
        self.manifest = manifest
        self._start: Optional[float] = None

    def __enter__(self) -> RunManifest:
        self.manifest.started_at = datetime.now(timezone.utc).isoformat(timespec='seconds')
        self._start = time.perf_counter()
        return self.manifest

    def __exit__(self, *exc) -> None:
        self.manifest.wall_clock_seconds = time.perf_counter() - self._start


def file_digest(path: Path) -> InputDigest:
    return InputDigest(str(path), calculate_file_hash(path))


def builtin_digest(selector: str, document: Any) -> InputDigest:
    return InputDigest(selector, document_hash(document))
