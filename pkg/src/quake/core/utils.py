from __future__ import annotations

import contextlib
import hashlib
import os
import tempfile
from collections.abc import Iterable
from pathlib import Path


def atomic_write_bytes(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(dir=str(path.parent))
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        Path(temp_path).replace(path)
    finally:
        if os.path.exists(temp_path):
            with contextlib.suppress(OSError):
                os.unlink(temp_path)


def sha256_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def file_digests(paths: Iterable[Path]) -> dict[str, str]:
    """SHA-256 of every input file, keyed by the path as given."""
    digests: dict[str, str] = {}
    for path in paths:
        if path.is_dir():
            for child in sorted(p for p in path.rglob("*") if p.is_file()):
                digests[str(child)] = sha256_digest(child.read_bytes())
        else:
            digests[str(path)] = sha256_digest(path.read_bytes())
    return digests


def ensure_output_dir(output_dir: Path) -> None:
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except FileExistsError as exc:
        raise ValueError("Output directory is not a directory.") from exc
    if not os.access(output_dir, os.W_OK):
        raise ValueError("Output directory is not writable.")
