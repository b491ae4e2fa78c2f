"""
File utility functions for flowstruct
"""

import hashlib
import os
import tempfile
from pathlib import Path
from typing import Iterable, List, Sequence, Union

from core.errors import OutputError
from utils.logging_config import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]


def ensure_directory(directory: PathLike) -> Path:
    """Create the directory if needed and return it"""
    path = Path(directory)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"Cannot create output directory {path}: {e}")
    if not os.access(path, os.W_OK):
        raise OutputError(f"Output directory {path} is not writable")
    return path


def atomic_write_bytes(path: PathLike, payload: bytes) -> Path:
    """Write payload next to path, then rename over it so readers never see a partial file"""
    target = Path(path)
    ensure_directory(target.parent if str(target.parent) else ".")
    tmp_name = None
    try:
        with tempfile.NamedTemporaryFile(
            "wb", dir=target.parent, prefix=f".{target.name}.", suffix=".tmp", delete=False
        ) as f:
            tmp_name = f.name
            f.write(payload)
        os.replace(tmp_name, target)
    except OSError as e:
        if tmp_name and os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise OutputError(f"Cannot write {target}: {e}")
    logger.info(f"Wrote {len(payload)} bytes to {target}")
    return target


def atomic_write_text(path: PathLike, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def digest_rows(rows: Iterable[Sequence[str]]) -> str:
    """
    SHA-256 over rows joined with tabs, sorted first so the digest identifies
    the multiset of rows independent of their order
    """
    lines: List[str] = sorted("\t".join(row) for row in rows)
    sha = hashlib.sha256()
    for line in lines:
        sha.update(line.encode("utf-8"))
        sha.update(b"\n")
    return sha.hexdigest()
