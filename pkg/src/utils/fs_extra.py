from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path

from ..error_handling import InputEncodingError


def atomic_write_text(target: str | Path, content: str) -> Path:
    """Write via a sibling temp file and rename, so readers never see a truncated file."""
    target = Path(target)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(content)
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return target


def read_text(path: str | Path, fold_crlf: bool = False) -> str:
    """Read UTF-8 text verbatim. Notes keep their \\r characters since offsets count them."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            text = f.read()
    except UnicodeDecodeError as e:
        raise InputEncodingError(path, f"{e.reason} (byte {e.object[e.start]:#04x})") from e
    return text.replace("\r\n", "\n") if fold_crlf else text


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
