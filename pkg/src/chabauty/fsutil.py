"""Filesystem utilities — atomic replace-on-write for config and plot data."""

from __future__ import annotations

import logging
import os
import shutil
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterator

log = logging.getLogger(__name__)


@contextmanager
def atomic_write(path: str | Path, mode: str = "wb", backup: bool = False) -> Iterator[IO]:
    """Open a temp file next to ``path`` and move it into place on success.

    With ``backup`` an existing file is first copied to ``<name>.bak``.
    On any exception the temp file is removed and ``path`` is untouched.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    if backup and path.exists():
        try:
            shutil.copy2(path, path.parent / (path.name + ".bak"))
        except OSError:
            log.warning("Could not create backup of %s", path)

    tmp_path = path.parent / (path.name + ".tmp")
    newline = "" if "b" not in mode else None
    try:
        with open(tmp_path, mode, newline=newline) as fp:
            yield fp
        os.replace(tmp_path, path)
    except BaseException:
        try:
            tmp_path.unlink(missing_ok=True)
        except OSError:
            pass
        raise
    log.debug("Wrote %s", path)
