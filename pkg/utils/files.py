import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Generator

from utils.logger import get_logger

logger = get_logger()


@contextmanager
def temp_file_cleanup(suffix: str, directory: Path) -> Generator[str, None, None]:
    """Context manager for temporary file cleanup"""
    tmp_file = tempfile.NamedTemporaryFile(suffix=suffix, dir=directory, delete=False)
    tmp_path = tmp_file.name
    tmp_file.close()

    try:
        yield tmp_path
    finally:
        if os.path.exists(tmp_path):
            try:
                os.remove(tmp_path)
            except OSError as e:
                logger.warning(
                    "Failed to cleanup temp file",
                    extra={"path": tmp_path, "error": str(e)},
                )


def write_atomic(path: Path, text: str) -> None:
    """Write text to path so that readers never observe a partial file."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)

    with temp_file_cleanup(path.suffix or ".tmp", directory) as tmp_path:
        with open(tmp_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_path, path)

    logger.info("Artifact written", extra={"path": str(path), "bytes": len(text)})
