import csv
import hashlib
import json
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Any, Iterable, Iterator

import numpy as np
import pytz
import typer

from spline_dp.config.logger_config import logger
from spline_dp.utils.exceptions import SplineDPError

UTC = pytz.utc


def get_current_time() -> datetime:
    """Get the current time in UTC."""
    return datetime.now(UTC)


def format_number(value: float) -> str:
    """17 significant digits, so identical runs serialize to identical bytes."""
    return f"{float(value):.17g}"


def hash_payload(payload: Any) -> str:
    """Stable sha256 of a JSON-serializable payload (numpy arrays allowed)."""

    def default(obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        if isinstance(obj, Path):
            return str(obj)
        raise TypeError(f"cannot hash {type(obj).__name__}")

    encoded = json.dumps(payload, sort_keys=True, default=default).encode()
    return hashlib.sha256(encoded).hexdigest()


def ensure_directory(directory: str | Path) -> Path:
    directory = Path(directory)
    if not directory.exists():
        directory.mkdir(parents=True, exist_ok=True)
        logger.info(f"Directory created: {directory}")
    return directory


def save_csv(path: str | Path, header: list[str], rows: Iterable[Iterable[Any]]) -> Path:
    """Write rows, serializing floats with format_number."""
    path = Path(path)
    ensure_directory(path.parent)
    try:
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow(
                    format_number(v) if isinstance(v, (float, np.floating)) else v for v in row
                )
    except OSError as e:
        logger.error(f"Error saving file {path}: {e}", exc_info=True)
        raise e
    logger.info(f"File saved successfully: {path}")
    return path


def save_json(path: str | Path, payload: Any) -> Path:
    path = Path(path)
    ensure_directory(path.parent)
    try:
        path.write_text(json.dumps(payload, indent=2, default=str))
    except OSError as e:
        logger.error(f"Error saving file {path}: {e}", exc_info=True)
        raise e
    logger.info(f"File saved successfully: {path}")
    return path


def save_manifest(manifest, directory: str | Path) -> Path:
    """Write `manifest.json` (a RunManifest) into an output directory."""
    return save_json(Path(directory) / "manifest.json", manifest.model_dump(mode="json"))


@contextmanager
def exit_on_error() -> Iterator[None]:
    """Turn package errors into a message on stderr and the matching exit code."""
    try:
        yield
    except SplineDPError as e:
        logger.error(f"{type(e).__name__}: {e}")
        typer.echo(f"error: {e}", err=True)
        raise typer.Exit(code=e.exit_code) from e
