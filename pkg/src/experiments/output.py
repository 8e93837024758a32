"""CSV emission for result tables."""
from __future__ import annotations

import csv
import io
import logging
from pathlib import Path

from src.models.schemas import ResultTable
from src.utils.config import config
from src.utils.helpers import format_number

logger = logging.getLogger(__name__)


def render_csv(table: ResultTable, digits: int | None = None) -> str:
    """Metadata as leading '# key: value' lines, then header and rows."""
    digits = config.CSV_SIGNIFICANT_DIGITS if digits is None else digits
    buffer = io.StringIO()
    for key, value in table.metadata.items():
        buffer.write(f"# {key}: {value}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_number(cell, digits) for cell in row])
    return buffer.getvalue()


def emit_csv(table: ResultTable, path: str | Path) -> Path:
    """Write the table as UTF-8 CSV; raises OSError when the path is unwritable."""
    path = Path(path)
    if not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(render_csv(table))
    logger.info("wrote %d rows to %s", len(table.rows), path)
    return path
