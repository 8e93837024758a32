"""Utility helper functions."""
import hashlib
import json
import math
from datetime import datetime, timezone
from typing import Any

from src.utils.errors import DomainError


def compute_sha256(data: Any) -> str:
    """Compute SHA-256 hash of JSON-able data or text."""
    if isinstance(data, dict) or isinstance(data, list):
        json_str = json.dumps(data, sort_keys=True, ensure_ascii=False)
    else:
        json_str = str(data)

    return hashlib.sha256(json_str.encode('utf-8')).hexdigest()


def create_log_entry(node_name: str, status: str, duration_ms: int, **kwargs) -> dict:
    """Create a standardized log entry."""
    return {
        "timestamp": utc_timestamp(),
        "node": node_name,
        "status": status,
        "duration_ms": duration_ms,
        **kwargs
    }


def utc_timestamp() -> str:
    """ISO-8601 UTC timestamp with a Z suffix."""
    return datetime.now(timezone.utc).replace(tzinfo=None).isoformat() + "Z"


def format_number(value: Any, digits: int) -> str:
    """Render a CSV cell; floats get `digits` significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"Non-finite value {value!r} cannot be written")
        return f"{value:.{digits}g}"
    return str(value)


def frange(start: float, stop: float, step: float) -> list[float]:
    """Inclusive float grid, rounded to suppress accumulation drift."""
    if step <= 0:
        raise ValueError("step must be positive")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def require_probability(name: str, value: float) -> float:
    """Return ``value`` as float, raising DomainError unless 0 ≤ value ≤ 1."""
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
    return value
