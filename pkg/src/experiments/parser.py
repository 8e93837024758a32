"""Line-oriented ``key=value`` experiment configuration."""
from __future__ import annotations

import re

from pydantic import ValidationError

from src.models.schemas import ExperimentConfig
from src.utils.errors import ConfigParseError

LIST_KEYS = {"p1_grid", "eta_grid", "segments", "rounds"}
KEYS = tuple(ExperimentConfig.model_fields)
# "#" opens a comment at line start or after whitespace; inside a value it is literal
_COMMENT = re.compile(r"(?:^|\s)#.*$")


def _strip_comment(raw: str) -> str:
    return _COMMENT.sub("", raw)


def _split_line(raw: str, lineno: int) -> tuple[str, str] | None:
    line = _strip_comment(raw).strip()
    if not line:
        return None
    if "=" not in line:
        raise ConfigParseError(lineno, f"expected key=value, got {line!r}")
    key, value = (part.strip() for part in line.split("=", 1))
    if key not in KEYS:
        raise ConfigParseError(lineno, f"unknown key {key!r}")
    if not value:
        raise ConfigParseError(lineno, f"missing value for {key!r}")
    return key, value


def parse_config(text: str) -> ExperimentConfig:
    """Parse configuration text; unset keys keep their defaults.

    Raises ConfigParseError naming the offending line for unknown keys,
    malformed values and out-of-range numbers.
    """
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parsed = _split_line(raw, lineno)
        if parsed is None:
            continue
        key, value = parsed
        if key in lines:
            raise ConfigParseError(lineno, f"duplicate key {key!r} (first set on line {lines[key]})")
        values[key] = [item.strip() for item in value.split(",")] if key in LIST_KEYS else value
        lines[key] = lineno

    try:
        return ExperimentConfig(**values)
    except ValidationError as exc:
        error = exc.errors()[0]
        loc = error.get("loc") or ()
        field = loc[0] if loc else None
        lineno = lines.get(field, max(lines.values(), default=0))
        where = ".".join(str(part) for part in loc) or "config"
        raise ConfigParseError(lineno, f"{where}: {error['msg']}") from exc


def _render_value(value: object) -> str:
    if isinstance(value, list):
        return ",".join(_render_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_config(cfg: ExperimentConfig) -> str:
    """Inverse of parse_config: one ``key=value`` line per set field."""
    lines = [
        f"{key}={_render_value(value)}"
        for key, value in cfg.model_dump().items()
        if value is not None
    ]
    return "\n".join(lines) + "\n"


def _key_of(raw: str) -> str | None:
    line = _strip_comment(raw)
    return line.split("=", 1)[0].strip() if "=" in line else None


def apply_overrides(text: str, overrides: list[str]) -> str:
    """Replace or append ``key=value`` lines; later overrides win."""
    lines = text.splitlines()
    for item in overrides:
        if "=" not in item:
            raise ConfigParseError(0, f"override {item!r} is not key=value")
        key = item.split("=", 1)[0].strip()
        lines = [line for line in lines if _key_of(line) != key]
        lines.append(item.strip())
    return "\n".join(lines) + "\n"
