"""Line-oriented key=value configuration format.

One format serves three places: set descriptor records, problem instance
descriptor files, and campaign files. The grammar is deliberately small:

* blank lines and full-line ``#`` comments are ignored,
* ``key=value`` lines assign into the current section,
* ``[name]`` lines open a named section; lines before the first section
  belong to the anonymous global section.

Keys are case-sensitive. Duplicate keys within a section and duplicate
section names are errors: campaign results must not depend on silent
last-one-wins behavior.
"""

from __future__ import annotations

from .errors import ConfigError

__all__ = ["parse_sections", "parse_reals", "format_reals", "parse_bool"]


def parse_sections(text: str) -> tuple[dict[str, str], dict[str, dict[str, str]]]:
    """Parse ``text`` into (global key/values, ordered named sections)."""
    top: dict[str, str] = {}
    sections: dict[str, dict[str, str]] = {}
    current = top
    where = "top level"
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise ConfigError(f"line {lineno}: empty section name")
            if name in sections:
                raise ConfigError(f"line {lineno}: duplicate section [{name}]")
            sections[name] = {}
            current = sections[name]
            where = f"[{name}]"
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in current:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} in {where}")
        current[key] = value
    return top, sections


def parse_reals(value: str, *, what: str = "value") -> list[float]:
    """Parse a comma-separated list of decimal reals."""
    items = [piece.strip() for piece in value.split(",")]
    if items == [""]:
        raise ConfigError(f"empty real list for {what}")
    out = []
    for piece in items:
        try:
            out.append(float(piece))
        except ValueError:
            raise ConfigError(f"bad real {piece!r} in {what}") from None
    return out


def format_reals(values) -> str:
    """Format reals losslessly (round-trips through float)."""
    return ",".join(f"{float(v):.17g}" for v in values)


def parse_bool(value: str, *, what: str = "value") -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"bad boolean {value!r} for {what}")
