"""Deterministic CSV tables and JSON run manifests for experiment outputs.

Every experiment run emits a pair of files: a CSV data table (UTF-8,
header row, ``.`` decimal separator, LF newlines) and a JSON manifest
that embeds the full resolved configuration, the seed, the schema
version, the package version, and a checksum for each written table.
Writers are deterministic down to the byte -- floats are rendered with
shortest round-trip ``repr``, JSON keys are sorted, and nothing
time- or host-dependent is recorded -- so re-running from a manifest
reproduces the artifacts bit-identically and downstream consumers can
diff against frozen references.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Mapping, Sequence

from . import __version__
from .errors import ConfigError

#: Version of the CSV column schemas and manifest layout, bumped on any
#: breaking change so downstream readers can refuse files they do not
#: understand.
SCHEMA_VERSION = 1

_MANIFEST_KEYS = frozenset(
    {"schema_version", "package_version", "command", "config", "outputs"})


def format_cell(value: Any) -> str:
    """Render one CSV cell deterministically.

    Floats use shortest round-trip ``repr`` (so parsing the cell back
    yields the identical IEEE double), booleans render as ``true`` /
    ``false``, and text must not contain separators or line breaks --
    the schemas never need quoting, so the writer refuses it.
    """
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    text = str(value)
    if any(ch in text for ch in (",", "\n", "\r", '"')):
        raise ConfigError(f"CSV cell {text!r} would require quoting")
    return text


def write_csv(path: str | Path, header: Sequence[str],
              rows: Sequence[Sequence[Any]]) -> Path:
    """Write a header plus rows as UTF-8 CSV with LF newlines.

    Every row must match the header width; cells are rendered with
    :func:`format_cell`.  Returns the written path.
    """
    path = Path(path)
    width = len(header)
    lines = [",".join(format_cell(cell) for cell in header)]
    for index, row in enumerate(rows):
        if len(row) != width:
            raise ConfigError(
                f"row {index} has {len(row)} cells, header has {width}")
        lines.append(",".join(format_cell(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    """Read a table written by :func:`write_csv`; cells stay strings."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.split("\n") if line]
    if not lines:
        raise ConfigError(f"{path}: empty table")
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    for index, row in enumerate(rows):
        if len(row) != len(header):
            raise ConfigError(
                f"{path}: row {index} has {len(row)} cells, "
                f"header has {len(header)}")
    return header, rows


def sha256_of(path: str | Path) -> str:
    """Hex SHA-256 of a file's bytes."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _jsonable(value: Any) -> Any:
    """Reject non-JSON config values early with a config error."""
    try:
        json.dumps(value)
    except TypeError as exc:
        raise ConfigError(f"manifest value {value!r} is not JSON "
                          "serializable") from exc
    return value


def write_manifest(path: str | Path, command: str,
                   config: Mapping[str, Any],
                   outputs: Sequence[str | Path]) -> Path:
    """Write the JSON run manifest next to the tables it describes.

    ``config`` is the full resolved parameter record (seed included);
    ``outputs`` are the table files, recorded by basename plus SHA-256
    so a re-run can be verified bit-identical.  Keys are sorted and the
    float formatting is JSON's shortest round-trip, making the manifest
    itself deterministic.
    """
    path = Path(path)
    record = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "command": command,
        "config": _jsonable(dict(config)),
        "outputs": [{"file": Path(out).name, "sha256": sha256_of(out)}
                    for out in outputs],
    }
    path.write_text(json.dumps(record, sort_keys=True, indent=1) + "\n",
                    encoding="utf-8", newline="\n")
    return path


def read_manifest(path: str | Path) -> dict[str, Any]:
    """Read and validate a manifest written by :func:`write_manifest`."""
    try:
        record = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(record, dict):
        raise ConfigError(f"{path}: manifest must be a JSON object")
    missing = _MANIFEST_KEYS - record.keys()
    if missing:
        raise ConfigError(f"{path}: manifest missing {sorted(missing)}")
    if record["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"{path}: schema version {record['schema_version']!r} not "
            f"supported (expected {SCHEMA_VERSION})")
    return record
