import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class ConfigFileError(Exception):
    """Raised when a config file cannot be read or is not a JSON object"""
    pass


class OutputWriteError(Exception):
    """Raised when a report or table cannot be written"""
    pass


def ensure_directory(path: PathLike) -> Path:
    """
    Create a directory (and parents) if needed

    Raises:
        OutputWriteError: the directory cannot be created
    """
    directory = Path(path)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputWriteError(f"Cannot create output directory {directory}: {e}")
    return directory


def load_json(path: PathLike) -> Dict[str, Any]:
    """
    Read a JSON object from a file

    Raises:
        ConfigFileError: missing file, invalid JSON or a non-object top level
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigFileError(f"Config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigFileError(f"Invalid JSON in {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigFileError(f"{path} must contain a JSON object")
    return data


def list_config_files(directory: PathLike) -> List[Path]:
    """Every *.json file in a directory, sorted by name"""
    directory = Path(directory)
    if not directory.is_dir():
        raise ConfigFileError(f"Not a directory: {directory}")
    return sorted(directory.glob("*.json"), key=lambda p: p.name)


def dumps_sorted(data: Any) -> str:
    """JSON text with sorted keys and a trailing newline, identical for identical data"""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(path: PathLike, data: Any) -> Path:
    path = Path(path)
    if path.parent != Path(""):
        ensure_directory(path.parent)
    try:
        path.write_text(dumps_sorted(data), encoding="utf-8")
    except OSError as e:
        raise OutputWriteError(f"Cannot write {path}: {e}")
    logger.info(f"Wrote {path}")
    return path


def write_csv_rows(stream: TextIO, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """CSV with a header line; floats are written with repr so values round-trip exactly"""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])


def write_csv(path: Optional[PathLike], columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Optional[Path]:
    """Write a CSV table to `path`, or to stdout when path is None or '-'"""
    if path is None or str(path) == "-":
        write_csv_rows(sys.stdout, columns, rows)
        return None
    path = Path(path)
    if path.parent != Path(""):
        ensure_directory(path.parent)
    try:
        with path.open("w", encoding="utf-8", newline="") as f:
            write_csv_rows(f, columns, rows)
    except OSError as e:
        raise OutputWriteError(f"Cannot write {path}: {e}")
    logger.info(f"Wrote {path}")
    return path


def write_report(label: str, payload: Dict[str, Any], columns: Sequence[str], rows: Iterable[Sequence[Any]],
                 output_dir: PathLike, csv_path: Optional[PathLike] = None) -> Tuple[Path, Optional[Path]]:
    """
    Persist a scenario report

    Args:
        label: Report label, the stem of both file names
        payload: JSON-ready report body
        columns: Time-series header; empty for reports without a time series
        rows: Time-series rows in column order
        output_dir: Directory receiving <label>.json and <label>.csv
        csv_path: Overrides the CSV location

    Returns:
        Tuple of (json_path, csv_path); csv_path is None when there are no columns
    """
    directory = ensure_directory(output_dir)
    json_path = write_json(directory / f"{label}.json", payload)
    table_path = None
    if columns:
        table_path = write_csv(csv_path or directory / f"{label}.csv", columns, rows)
    return json_path, table_path


def format_table(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """Fixed-width text table for terminal summaries"""
    cells = [[str(c) for c in columns]] + [[str(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    lines = ["  ".join(value.ljust(width) for value, width in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines)
