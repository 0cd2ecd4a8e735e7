"""
I/O utilities

JSON and CSV serialization and run-directory handling.

Features:
    - Pydantic model serialization
    - JSON loading/saving with validation
    - Locale-free CSV with round-trip float formatting
    - Run directory management
"""

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import TypeVar

from pydantic import BaseModel

T = TypeVar("T", bound=BaseModel)


def save_json(obj: BaseModel, filepath: str | Path, indent: int = 2) -> None:
    """
    Save Pydantic model to JSON file.

    Args:
        obj: Pydantic model object
        filepath: Path to save JSON
        indent: JSON indentation
    """
    output_path = Path(filepath)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(obj.model_dump_json(indent=indent, by_alias=True), encoding="utf-8")


def load_json(filepath: str | Path, model_class: type[T]) -> T:
    """
    Load and validate JSON file as Pydantic model.

    Args:
        filepath: Path to JSON file
        model_class: Pydantic model class

    Returns:
        Validated model object
    """
    input_path = Path(filepath)
    if not input_path.exists():
        raise FileNotFoundError(f"JSON file not found: {filepath}")

    return model_class.model_validate_json(input_path.read_text(encoding="utf-8"))


def ensure_dir(dirpath: str | Path) -> Path:
    """
    Ensure directory exists, create if needed.

    Args:
        dirpath: Directory path

    Returns:
        Path object
    """
    path = Path(dirpath)
    path.mkdir(parents=True, exist_ok=True)
    return path


def create_run_structure(base_dir: str | Path, run_id: str) -> dict[str, Path]:
    """
    Create the directory structure for a run.

    Args:
        base_dir: Output root
        run_id: Unique run identifier

    Returns:
        Dictionary with paths to subdirectories
    """
    root = ensure_dir(Path(base_dir) / run_id)

    paths = {
        "root": root,
        "train": root / "train",
        "checkpoints": root / "train" / "checkpoints",
        "paths": root / "paths",
        "reports": root / "reports",
        "montecarlo": root / "montecarlo",
    }

    for path in paths.values():
        path.mkdir(parents=True, exist_ok=True)

    return paths


def format_float(value: float | None) -> str:
    """Format a float with 17 significant digits ('.' decimal, no locale); None as empty."""
    if value is None:
        return ""
    return f"{float(value):.17g}"


def write_csv(
    filepath: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence[float | int | str | None]],
) -> Path:
    """
    Write rows to a CSV file. Floats use 17 significant digits.

    Args:
        filepath: Output path
        header: Column names
        rows: Row values; ints and strings are written as-is

    Returns:
        Path of the written file
    """
    output_path = Path(filepath)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [
                    cell if isinstance(cell, (int, str)) and not isinstance(cell, bool)
                    else format_float(cell)
                    for cell in row
                ]
            )
    return output_path


def read_csv(filepath: str | Path) -> tuple[list[str], list[list[str]]]:
    """
    Read a CSV file written by write_csv.

    Returns:
        (header, rows) with cells as strings
    """
    input_path = Path(filepath)
    if not input_path.exists():
        raise FileNotFoundError(f"CSV file not found: {filepath}")
    with open(input_path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        return header, [row for row in reader]
