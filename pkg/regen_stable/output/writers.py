"""
CSV and JSON writers. Outputs carry no timestamps, so identical runs produce identical files.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import pandas as pd

from regen_stable.errors import OutputError
from regen_stable.models import StatSummary

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def output_dir(root: PathLike, kind: str) -> Path:
    """<root>/<kind>, created if missing."""
    path = Path(root) / kind
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"cannot create output directory {path}: {e}") from e
    return path


def write_csv(rows: Union[pd.DataFrame, Sequence[Mapping[str, Any]]], path: PathLike,
              columns: Optional[List[str]] = None) -> Path:
    """Write rows with full float precision; `columns` fixes the column order."""
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows), columns=columns)
    path = Path(path)
    try:
        frame.to_csv(path, index=False, float_format="%.17g")
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from e
    logger.debug("wrote %d rows to %s", len(frame), path)
    return path


def write_json(payload: Dict[str, Any], path: PathLike) -> Path:
    path = Path(path)
    try:
        path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from e
    return path


def write_summary(summary: StatSummary, directory: PathLike, config: Dict[str, Any]) -> Path:
    """summary.json: the summary, its pass/fail booleans and the resolved configuration."""
    payload = summary.model_dump(mode="json")
    payload["passed"] = summary.passed
    payload["failing"] = summary.failing
    payload["config"] = config
    return write_json(payload, Path(directory) / "summary.json")
