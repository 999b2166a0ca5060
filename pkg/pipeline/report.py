"""
Report writers: versioned report.json and CSV artifacts
Output is deterministic: fixed key order and 12 significant digits
"""

import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SIGNIFICANT_DIGITS = 12
CSV_FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"


def format_number(value: float) -> Any:
    """12 significant digits; non-finite values become strings"""
    if not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


def normalize(value: Any) -> Any:
    """Convert numpy, enum and path values into plain JSON types"""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return format_number(float(value))
    if isinstance(value, Enum):
        return str(value)
    if isinstance(value, Path):
        return value.as_posix()
    if isinstance(value, np.ndarray):
        return [normalize(v) for v in value.tolist()]
    if isinstance(value, Mapping):
        return {str(k): normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize(v) for v in value]
    return value


def build_report(command: str, n: int, profile: Optional[Dict[str, Any]],
                 verdicts: List[Dict[str, Any]], results: Dict[str, Any],
                 artifacts: List[str], error: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "n": n,
        "profile": normalize(profile) if profile is not None else None,
        "verdicts": normalize(verdicts),
        "results": normalize(results),
        "artifacts": sorted(artifacts),
        "error": error,
    }


def write_json(report: Dict[str, Any], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(report, indent=2, ensure_ascii=False, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    logger.info(f"💾 Wrote {path}")
    return path


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info(f"💾 Wrote {path} ({len(frame)} rows)")
    return path
