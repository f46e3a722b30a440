from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np


def ensure_dir(path: Path) -> None:
    path.mkdir(parents=True, exist_ok=True)


def _default(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator}
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.complexfloating):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "as_dict"):
        return obj.as_dict()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def to_json(data: object) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, ASCII only."""
    return json.dumps(data, indent=2, ensure_ascii=True, sort_keys=True, default=_default)


def dump_json(path: Path, data: object) -> None:
    ensure_dir(path.parent)
    path.write_text(to_json(data) + "\n", encoding="utf-8")
