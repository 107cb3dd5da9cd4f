"""Serialization helpers: JSON with 17 significant digits, phase file parsing."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .core import PhaseSequence
from .errors import InvalidSequenceError


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return "null" if obj is None else ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text where every float carries 17 significant digits."""
    return _encode(obj, indent, 0)


def parse_phase_text(text: str) -> PhaseSequence:
    """Parse a JSON array of numbers or newline-delimited decimals.

    Blank lines and lines starting with '#' are ignored in the text form.
    """
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            values = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InvalidSequenceError(f"bad JSON phase array: {exc}") from None
        if not isinstance(values, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
        ):
            raise InvalidSequenceError("JSON phase input must be an array of numbers")
    else:
        values = []
        for lineno, line in enumerate(stripped.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise InvalidSequenceError(f"line {lineno}: not a number: {line!r}") from None
    return PhaseSequence(np.asarray(values, dtype=float))


def parse_inline(text: str) -> PhaseSequence:
    try:
        values = [float(tok) for tok in text.replace(";", ",").split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidSequenceError(f"bad inline phases: {exc}") from None
    return PhaseSequence(np.asarray(values, dtype=float))


def read_phases(path: str | Path) -> PhaseSequence:
    return parse_phase_text(Path(path).read_text())


def write_phases(path: str | Path, a: PhaseSequence) -> None:
    Path(path).write_text("".join(fmt(x) + "\n" for x in a.phases))
