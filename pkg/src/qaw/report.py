"""Reports: verdicts plus witnesses, serialized canonically."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import __version__
from .dist import _Infinity, format_dist


def jsonable(x: Any) -> Any:
    """Plain JSON data for witnesses: tuples become lists, distances strings."""
    if isinstance(x, (Fraction, _Infinity)):
        return format_dist(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


@dataclass
class Report:
    command: list[str]
    input_hash: str = ""
    verdicts: list[dict] = field(default_factory=list)
    result: dict = field(default_factory=dict)
    seconds: float = 0.0

    def verdict(self, name: str, holds: bool, witness: Any = None) -> bool:
        entry = {"name": name, "holds": bool(holds)}
        if witness is not None:
            entry["witness"] = jsonable(witness)
        self.verdicts.append(entry)
        return bool(holds)

    @property
    def ok(self) -> bool:
        return all(v["holds"] for v in self.verdicts)

    def as_dict(self) -> dict:
        return {"command": self.command, "input_hash": self.input_hash, "version": __version__,
                "verdicts": self.verdicts, "result": jsonable(self.result),
                "timing": {"seconds": round(self.seconds, 6)}}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = []
        for v in self.verdicts:
            tag = "PASS" if v["holds"] else "FAIL"
            line = f"{tag} {v['name']}"
            if "witness" in v:
                line += f"  witness: {json.dumps(v['witness'], sort_keys=True, ensure_ascii=False)}"
            lines.append(line)
        for key in sorted(self.result):
            value = self.result[key]
            if isinstance(value, str) and "\n" in value:
                lines.append(f"{key}:")
                lines.extend("  " + row for row in value.rstrip("\n").split("\n"))
            else:
                lines.append(f"{key}: {json.dumps(jsonable(value), sort_keys=True, ensure_ascii=False)}")
        return "\n".join(lines) + "\n"


def content_hash(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def error_report(command: list[str], exc: Exception, input_hash: str = "") -> dict:
    return {"command": command, "input_hash": input_hash, "version": __version__,
            "error": {"type": type(exc).__name__, "message": str(exc)}}
