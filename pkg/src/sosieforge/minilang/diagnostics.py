from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

PARSE_ERROR = "ParseError"
TYPE_ERROR = "TypeError"
RETURN_PATH_ERROR = "ReturnPathError"
NAME_ERROR = "NameError"


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    function: Optional[str] = None
    sid: Optional[int] = None
    offset: Optional[int] = None

    def __str__(self) -> str:
        where = []
        if self.function is not None:
            where.append(f"fn {self.function}")
        if self.sid is not None:
            where.append(f"stmt {self.sid}")
        if self.offset is not None:
            where.append(f"offset {self.offset}")
        loc = f" [{', '.join(where)}]" if where else ""
        return f"{self.kind}{loc}: {self.message}"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "message": self.message,
            "function": self.function,
            "sid": self.sid,
            "offset": self.offset,
        }


class MiniLangError(Exception):
    """Raised by the convenience entry points when diagnostics are present."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))
