"""Shared failure type for every pipeline stage.

All engine failures carry a stable ``kind`` string (the value that ends up
in traces and service responses) plus a human-readable detail. Extra
keyword data rides along for callers that need structure (e.g. the learner
reads the unknown-word runs off a tagging failure).
"""

from __future__ import annotations

from typing import Any


class EngineError(Exception):
    """A pipeline failure with a stable kind identifier."""

    def __init__(self, kind: str, detail: str, **data: Any) -> None:
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail
        self.data = data

    def to_json_dict(self) -> dict[str, str]:
        return {"kind": self.kind, "detail": self.detail}
