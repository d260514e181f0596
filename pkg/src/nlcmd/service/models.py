"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field


class SessionCreateRequest(BaseModel):
    adapter: str = "editor"
    language: str = "en"


class SessionCreated(BaseModel):
    id: str


class CommandRequest(BaseModel):
    text: str


class SelectionRequest(BaseModel):
    surface: str
    index: int = Field(description="chosen dictionary index, or -1 to reject all")


class SuitLoadRequest(BaseModel):
    suit_id: str


class SuitInfo(BaseModel):
    id: str
    name: str
    version: str
    language_id: str
    adapter_id: str


class SuitUploaded(BaseModel):
    id: str


class ErrorBody(BaseModel):
    kind: str
    detail: str


# Traces are engine-defined stage lists; the service passes them through
# untouched so golden serializations stay bit-exact.
TraceDict = dict[str, Any]
